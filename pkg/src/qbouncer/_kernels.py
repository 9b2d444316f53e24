"""Hot inner loops.

Each kernel is written in the numba-compatible subset of Python. When numba
is disabled the same functions run as plain Python, except where a
vectorised numpy variant is cheaper (Airy Taylor evaluation, Sturm counts);
those are selected by the public dispatchers at the bottom.
"""

import numpy as np

from ._accel import USE_NUMBA, njit

# ---------------------------------------------------------------------------
# Airy: Taylor re-expansion about tabulated anchors (y'' = t y)
# ---------------------------------------------------------------------------

AIRY_TAYLOR_TERMS = 34


@njit
def _airy_taylor_loop(t, t_first, spacing, anc_ai, anc_aip, out_ai, out_aip):
    nterm = AIRY_TAYLOR_TERMS
    c = np.empty(nterm)
    last = anc_ai.size - 1
    for i in range(t.size):
        j = int(np.floor((t[i] - t_first) / spacing + 0.5))
        if j < 0:
            j = 0
        elif j > last:
            j = last
        t0 = t_first + j * spacing
        h = t[i] - t0
        c[0] = anc_ai[j]
        c[1] = anc_aip[j]
        c[2] = 0.5 * t0 * c[0]
        for k in range(3, nterm):
            c[k] = (t0 * c[k - 2] + c[k - 3]) / (k * (k - 1))
        val = c[nterm - 1]
        der = (nterm - 1) * c[nterm - 1]
        for k in range(nterm - 2, 0, -1):
            val = val * h + c[k]
            der = der * h + k * c[k]
        val = val * h + c[0]
        out_ai[i] = val
        out_aip[i] = der


def _airy_taylor_numpy(t, t_first, spacing, anc_ai, anc_aip, out_ai, out_aip):
    nterm = AIRY_TAYLOR_TERMS
    j = np.clip(np.floor((t - t_first) / spacing + 0.5).astype(np.int64), 0, anc_ai.size - 1)
    t0 = t_first + j * spacing
    h = t - t0
    c = np.empty((nterm, t.size))
    c[0] = anc_ai[j]
    c[1] = anc_aip[j]
    c[2] = 0.5 * t0 * c[0]
    for k in range(3, nterm):
        c[k] = (t0 * c[k - 2] + c[k - 3]) / (k * (k - 1))
    val = c[nterm - 1].copy()
    der = (nterm - 1) * c[nterm - 1]
    for k in range(nterm - 2, 0, -1):
        val = val * h + c[k]
        der = der * h + k * c[k]
    out_ai[:] = val * h + c[0]
    out_aip[:] = der


def airy_taylor(t, t_first, spacing, anc_ai, anc_aip):
    t = np.ascontiguousarray(t, dtype=np.float64)
    out_ai = np.empty_like(t)
    out_aip = np.empty_like(t)
    if USE_NUMBA:
        _airy_taylor_loop(t, t_first, spacing, anc_ai, anc_aip, out_ai, out_aip)
    else:
        _airy_taylor_numpy(t, t_first, spacing, anc_ai, anc_aip, out_ai, out_aip)
    return out_ai, out_aip


# ---------------------------------------------------------------------------
# Symmetric tridiagonal eigenvalues by Sturm-sequence bisection
# ---------------------------------------------------------------------------


@njit
def sturm_count(diag, off2, sigma, pivmin):
    """Number of eigenvalues strictly below ``sigma``.

    ``off2`` holds the squared off-diagonal entries.
    """
    count = 0
    q = diag[0] - sigma
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, diag.size):
        q = diag[i] - sigma - off2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@njit
def _bisect_loop(diag, off2, k_max, lo, hi, rtol, pivmin):
    out = np.empty(k_max)
    for k in range(1, k_max + 1):
        a = lo
        b = hi
        # reuse the previous eigenvalue as a lower bracket
        if k > 1:
            a = out[k - 2] - (hi - lo) * 1e-15
        for _ in range(400):
            if b - a <= rtol * max(abs(a), abs(b)) + pivmin:
                break
            mid = 0.5 * (a + b)
            if sturm_count(diag, off2, mid, pivmin) >= k:
                b = mid
            else:
                a = mid
        out[k - 1] = 0.5 * (a + b)
    return out


def sturm_counts_numpy(diag, off2, sigmas, pivmin):
    """Vectorised over shifts; the recurrence over the diagonal stays a loop."""
    sigmas = np.asarray(sigmas, dtype=np.float64)
    q = diag[0] - sigmas
    q = np.where(np.abs(q) < pivmin, -pivmin, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, diag.size):
        q = diag[i] - sigmas - off2[i - 1] / q
        q = np.where(np.abs(q) < pivmin, -pivmin, q)
        count += q < 0
    return count


def _bisect_numpy(diag, off2, k_max, lo, hi, rtol, pivmin):
    ks = np.arange(1, k_max + 1)
    a = np.full(k_max, lo)
    b = np.full(k_max, hi)
    for _ in range(400):
        active = b - a > rtol * np.maximum(np.abs(a), np.abs(b)) + pivmin
        if not active.any():
            break
        mid = 0.5 * (a + b)
        counts = sturm_counts_numpy(diag, off2, mid[active], pivmin)
        upper = counts >= ks[active]
        idx = np.flatnonzero(active)
        b[idx[upper]] = mid[active][upper]
        a[idx[~upper]] = mid[active][~upper]
    return 0.5 * (a + b)


def tridiagonal_bisection(diag, off, k_max, rtol=1e-12):
    """Lowest ``k_max`` eigenvalues of the symmetric tridiagonal (diag, off)."""
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off = np.ascontiguousarray(off, dtype=np.float64)
    off2 = off * off
    radius = np.zeros_like(diag)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    lo = float(np.min(diag - radius))
    hi = float(np.max(diag + radius))
    span = max(hi - lo, abs(lo), abs(hi))
    lo -= 1e-12 * span
    hi += 1e-12 * span
    pivmin = np.finfo(np.float64).tiny * max(1.0, float(off2.max(initial=0.0)))
    if USE_NUMBA:
        return _bisect_loop(diag, off2, k_max, lo, hi, rtol, pivmin)
    return _bisect_numpy(diag, off2, k_max, lo, hi, rtol, pivmin)


def sturm_count_at(diag, off, sigma):
    diag = np.ascontiguousarray(diag, dtype=np.float64)
    off2 = np.ascontiguousarray(off, dtype=np.float64) ** 2
    pivmin = np.finfo(np.float64).tiny * max(1.0, float(off2.max(initial=0.0)))
    if USE_NUMBA:
        return int(sturm_count(diag, off2, float(sigma), pivmin))
    return int(sturm_counts_numpy(diag, off2, [float(sigma)], pivmin)[0])


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) integration of one monotone leg of m v' = -m g - gamma v|v|
# ---------------------------------------------------------------------------

_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = np.array(
    [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1 / 5, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3 / 40, 9 / 40, 0.0, 0.0, 0.0, 0.0],
        [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0, 0.0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0, 0.0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0.0],
        [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    ]
)
_DP_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_DP_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
_DP_P = np.array(
    [
        [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

STATUS_EVENT = 1
STATUS_STEP_UNDERFLOW = -1
STATUS_MAX_STEPS = -2


@njit
def _rhs(y, g, k, out):
    v = y[1]
    out[0] = v
    out[1] = -g - k * v * abs(v)
    out[2] = k * abs(v) ** 3


@njit
def _dp_stages(y, h, g, k, K, ynew, tmp):
    """Fill K with the seven stage derivatives and ynew with the 5th-order step."""
    _rhs(y, g, k, K[0])
    for s in range(1, 7):
        for c in range(3):
            acc = 0.0
            for r in range(s):
                acc += _DP_A[s, r] * K[r, c]
            tmp[c] = y[c] + h * acc
        _rhs(tmp, g, k, K[s])
    # stage 6 is evaluated at the 5th-order solution (FSAL)
    for c in range(3):
        ynew[c] = tmp[c]


@njit
def _dense(y, h, K, theta, comp):
    p1 = theta
    p2 = theta * theta
    p3 = p2 * theta
    p4 = p3 * theta
    acc = 0.0
    for s in range(7):
        q = _DP_P[s, 0] * p1 + _DP_P[s, 1] * p2 + _DP_P[s, 2] * p3 + _DP_P[s, 3] * p4
        acc += K[s, comp] * q
    return y[comp] + h * acc


@njit
def _append(buf, n, t, y):
    if n == buf.shape[0]:
        bigger = np.empty((2 * buf.shape[0], 4))
        bigger[:n] = buf[:n]
        buf = bigger
    buf[n, 0] = t
    buf[n, 1] = y[0]
    buf[n, 2] = y[1]
    buf[n, 3] = y[2]
    return buf


@njit
def integrate_leg(t0, x0, v0, w0, g, k, falling, rtol, atol_x, atol_v, atol_w, h0, max_steps):
    """Integrate from (t0, x0, v0) until x hits 0 (falling) or v hits 0 (rising).

    The state carries ``w``, the dissipated work per unit mass, integrated
    alongside the motion. Returns (samples[n, 4] as t,x,v,w; status; steps).
    The last sample is the refined event point.
    """
    comp = 0 if falling else 1
    buf = np.empty((256, 4))
    n = 0
    y = np.array([x0, v0, w0])
    ynew = np.empty(3)
    tmp = np.empty(3)
    ysub = np.empty(3)
    K = np.empty((7, 3))
    Ksub = np.empty((7, 3))
    atol = np.array([atol_x, atol_v, atol_w])
    t = t0
    h = h0
    buf = _append(buf, n, t, y)
    n += 1
    status = STATUS_MAX_STEPS
    steps = 0
    while steps < max_steps:
        steps += 1
        _dp_stages(y, h, g, k, K, ynew, tmp)
        err2 = 0.0
        for c in range(3):
            e = 0.0
            for s in range(7):
                e += _DP_E[s] * K[s, c]
            e *= h
            sc = atol[c] + rtol * max(abs(y[c]), abs(ynew[c]))
            err2 += (e / sc) ** 2
        err = np.sqrt(err2 / 3.0)
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            if h < 1e-13 * h0:
                status = STATUS_STEP_UNDERFLOW
                break
            continue

        if ynew[comp] <= 0.0:
            # bracket on the dense output, then polish with exact substeps
            a = 0.0
            b = 1.0
            for _ in range(60):
                mid = 0.5 * (a + b)
                if _dense(y, h, K, mid, comp) > 0.0:
                    a = mid
                else:
                    b = mid
                if b - a < 1e-15:
                    break
            theta = 0.5 * (a + b)
            for _ in range(4):
                _dp_stages(y, theta * h, g, k, Ksub, ysub, tmp)
                if falling:
                    slope = ysub[1]
                else:
                    slope = -g - k * ysub[1] * abs(ysub[1])
                if slope == 0.0:
                    break
                step = ysub[comp] / (slope * h)
                theta_new = theta - step
                if not (0.0 < theta_new <= 1.5):
                    break
                theta = theta_new
                if abs(step) < 1e-16:
                    break
            _dp_stages(y, theta * h, g, k, Ksub, ysub, tmp)
            buf = _append(buf, n, t + theta * h, ysub)
            n += 1
            status = STATUS_EVENT
            break

        t += h
        for c in range(3):
            y[c] = ynew[c]
        buf = _append(buf, n, t, y)
        n += 1
        if err == 0.0:
            fac = 5.0
        else:
            fac = min(5.0, max(0.2, 0.9 * err ** -0.2))
        h *= fac
    return buf[:n].copy(), status, steps
