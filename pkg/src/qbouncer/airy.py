"""Airy function Ai, its derivative, its negative zeros, and bouncer eigenfunctions.

Evaluation strategy:

* ``-12 <= t <= 8``: Taylor re-expansion of ``y'' = t y`` about the nearest
  anchor of a table spaced 0.25 apart. The anchor table is built once by
  high-order Taylor stepping, outward from the exact values at ``t = 0`` on the
  oscillatory side and inward from the asymptotic values at ``t = 8`` on the
  decaying side (the direction in which Ai dominates, so stepping is stable).
* ``t > 8`` and ``t < -12``: the exponential and the modulus/phase asymptotic
  series, truncated at the smallest term.

Supported domain is ``-400 <= t <= 200``; for ``t`` above ~105 Ai underflows
to zero in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels

T_MIN = -400.0
T_MAX = 200.0

_ANCHOR_LO = -12.0
_ANCHOR_HI = 8.0
_SPACING = 0.25

AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))


class AiryRangeError(ValueError):
    pass


@dataclass(frozen=True)
class AiryValue:
    ai: float | np.ndarray
    ai_prime: float | np.ndarray


@dataclass(frozen=True)
class BouncerMode:
    n: int
    z_n: float
    norm: float


def _asymptotic_coefficients(count: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.empty(count)
    u[0] = 1.0
    for k in range(1, count):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
    ks = np.arange(count)
    v = -(6 * ks + 1) / (6 * ks - 1) * u
    return u, v


_U, _V = _asymptotic_coefficients(40)


def _smallest_term_sum(coef: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Sum coef[k] * x**k elementwise, stopping each series at its smallest term."""
    total = np.zeros_like(x)
    term_prev = np.full_like(x, np.inf)
    live = np.ones(x.shape, dtype=bool)
    power = np.ones_like(x)
    for k in range(coef.size):
        term = coef[k] * power
        mag = np.abs(term)
        live &= mag < np.abs(term_prev)
        total = np.where(live, total + term, total)
        live &= mag > 1e-18 * np.abs(total)
        if not live.any():
            break
        term_prev = term
        power = power * x
    return total


def _asymptotic_positive(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    zeta = 2.0 / 3.0 * t**1.5
    inv = -1.0 / zeta
    su = _smallest_term_sum(_U, inv)
    sv = _smallest_term_sum(_V, inv)
    pref = np.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    q = t**0.25
    return pref / q * su, -pref * q * sv


def _asymptotic_negative(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = -t
    zeta = 2.0 / 3.0 * x**1.5
    inv2 = -1.0 / zeta**2
    p_u = _smallest_term_sum(_U[0::2], inv2)
    q_u = _smallest_term_sum(_U[1::2], inv2) / zeta
    p_v = _smallest_term_sum(_V[0::2], inv2)
    q_v = _smallest_term_sum(_V[1::2], inv2) / zeta
    phase = zeta - math.pi / 4.0
    c, s = np.cos(phase), np.sin(phase)
    q = x**0.25
    root_pi = math.sqrt(math.pi)
    ai = (c * p_u + s * q_u) / (root_pi * q)
    aip = q * (s * p_v - c * q_v) / root_pi
    return ai, aip


def _taylor_step(t0: float, a: float, b: float, h: float, nterm: int = 60) -> tuple[float, float]:
    c = [a, b, 0.5 * t0 * a]
    for k in range(3, nterm):
        c.append((t0 * c[k - 2] + c[k - 3]) / (k * (k - 1)))
    val = 0.0
    der = 0.0
    for k in range(nterm - 1, 0, -1):
        val = val * h + c[k]
        der = der * h + k * c[k]
    return val * h + c[0], der


@lru_cache(maxsize=1)
def _anchor_table() -> tuple[np.ndarray, np.ndarray]:
    n_neg = int(round(-_ANCHOR_LO / _SPACING))
    n_pos = int(round(_ANCHOR_HI / _SPACING))
    ai = np.empty(n_neg + n_pos + 1)
    aip = np.empty_like(ai)

    ai[n_neg], aip[n_neg] = AI0, AIP0
    a, b = AI0, AIP0
    for j in range(1, n_neg + 1):
        a, b = _taylor_step(-(j - 1) * _SPACING, a, b, -_SPACING)
        ai[n_neg - j], aip[n_neg - j] = a, b

    top_ai, top_aip = _asymptotic_positive(np.array([_ANCHOR_HI]))
    a, b = float(top_ai[0]), float(top_aip[0])
    ai[-1], aip[-1] = a, b
    for j in range(n_pos - 1, 0, -1):
        a, b = _taylor_step((j + 1) * _SPACING, a, b, -_SPACING)
        ai[n_neg + j], aip[n_neg + j] = a, b
    ai.setflags(write=False)
    aip.setflags(write=False)
    return ai, aip


def airy_eval(t) -> AiryValue:
    """Ai(t) and Ai'(t) for scalar or array ``t`` in [-400, 200]."""
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if not np.all(np.isfinite(tt)) or tt.min() < T_MIN or tt.max() > T_MAX:
        raise AiryRangeError(f"airy_eval supports {T_MIN} <= t <= {T_MAX}")
    ai = np.empty_like(tt)
    aip = np.empty_like(tt)

    mid = (tt >= _ANCHOR_LO) & (tt <= _ANCHOR_HI)
    if mid.any():
        anc_ai, anc_aip = _anchor_table()
        ai[mid], aip[mid] = _kernels.airy_taylor(tt[mid], _ANCHOR_LO, _SPACING, anc_ai, anc_aip)
    hi = tt > _ANCHOR_HI
    if hi.any():
        ai[hi], aip[hi] = _asymptotic_positive(tt[hi])
    lo = tt < _ANCHOR_LO
    if lo.any():
        ai[lo], aip[lo] = _asymptotic_negative(tt[lo])

    if scalar:
        return AiryValue(float(ai[0]), float(aip[0]))
    return AiryValue(ai.reshape(np.shape(t)), aip.reshape(np.shape(t)))


def ai(t):
    return airy_eval(t).ai


def zero_seed(n: int) -> float:
    return (3.0 * math.pi * (4 * n - 1) / 8.0) ** (2.0 / 3.0)


def _refine_zero(n: int) -> float:
    seed = zero_seed(n)
    half = 0.3 * math.pi / math.sqrt(seed)
    lo, hi = seed - half, seed + half
    f_lo, f_hi = ai(-lo), ai(-hi)
    while f_lo * f_hi > 0:
        half *= 1.5
        lo, hi = seed - half, seed + half
        f_lo, f_hi = ai(-lo), ai(-hi)

    z = seed
    for _ in range(100):
        val = airy_eval(-z)
        f = val.ai
        if f == 0.0:
            return z
        if f * f_lo > 0:
            lo, f_lo = z, f
        else:
            hi = z
        # d/dz Ai(-z) = -Ai'(-z)
        z_new = z + f / val.ai_prime
        if not (lo < z_new < hi):
            z_new = 0.5 * (lo + hi)
        if abs(z_new - z) <= 4e-16 * z:
            return z_new
        z = z_new
    return z


@lru_cache(maxsize=64)
def _cached_zero(n: int) -> float:
    return _refine_zero(n)


def airy_zero(n: int) -> float:
    """Magnitude of the n-th negative zero of Ai (1 <= n <= 1000)."""
    if not (1 <= n <= 1000) or int(n) != n:
        raise AiryRangeError(f"airy_zero supports integer 1 <= n <= 1000, got {n!r}")
    n = int(n)
    if n <= 64:
        return _cached_zero(n)
    return _refine_zero(n)


def airy_zeros(n_max: int) -> np.ndarray:
    return np.array([airy_zero(n) for n in range(1, n_max + 1)])


def bouncer_mode(n: int) -> BouncerMode:
    z_n = airy_zero(n)
    return BouncerMode(n=int(n), z_n=z_n, norm=abs(airy_eval(-z_n).ai_prime))


def eigenfunction(mode: BouncerMode, z):
    """Normalized hard-wall bouncer state Ai(z - z_n) / |Ai'(-z_n)| at height z >= 0."""
    arg = np.asarray(z, dtype=np.float64) - mode.z_n
    # Ai underflows long before T_MAX
    arg = np.minimum(arg, T_MAX)
    return airy_eval(arg).ai / mode.norm
