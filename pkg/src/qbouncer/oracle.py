"""Independent numerical checks of the bouncer spectrum.

Two eigensolvers that share nothing with the closed-form spectrum route:

* a three-point finite-difference Hamiltonian on a Dirichlet box, solved by
  Sturm-sequence bisection;
* diagonalisation of the truncated effective Hamiltonian in the basis of
  unperturbed bouncer states, with matrix elements from quadrature.

The truncated potential m g x + c x**2 (c < 0) is unbounded below and turns
over at x* = -m g / (2 c). Grid boxes may not extend past x*, and in the
Airy basis, deep basis states dive below the physical levels once
c ell_g**2 z_n**2 dominates z_n. Levels are therefore assigned to the
eigenvector with the largest overlap on the matching unperturbed state
rather than by rank.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
from scipy.linalg import solve_banded

from . import _kernels
from .airy import airy_eval, airy_zero, bouncer_mode, eigenfunction
from .hamiltonian import perturbation_coefficient
from .model import PhysicalParams, derive_scales
from .quadrature import QuadratureError, composite_gauss_legendre, gauss_kronrod
from .spectrum import energy_level, first_order_correction


class TurnoverError(ValueError):
    pass


class PerturbationRegimeError(ValueError):
    pass


@dataclass(frozen=True)
class GridSpec:
    L: float
    N: int

    def __post_init__(self):
        if self.N < 100:
            raise ValueError("GridSpec needs N >= 100 interior points")
        if not self.L > 0:
            raise ValueError("GridSpec needs L > 0")

    @property
    def h(self) -> float:
        return self.L / (self.N + 1)

    def refined(self) -> "GridSpec":
        """Grid with exactly half the spacing."""
        return GridSpec(self.L, 2 * self.N + 1)


@dataclass
class EigenReport:
    method: Literal["finite_difference", "airy_basis"]
    eigenvalues: np.ndarray
    residuals: np.ndarray
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "eigenvalues": [float(e) for e in self.eigenvalues],
            "residuals": [float(r) for r in self.residuals],
            "meta": self.meta,
        }


def turnover_point(params: PhysicalParams) -> float:
    """Maximum of m g x + c x**2; infinite when gamma = 0."""
    c = perturbation_coefficient(params)
    if c == 0.0:
        return math.inf
    return -params.m * params.g / (2.0 * c)


def linear_potential(params: PhysicalParams) -> Callable:
    mg = params.m * params.g
    return lambda x: mg * np.asarray(x)


def truncated_effective_potential(params: PhysicalParams) -> Callable:
    mg = params.m * params.g
    c = perturbation_coefficient(params)
    return lambda x: mg * np.asarray(x) + c * np.asarray(x) ** 2


def _assemble(potential, grid: GridSpec, params: PhysicalParams):
    x = grid.h * np.arange(1, grid.N + 1)
    kin = params.hbar**2 / (2.0 * params.m * grid.h**2)
    diag = 2.0 * kin + np.asarray(potential(x), dtype=np.float64)
    off = np.full(grid.N - 1, -kin)
    return diag, off


def _inverse_iteration(diag, off, eigenvalue, iterations=3):
    n = diag.size
    shift = eigenvalue * (1.0 + 1e-13) + 1e-300
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - shift
    ab[2, :-1] = off
    vec = np.ones(n) / math.sqrt(n)
    for _ in range(iterations):
        vec = solve_banded((1, 1), ab, vec)
        vec /= np.linalg.norm(vec)
    return vec


def _tridiag_matvec(diag, off, vec):
    out = diag * vec
    out[:-1] += off * vec[1:]
    out[1:] += off * vec[:-1]
    return out


def _fd_solve(potential, grid, k, params, rtol):
    diag, off = _assemble(potential, grid, params)
    values = _kernels.tridiagonal_bisection(diag, off, k, rtol=rtol)
    norm_t = float(np.max(np.abs(diag)) + 2.0 * np.max(np.abs(off)))
    residuals = np.empty(k)
    for i, e in enumerate(values):
        vec = _inverse_iteration(diag, off, e)
        residuals[i] = np.linalg.norm(_tridiag_matvec(diag, off, vec) - e * vec)
    return values, residuals, norm_t


def fd_eigenvalues(potential: Callable, grid: GridSpec, k: int, params: PhysicalParams, *,
                   perturbed: bool = False, richardson: bool = False,
                   rtol: float = 1e-12) -> EigenReport:
    """Lowest ``k`` eigenvalues of -(hbar^2/2m) psi'' + V psi on (0, L) with psi(0) = psi(L) = 0.

    ``perturbed`` marks V as the truncated effective potential, for which the
    box must stay inside the turnover point. With ``richardson`` the grid is
    also solved at half spacing and (4 E_{h/2} - E_h)/3 is reported.
    """
    if not (1 <= k <= 20):
        raise ValueError("k must lie in [1, 20]")
    if perturbed:
        x_star = turnover_point(params)
        if grid.L > x_star:
            raise TurnoverError(f"box length {grid.L:.6g} m exceeds the turnover point {x_star:.6g} m")
    values, residuals, norm_t = _fd_solve(potential, grid, k, params, rtol)
    meta = {"L": grid.L, "N": grid.N, "h": grid.h, "norm_T": norm_t, "richardson": False}
    if richardson:
        fine = grid.refined()
        fine_values, fine_res, fine_norm = _fd_solve(potential, fine, k, params, rtol)
        meta.update(
            richardson=True, N_fine=fine.N, h_fine=fine.h, norm_T_fine=fine_norm,
            coarse=[float(e) for e in values], fine=[float(e) for e in fine_values],
        )
        values = (4.0 * fine_values - values) / 3.0
        residuals = fine_res
    return EigenReport("finite_difference", np.asarray(values), residuals, meta)


def matrix_element(i: int, j: int, weight: Callable, *, atol: float = 1e-10, max_depth: int = 40) -> float:
    """Integral over z >= 0 of psi_i(z) weight(z) psi_j(z)."""
    mi, mj = bouncer_mode(i), bouncer_mode(j)
    top = max(mi.z_n, mj.z_n) + 12.0

    def integrand(z):
        return eigenfunction(mi, z) * weight(z) * eigenfunction(mj, z)

    try:
        value, _ = gauss_kronrod(integrand, 0.0, top, atol=atol, breakpoints=(mi.z_n, mj.z_n),
                                  max_depth=max_depth)
    except QuadratureError as exc:
        raise QuadratureError(f"matrix element <{i}|w|{j}> did not converge") from exc
    return value


@lru_cache(maxsize=8)
def _basis(m_size: int):
    """Airy zeros plus overlap and <i|z^2|j> matrices on a composite Gauss-Legendre grid."""
    z = np.array([airy_zero(n) for n in range(1, m_size + 1)])
    norms = np.abs(airy_eval(-z).ai_prime)
    nodes, weights = composite_gauss_legendre(0.0, z[-1] + 12.0, panel=0.25, order=20)
    psi = airy_eval(nodes[None, :] - z[:, None]).ai / norms[:, None]
    weighted = psi * weights
    overlap = weighted @ psi.T
    z2 = (weighted * nodes**2) @ psi.T
    for arr in (z, overlap, z2):
        arr.setflags(write=False)
    return z, overlap, z2


def airy_basis_matrix(params: PhysicalParams, basis_size: int) -> tuple[np.ndarray, float]:
    """H_ij = E_i delta_ij + lam <i|z^2|j> in units of m g ell_g, and lam in joules."""
    scales = derive_scales(params)
    lam = perturbation_coefficient(params) * scales.ell_g**2
    z, _, z2 = _basis(basis_size)
    lam_nat = lam / scales.e_scale
    asym = np.max(np.abs(z2 - z2.T)) * abs(lam_nat)
    if asym > 1e-10 * abs(lam_nat):
        raise QuadratureError(f"z^2 matrix asymmetry {asym:.3g} exceeds tolerance")
    return np.diag(z) + lam_nat * 0.5 * (z2 + z2.T), lam


def airy_basis_eigenvalues(params: PhysicalParams, basis_size: int = 40, k: int = 2) -> EigenReport:
    if basis_size < 20 or not (1 <= k <= basis_size // 4):
        raise ValueError("need basis_size >= 20 and 1 <= k <= basis_size/4")
    scales = derive_scales(params)
    h_nat, lam = airy_basis_matrix(params, basis_size)
    values, vectors = np.linalg.eigh(h_nat)
    picks = np.argmax(vectors[:k] ** 2, axis=1)
    if len(set(picks.tolist())) != k:
        raise PerturbationRegimeError("perturbed levels could not be matched to distinct basis states")
    chosen = values[picks]
    residuals = np.array(
        [np.linalg.norm(h_nat @ vectors[:, p] - values[p] * vectors[:, p]) for p in picks]
    ) * scales.e_scale
    meta = {
        "basis_size": basis_size,
        "lambda": lam,
        "overlaps": [float(vectors[n, p] ** 2) for n, p in enumerate(picks)],
        "states_below_ground": int(picks[0]),
        "units": "J",
    }
    return EigenReport("airy_basis", chosen * scales.e_scale, residuals, meta)


@dataclass(frozen=True)
class PerturbationCheck:
    n: int
    gamma: float
    de_formula: float
    de_oracle: float
    relative_mismatch: float
    abs_mismatch: float
    abs_mismatch_half_gamma: float
    gamma_exponent: float
    coupling_exponent: float


def _oracle_shift(params: PhysicalParams, n: int, basis_size: int) -> float:
    report = airy_basis_eigenvalues(params, basis_size, k=n)
    e0 = derive_scales(params).e_scale * airy_zero(n)
    return float(report.eigenvalues[n - 1] - e0)


def verify_perturbation(params: PhysicalParams, n: int = 1, *, basis_size: int = 40) -> PerturbationCheck:
    """Compare the first-order shift of level n with the Airy-basis oracle.

    The mismatch is also computed at gamma/2. Its log-ratio gives the scaling
    exponent, both against gamma and against the coupling c (which is not
    proportional to gamma until 2 gamma d / m >> 1).
    """
    if energy_level(n, params).validity >= 0.3:
        raise PerturbationRegimeError("level is outside the perturbative regime (validity >= 0.3)")
    de_formula = first_order_correction(n, params)
    if params.gamma == 0.0:
        return PerturbationCheck(n, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, math.nan, math.nan)
    de_oracle = _oracle_shift(params, n, basis_size)
    mismatch = abs(de_oracle - de_formula)
    half = PhysicalParams(params.m, params.g, 0.5 * params.gamma, params.d, params.hbar)
    mismatch_half = abs(_oracle_shift(half, n, basis_size) - first_order_correction(n, half))
    ratio = mismatch / mismatch_half
    coupling_ratio = perturbation_coefficient(params) / perturbation_coefficient(half)
    return PerturbationCheck(
        n=n, gamma=params.gamma,
        de_formula=de_formula, de_oracle=de_oracle,
        relative_mismatch=mismatch / abs(de_formula),
        abs_mismatch=mismatch, abs_mismatch_half_gamma=mismatch_half,
        gamma_exponent=math.log(ratio) / math.log(2.0),
        coupling_exponent=math.log(ratio) / math.log(coupling_ratio),
    )


def gamma_scaling_exponent(params: PhysicalParams, gammas, n: int = 1, basis_size: int = 40,
                           against: Literal["gamma", "coupling"] = "gamma") -> float:
    """Least-squares slope of log |oracle shift - first-order shift| against log gamma (or log |c|)."""
    xs, ys = [], []
    for gamma in gammas:
        p = PhysicalParams(params.m, params.g, gamma, params.d, params.hbar)
        mismatch = abs(_oracle_shift(p, n, basis_size) - first_order_correction(n, p))
        xs.append(math.log(gamma if against == "gamma" else abs(perturbation_coefficient(p))))
        ys.append(math.log(mismatch))
    return float(np.polyfit(xs, ys, 1)[0])
