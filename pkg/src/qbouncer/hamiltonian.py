"""Hamiltonians of the dissipative bouncer.

Two families are evaluated here:

* the exponential per-leg Hamiltonians, whose canonical momentum is not m*v
  (``exp_down``: p = m v exp(-2 gamma x / m), ``exp_up``: p = m v exp(+2 gamma x / m));
* the conservative per-leg Hamiltonians with p = m v, whose potentials follow
  from substituting the closed-form v**2(x) back into the drag law, together
  with their sign-weighted combination and its quadratic truncation.

All potentials are written as ``m g x * exprel(u)`` so gamma = 0 is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .classical import Leg, exprel
from .model import PhysicalParams

Convention = Literal["kinetic", "exp_down", "exp_up"]


class ConventionError(ValueError):
    """A PhaseState was fed to a Hamiltonian of a different momentum convention."""


@dataclass(frozen=True)
class PhaseState:
    x: float | np.ndarray
    p: float | np.ndarray
    convention: Convention = "kinetic"


@dataclass(frozen=True)
class Coefficients:
    A: float
    B: float


def momentum_from_velocity(x, v, convention: Convention, params: PhysicalParams):
    x = np.asarray(x, dtype=np.float64)
    mv = params.m * np.asarray(v, dtype=np.float64)
    k2 = 2.0 * params.gamma / params.m
    if convention == "kinetic":
        return mv
    if convention == "exp_down":
        return mv * np.exp(-k2 * x)
    if convention == "exp_up":
        return mv * np.exp(k2 * x)
    raise ConventionError(f"unknown convention {convention!r}")


def phase_state(x, v, convention: Convention, params: PhysicalParams) -> PhaseState:
    return PhaseState(x, momentum_from_velocity(x, v, convention, params), convention)


def _require(state: PhaseState, convention: str):
    if state.convention != convention:
        raise ConventionError(f"expected {convention!r} momentum, got {state.convention!r}")


def exp_hamiltonian(x, p, leg: Leg, m: float, g: float, gamma: float):
    """Exponential Hamiltonian on raw arguments; gamma may be negative here."""
    x = np.asarray(x, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    a = 2.0 * gamma * x / m
    if leg == "down":
        return p * p / (2.0 * m) * np.exp(a) + m * g * x * exprel(-a)
    if leg == "up":
        return p * p / (2.0 * m) * np.exp(-a) + m * g * x * exprel(a)
    raise ValueError(f"leg must be 'down' or 'up', got {leg!r}")


def h_exp(state: PhaseState, leg: Leg, params: PhysicalParams):
    _require(state, "exp_down" if leg == "down" else "exp_up")
    return exp_hamiltonian(state.x, state.p, leg, params.m, params.g, params.gamma)


def cal_potential(x, leg: Leg, params: PhysicalParams):
    x = np.asarray(x, dtype=np.float64)
    m, g = params.m, params.g
    k2 = 2.0 * params.gamma / m
    drop = np.exp(-k2 * params.d)
    if leg == "down":
        return m * g * x * drop * exprel(k2 * x)
    if leg == "up":
        return m * g * x * (2.0 - drop) * exprel(-k2 * x)
    raise ValueError(f"leg must be 'down' or 'up', got {leg!r}")


def h_cal(state: PhaseState, leg: Leg, params: PhysicalParams):
    _require(state, "kinetic")
    p = np.asarray(state.p, dtype=np.float64)
    return p * p / (2.0 * params.m) + cal_potential(state.x, leg, params)


def force_consistency(x, leg: Leg, params: PhysicalParams):
    """Position-dependent force along the true leg, -dV/dx of ``cal_potential``."""
    x = np.asarray(x, dtype=np.float64)
    m, g = params.m, params.g
    k2 = 2.0 * params.gamma / m
    if leg == "down":
        return -m * g * np.exp(-k2 * (params.d - x))
    if leg == "up":
        return -m * g * (2.0 * np.exp(-k2 * x) - np.exp(-k2 * (params.d + x)))
    raise ValueError(f"leg must be 'down' or 'up', got {leg!r}")


def coefficients(params: PhysicalParams) -> Coefficients:
    mg = params.m * params.g
    drop = np.exp(-2.0 * params.gamma * params.d / params.m)
    return Coefficients(A=float(mg * drop), B=float(mg * (2.0 - drop)))


def perturbation_coefficient(params: PhysicalParams) -> float:
    """Coefficient c of the c*x**2 term of the truncated effective Hamiltonian.

    Equals ((A - B)/2) * (2 gamma / m) = -2 gamma g (1 - exp(-2 gamma d / m)),
    evaluated through expm1 to stay accurate as gamma -> 0. The second-order
    Taylor coefficient of the leg-averaged potential itself is half of this;
    ``taylor_remainder`` exposes the difference.
    """
    kappa = 2.0 * params.gamma * params.d / params.m
    # + 0.0 turns the gamma = 0 result into +0.0
    return float(2.0 * params.gamma * params.g * np.expm1(-kappa)) + 0.0


def h_effective_full(state: PhaseState, params: PhysicalParams):
    """Leg Hamiltonian selected by the sign of p; the mean of both at p = 0."""
    _require(state, "kinetic")
    p = np.asarray(state.p, dtype=np.float64)
    up = h_cal(state, "up", params)
    down = h_cal(state, "down", params)
    out = np.where(p > 0, up, np.where(p < 0, down, 0.5 * (up + down)))
    return out if out.ndim else float(out)


def sign_term(state: PhaseState, params: PhysicalParams):
    """(H_up - H_down)/2, the part weighted by p/|p| in the effective Hamiltonian."""
    _require(state, "kinetic")
    return 0.5 * (cal_potential(state.x, "up", params) - cal_potential(state.x, "down", params))


def h_effective_truncated(state: PhaseState, params: PhysicalParams):
    _require(state, "kinetic")
    x = np.asarray(state.x, dtype=np.float64)
    p = np.asarray(state.p, dtype=np.float64)
    co = coefficients(params)
    return p * p / (2.0 * params.m) + 0.5 * (co.A + co.B) * x + perturbation_coefficient(params) * x * x


def truncated_potential(x, leg: Leg, params: PhysicalParams):
    """Two-term per-leg expansion that the truncated effective Hamiltonian averages."""
    x = np.asarray(x, dtype=np.float64)
    co = coefficients(params)
    k2 = 2.0 * params.gamma / params.m
    if leg == "down":
        return co.A * (x + k2 * x * x)
    if leg == "up":
        return -co.B * (-x + k2 * x * x)
    raise ValueError(f"leg must be 'down' or 'up', got {leg!r}")


def taylor_remainder(x, leg: Leg, params: PhysicalParams):
    """Exact leg potential minus ``truncated_potential``."""
    return cal_potential(x, leg, params) - truncated_potential(x, leg, params)
