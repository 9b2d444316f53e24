"""Classical bouncing particle under gravity and quadratic drag -gamma v|v|."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .model import PhysicalParams

Leg = Literal["down", "up"]

# Below this exponent the small-argument series replaces expm1(u)/u.
SMALL_EXPONENT = 1e-8

# Per-step error target as a fraction of the user tolerance, so that error
# accumulated over a leg stays below tol.
STEP_SAFETY = 1e-2


class DomainError(ValueError):
    pass


class StepSizeError(RuntimeError):
    pass


def exprel(u):
    """(e**u - 1)/u, exact at u = 0 and accurate for small |u|."""
    u = np.asarray(u, dtype=np.float64)
    small = np.abs(u) < SMALL_EXPONENT
    safe = np.where(small, 1.0, u)
    out = np.where(small, 1.0 + 0.5 * u + u * u / 6.0, np.expm1(safe) / safe)
    return out if out.ndim else float(out)


def drag_acceleration(v, params: PhysicalParams):
    return -params.g - (params.gamma / params.m) * v * np.abs(v)


def v_squared_profile(x, leg: Leg, params: PhysicalParams):
    """Closed-form v**2 at height x on a leg that started at rest from ``params.d``.

    ``down``: the fall from d; ``up``: the rise after the elastic bounce that
    ends that fall.
    """
    x = np.asarray(x, dtype=np.float64)
    m, g, gamma, d = params.m, params.g, params.gamma, params.d
    k2 = 2.0 * gamma / m
    slack = 1e-12 * d
    if leg == "down":
        if np.any(x < -slack) or np.any(x > d + slack):
            raise DomainError("down-leg profile defined for 0 <= x <= d")
        s = d - x
        out = 2.0 * g * s * exprel(-k2 * s)
    elif leg == "up":
        top = rebound_height(params)
        if np.any(x < -slack) or np.any(x > top + slack):
            raise DomainError("up-leg profile defined for 0 <= x <= rebound height")
        # (m g / gamma) (2 e^{-a} - e^{-b} - 1) with a = k2 x, b = k2 (d + x)
        out = 2.0 * g * ((d + x) * exprel(-k2 * (d + x)) - 2.0 * x * exprel(-k2 * x))
    else:
        raise ValueError(f"leg must be 'down' or 'up', got {leg!r}")
    out = np.maximum(out, 0.0)
    return out if out.ndim else float(out)


def rebound_height(params: PhysicalParams) -> float:
    """Apex height reached after one fall from d and an elastic bounce."""
    if params.gamma == 0.0:
        return params.d
    m, g, gamma, d = params.m, params.g, params.gamma, params.d
    k2 = 2.0 * gamma / m

    def up_speed_sq(x):
        return (d + x) * exprel(-k2 * (d + x)) - 2.0 * x * exprel(-k2 * x)

    return brentq(up_speed_sq, 0.0, d, xtol=1e-15 * d, rtol=1e-13, maxiter=500)


@dataclass
class LegSegment:
    kind: Leg
    start: int
    stop: int  # inclusive sample index
    drop_height: float  # start height of the fall this leg belongs to


@dataclass
class Trajectory:
    params: PhysicalParams
    tol: float
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    work: np.ndarray  # dissipated work per unit mass, cumulative (J/kg)
    bounces: list[tuple[float, float]] = field(default_factory=list)
    apexes: list[tuple[float, float]] = field(default_factory=list)
    legs: list[LegSegment] = field(default_factory=list)

    @property
    def n_cycles(self) -> int:
        return len(self.apexes)

    def leg_slice(self, i: int) -> slice:
        seg = self.legs[i]
        return slice(seg.start, seg.stop + 1)


@dataclass(frozen=True)
class CycleSummary:
    d_start: float
    v_impact: float
    d_rebound: float
    duration: float
    delta_e_mech: float
    work_integral: float


def _leg_tolerances(params: PhysicalParams, tol: float, height: float):
    k = params.gamma / params.m
    v_free = math.sqrt(2.0 * params.g * height)
    v_scale = v_free if k == 0.0 else min(v_free, math.sqrt(params.g / k))
    return tol * height, tol * v_scale, tol * params.g * height, v_scale


def _run_leg(params, tol, t0, x0, v0, w0, falling, height):
    tol = tol * STEP_SAFETY
    atol_x, atol_v, atol_w, v_scale = _leg_tolerances(params, tol, height)
    h0 = 1e-3 * v_scale / params.g
    out, status, _ = _kernels.integrate_leg(
        t0, x0, v0, w0, params.g, params.gamma / params.m, falling,
        tol, atol_x, atol_v, atol_w, h0, 10_000_000,
    )
    if status != _kernels.STATUS_EVENT:
        raise StepSizeError(f"leg integration failed (status {status}); parameters may be pathological")
    return out


def simulate(params: PhysicalParams, n_cycles: int = 1, tol: float = 1e-9) -> Trajectory:
    """Drop from rest at height d and follow ``n_cycles`` fall/bounce/rise cycles.

    Each leg is integrated with an adaptive Dormand-Prince 5(4) pair; the floor
    contact and the apex are located on the dense output and polished with
    exact sub-steps. The bounce reverses the velocity exactly.
    """
    params.validate()
    if n_cycles < 1:
        raise ValueError("n_cycles must be >= 1")
    if not (1e-14 <= tol <= 1e-3):
        raise ValueError("tol must lie in [1e-14, 1e-3]")

    chunks = []
    legs: list[LegSegment] = []
    bounces: list[tuple[float, float]] = []
    apexes: list[tuple[float, float]] = []
    t, x, w = 0.0, params.d, 0.0
    n = 0
    for _ in range(n_cycles):
        drop = x
        fall = _run_leg(params, tol, t, x, 0.0, w, True, drop)
        t_b, v_b, w_b = fall[-1, 0], fall[-1, 2], fall[-1, 3]
        fall[-1, 1] = 0.0
        fall[-1, 2] = -v_b
        skip = 1 if chunks else 0  # apex sample already stored
        chunks.append(fall[skip:])
        legs.append(LegSegment("down", n - (1 if skip else 0), n + len(fall) - skip - 1, drop))
        n += len(fall) - skip
        bounces.append((t_b, abs(v_b)))

        rise = _run_leg(params, tol, t_b, 0.0, -v_b, w_b, False, drop)
        rise[-1, 2] = 0.0
        chunks.append(rise[1:])
        legs.append(LegSegment("up", n - 1, n + len(rise) - 2, drop))
        n += len(rise) - 1
        t, x, w = rise[-1, 0], rise[-1, 1], rise[-1, 3]
        apexes.append((t, x))

    data = np.concatenate(chunks)
    return Trajectory(
        params=params, tol=tol,
        t=data[:, 0], x=data[:, 1], v=data[:, 2], work=data[:, 3],
        bounces=bounces, apexes=apexes, legs=legs,
    )


def cycle_energy_loss(traj: Trajectory, cycle_index: int) -> CycleSummary:
    """Energy bookkeeping for cycle ``cycle_index`` (1-based)."""
    if not (1 <= cycle_index <= traj.n_cycles):
        raise IndexError(f"trajectory holds {traj.n_cycles} complete cycles, asked for {cycle_index}")
    p = traj.params
    down = traj.legs[2 * (cycle_index - 1)]
    up = traj.legs[2 * (cycle_index - 1) + 1]
    d_start = float(traj.x[down.start])
    # the apex cannot exceed the leg start; clamp integrator rounding when gamma = 0
    d_rebound = min(float(traj.x[up.stop]), d_start)
    return CycleSummary(
        d_start=d_start,
        v_impact=traj.bounces[cycle_index - 1][1],
        d_rebound=d_rebound,
        duration=float(traj.t[up.stop] - traj.t[down.start]),
        delta_e_mech=p.m * p.g * (d_start - d_rebound),
        work_integral=p.m * float(traj.work[up.stop] - traj.work[down.start]),
    )
