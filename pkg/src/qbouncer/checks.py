"""Self-validation suites run by ``qbouncer validate``."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .airy import airy_zero
from .classical import rebound_height, simulate, v_squared_profile
from .hamiltonian import coefficients, h_cal, h_exp, phase_state
from .model import PhysicalParams, derive_scales
from .oracle import (
    GridSpec,
    fd_eigenvalues,
    gamma_scaling_exponent,
    linear_potential,
    matrix_element,
    verify_perturbation,
)
from .spectrum import z2_expectation


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def classical_profiles(params: PhysicalParams, tol: float = 1e-9) -> CheckResult:
    traj = simulate(params, n_cycles=1, tol=tol)
    worst = 0.0
    for i, seg in enumerate(traj.legs):
        sl = traj.leg_slice(i)
        leg_params = params.with_drop_height(seg.drop_height)
        ref = v_squared_profile(traj.x[sl], seg.kind, leg_params)
        scale = v_squared_profile(0.0, "down", leg_params)
        worst = max(worst, float(np.max(np.abs(traj.v[sl] ** 2 - ref)) / scale))
    apex_err = abs(traj.apexes[0][1] / rebound_height(params) - 1.0)
    ok = worst <= 1e-5 and apex_err <= 1e-5
    return CheckResult("classical_profiles", ok, f"max v^2 error {worst:.2e}, apex vs root {apex_err:.2e}")


def hamiltonian_conservation(params: PhysicalParams, tol: float = 1e-9) -> CheckResult:
    traj = simulate(params, n_cycles=1, tol=tol)
    worst = 0.0
    for i, seg in enumerate(traj.legs):
        sl = traj.leg_slice(i)
        leg_params = params.with_drop_height(seg.drop_height)
        conv = "exp_down" if seg.kind == "down" else "exp_up"
        for values in (
            h_exp(phase_state(traj.x[sl], traj.v[sl], conv, leg_params), seg.kind, leg_params),
            h_cal(phase_state(traj.x[sl], traj.v[sl], "kinetic", leg_params), seg.kind, leg_params),
        ):
            worst = max(worst, float(np.max(np.abs(values / values[0] - 1.0))))
    return CheckResult("hamiltonian_conservation", worst <= 1e-9, f"max relative drift {worst:.2e}")


def coefficient_identity(params: PhysicalParams, samples: int = 1000) -> CheckResult:
    rng = np.random.default_rng(12345)
    worst = 0.0
    for gamma, d in zip(10 ** rng.uniform(-30, -20, samples), 10 ** rng.uniform(-6, -1, samples)):
        p = replace(params, gamma=float(gamma), d=float(d))
        co = coefficients(p)
        mg = p.m * p.g
        worst = max(worst, abs(co.A + co.B - 2.0 * mg) / (2.0 * mg))
    return CheckResult("coefficient_identity", worst <= 4 * np.finfo(float).eps,
                       f"max |A+B-2mg|/2mg {worst:.2e} over {samples} parameter sets")


def airy_normalization(n_max: int = 10) -> CheckResult:
    one = lambda z: np.ones_like(z)  # noqa: E731
    norm_err = max(abs(matrix_element(n, n, one) - 1.0) for n in range(1, n_max + 1))
    orth = abs(matrix_element(1, 2, one))
    ok = norm_err <= 1e-8 and orth <= 1e-8
    return CheckResult("airy_normalization", ok, f"max |<n|n>-1| {norm_err:.2e}, |<1|2>| {orth:.2e}")


def z2_quadrature(n_max: int = 10) -> CheckResult:
    worst = max(
        abs(matrix_element(n, n, lambda z: z * z) / z2_expectation(n) - 1.0) for n in range(1, n_max + 1)
    )
    return CheckResult("z2_expectation_quadrature", worst <= 1e-6,
                       f"max relative error vs (8/15) z_n^2 {worst:.2e} for n=1..{n_max}")


def fd_unperturbed(params: PhysicalParams) -> CheckResult:
    s = derive_scales(params)
    report = fd_eigenvalues(linear_potential(params), GridSpec(12.0 * s.ell_g, 8000), 3, params)
    exact = s.e_scale * np.array([airy_zero(n) for n in (1, 2, 3)])
    worst = float(np.max(np.abs(report.eigenvalues / exact - 1.0)))
    return CheckResult("fd_unperturbed_levels", worst <= 1e-4, f"max relative error {worst:.2e} (n=1..3)")


def oracle_perturbation(params: PhysicalParams, gamma: float = 1e-24) -> CheckResult:
    check = verify_perturbation(replace(params, gamma=gamma), 1)
    return CheckResult("oracle_first_order", check.relative_mismatch <= 0.03,
                       f"gamma={gamma:g}: relative mismatch {check.relative_mismatch:.4f}")


def second_order_scaling(params: PhysicalParams, gammas=(5e-25, 1e-24, 2e-24)) -> CheckResult:
    p_coupling = gamma_scaling_exponent(params, gammas, against="coupling")
    p_gamma = gamma_scaling_exponent(params, gammas, against="gamma")
    return CheckResult(
        "second_order_scaling", 1.8 <= p_coupling <= 2.2,
        f"mismatch ~ coupling^{p_coupling:.3f} (gamma^{p_gamma:.3f}, inflated by the unsaturated drop factor)",
    )


def run_all(params: PhysicalParams) -> list[CheckResult]:
    return [
        classical_profiles(params),
        hamiltonian_conservation(params),
        coefficient_identity(params),
        airy_normalization(),
        z2_quadrature(),
        fd_unperturbed(params),
        oracle_perturbation(params),
        second_order_scaling(params),
    ]
