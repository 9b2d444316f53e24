import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.linalg import eigvalsh_tridiagonal
from scipy.special import airy as sp_airy

from qbouncer import _kernels, oracle
from qbouncer.airy import airy_zero
from qbouncer.model import NEUTRON, derive_scales
from qbouncer.oracle import (
    GridSpec,
    PerturbationRegimeError,
    QuadratureError,
    TurnoverError,
    airy_basis_eigenvalues,
    airy_basis_matrix,
    fd_eigenvalues,
    gamma_scaling_exponent,
    linear_potential,
    matrix_element,
    truncated_effective_potential,
    turnover_point,
    verify_perturbation,
)
from qbouncer.spectrum import first_order_correction

WEAK = replace(NEUTRON, gamma=1e-24)


def _free(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def test_free_box_matches_discrete_laplacian(neutron):
    grid = GridSpec(1e-4, 500)
    report = fd_eigenvalues(_free, grid, 5, neutron)
    kin = neutron.hbar**2 / (2 * neutron.m * grid.h**2)
    k = np.arange(1, 6)
    exact = kin * (2 - 2 * np.cos(k * np.pi / (grid.N + 1)))
    assert np.allclose(report.eigenvalues, exact, rtol=1e-11)


def test_bisection_matches_lapack():
    rng = np.random.default_rng(7)
    diag = rng.normal(size=300)
    off = rng.normal(size=299)
    ref = eigvalsh_tridiagonal(diag, off)
    got = _kernels.tridiagonal_bisection(diag, off, 20)
    assert np.allclose(got, ref[:20], rtol=0, atol=1e-11)
    for sigma in (-3.0, 0.0, 0.37, 2.5):
        assert _kernels.sturm_count_at(diag, off, sigma) == int(np.count_nonzero(ref < sigma))


@given(st.floats(-4, 4))
@settings(max_examples=40, deadline=None)
def test_sturm_count_equals_inertia(sigma):
    rng = np.random.default_rng(11)
    diag = rng.normal(size=60)
    off = rng.normal(size=59)
    mat = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    assert _kernels.sturm_count_at(diag, off, sigma) == int(np.count_nonzero(np.linalg.eigvalsh(mat) < sigma))


def test_linear_potential_levels(neutron):
    s = derive_scales(neutron)
    report = fd_eigenvalues(linear_potential(neutron), GridSpec(12 * s.ell_g, 8000), 3, neutron, richardson=True)
    exact = s.e_scale * np.array([airy_zero(n) for n in (1, 2, 3)])
    assert np.max(np.abs(report.eigenvalues / exact - 1)) <= 1e-8
    assert report.meta["richardson"] and report.meta["N_fine"] == 16001
    assert np.all(report.residuals <= 1e-8 * report.meta["norm_T_fine"])


def test_second_order_convergence(neutron):
    s = derive_scales(neutron)
    exact = s.e_scale * airy_zero(1)
    coarse = fd_eigenvalues(linear_potential(neutron), GridSpec(12 * s.ell_g, 1000), 1, neutron)
    fine = fd_eigenvalues(linear_potential(neutron), GridSpec(12 * s.ell_g, 2001), 1, neutron)
    ratio = (coarse.eigenvalues[0] - exact) / (fine.eigenvalues[0] - exact)
    assert ratio == pytest.approx(4.0, rel=0.02)


def test_turnover_guard(neutron):
    x_star = turnover_point(neutron)
    s = derive_scales(neutron)
    assert x_star == pytest.approx(
        neutron.m / (4 * neutron.gamma * -math.expm1(-2 * neutron.gamma * neutron.d / neutron.m)), rel=1e-14)
    assert x_star / s.ell_g == pytest.approx(7.13, abs=0.01)
    with pytest.raises(TurnoverError):
        fd_eigenvalues(truncated_effective_potential(neutron), GridSpec(1.01 * x_star, 1000), 1, neutron,
                       perturbed=True)
    assert turnover_point(replace(neutron, gamma=0.0)) == math.inf


def test_grid_and_k_validation(neutron):
    with pytest.raises(ValueError):
        GridSpec(1e-5, 10)
    with pytest.raises(ValueError):
        GridSpec(0.0, 1000)
    with pytest.raises(ValueError):
        fd_eigenvalues(_free, GridSpec(1e-5, 1000), 21, neutron)
    assert GridSpec(1.0, 100).refined().h == pytest.approx(0.5 * GridSpec(1.0, 100).h, rel=1e-15)


def test_fd_and_basis_agree_on_truncated_potential():
    s = derive_scales(WEAK)
    fd = fd_eigenvalues(truncated_effective_potential(WEAK), GridSpec(12 * s.ell_g, 8000), 3, WEAK,
                        perturbed=True, richardson=True)
    basis = airy_basis_eigenvalues(WEAK, 40, 3)
    assert np.allclose(fd.eigenvalues, basis.eigenvalues, rtol=1e-8)


def test_matrix_elements_against_scipy():
    def psi(n, z):
        zn = airy_zero(n)
        return sp_airy(z - zn)[0] / abs(sp_airy(-zn)[1])

    for i, j, w in ((1, 1, lambda z: z), (2, 5, lambda z: z * z), (3, 3, lambda z: z**3)):
        top = max(airy_zero(i), airy_zero(j)) + 12
        ref, _ = quad(lambda z: psi(i, z) * w(z) * psi(j, z), 0, top, epsabs=1e-13, limit=200)
        assert matrix_element(i, j, w) == pytest.approx(ref, abs=1e-9)


def test_first_moment_virial():
    # <n|z|n> = (2/3) z_n for the hard-wall linear potential
    for n in (1, 4, 9):
        assert matrix_element(n, n, lambda z: z) == pytest.approx(2 / 3 * airy_zero(n), rel=1e-9)


def test_matrix_element_depth_limit():
    with pytest.raises(QuadratureError):
        matrix_element(8, 8, lambda z: z * z, max_depth=1)


def test_basis_matrix_symmetric_and_asymmetry_detected(monkeypatch):
    h, lam = airy_basis_matrix(WEAK, 40)
    assert np.array_equal(h, h.T)
    assert lam < 0
    z, overlap, z2 = oracle._basis(40)
    bad = z2.copy()
    bad[0, 1] += 1e-3
    monkeypatch.setattr(oracle, "_basis", lambda m: (z, overlap, bad))
    with pytest.raises(QuadratureError):
        airy_basis_matrix(WEAK, 40)


def test_basis_orthonormal():
    _, overlap, _ = oracle._basis(40)
    assert np.max(np.abs(overlap - np.eye(40))) <= 1e-12


def test_basis_convergence(neutron):
    # at full strength only the ground level is a bound state of the truncated potential;
    # higher levels sit near the barrier top and mix with diving basis states
    small = airy_basis_eigenvalues(neutron, 40, 1)
    large = airy_basis_eigenvalues(neutron, 60, 1)
    assert abs(small.eigenvalues[0] / large.eigenvalues[0] - 1) <= 1e-6
    assert small.meta["states_below_ground"] > 0
    assert small.meta["overlaps"][0] > 0.95
    weak_small = airy_basis_eigenvalues(WEAK, 40, 3)
    weak_large = airy_basis_eigenvalues(WEAK, 60, 3)
    assert np.max(np.abs(weak_small.eigenvalues / weak_large.eigenvalues - 1)) <= 1e-6


def test_basis_residuals_small(neutron):
    report = airy_basis_eigenvalues(neutron, 40, 3)
    assert np.all(report.residuals <= 1e-12 * report.eigenvalues)
    with pytest.raises(ValueError):
        airy_basis_eigenvalues(neutron, 10, 1)


def test_frictionless_basis_is_diagonal():
    p = replace(NEUTRON, gamma=0.0)
    report = airy_basis_eigenvalues(p, 40, 4)
    s = derive_scales(p)
    assert np.allclose(report.eigenvalues, s.e_scale * np.array([airy_zero(n) for n in range(1, 5)]), rtol=1e-15)
    check = verify_perturbation(p, 1)
    assert check.de_formula == 0.0 and check.relative_mismatch == 0.0


def test_weak_drag_first_order():
    check = verify_perturbation(WEAK, 1)
    assert check.relative_mismatch <= 0.03
    assert check.relative_mismatch == pytest.approx(0.008992, abs=2e-5)
    assert check.de_oracle < 0 and check.de_formula < 0
    # halving gamma cuts the mismatch by about four
    ratio = check.abs_mismatch / check.abs_mismatch_half_gamma
    assert 4 / 1.5 <= ratio <= 4 * 1.5
    assert check.coupling_exponent == pytest.approx(2.0, abs=0.05)


def test_full_strength_pin(neutron):
    strong = verify_perturbation(neutron, 1)
    weak = verify_perturbation(WEAK, 1)
    assert strong.relative_mismatch <= 0.2
    assert strong.relative_mismatch == pytest.approx(0.11971, abs=1e-3)
    assert strong.relative_mismatch / weak.relative_mismatch == pytest.approx(13.3, abs=0.2)


def test_regime_guard(neutron):
    with pytest.raises(PerturbationRegimeError):
        verify_perturbation(neutron, 6)


def test_scaling_exponent_against_coupling(neutron):
    p = gamma_scaling_exponent(neutron, (5e-25, 1e-24, 2e-24), against="coupling")
    assert p == pytest.approx(2.02, abs=0.02)


def test_oracle_shift_matches_formula_at_tiny_gamma():
    p = replace(NEUTRON, gamma=1e-27)
    check = verify_perturbation(p, 2)
    assert check.de_oracle == pytest.approx(first_order_correction(2, p), rel=1e-4)
