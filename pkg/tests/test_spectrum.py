from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbouncer.model import NEUTRON, derive_scales
from qbouncer.spectrum import (
    Z2_RATIO,
    energy_level,
    figure1_data,
    first_order_correction,
    spectrum,
    unperturbed_energy,
    z2_expectation,
)
from qbouncer.oracle import matrix_element


def test_caption_levels_in_micrometres(neutron):
    heights = [unperturbed_energy(n, neutron) / (neutron.m * neutron.g) for n in (1, 2)]
    assert heights[0] == pytest.approx(13.7e-6, abs=0.1e-6)
    assert heights[1] == pytest.approx(24.0e-6, abs=0.1e-6)


def test_z2_expectation_by_quadrature():
    for n in range(1, 11):
        assert matrix_element(n, n, lambda z: z * z) == pytest.approx(z2_expectation(n), rel=1e-9)
    assert Z2_RATIO == 8 / 15


def test_first_order_value(neutron):
    s = derive_scales(neutron)
    kappa = 2 * neutron.gamma * neutron.d / neutron.m
    c = -2 * neutron.gamma * neutron.g * (1 - np.exp(-kappa))
    assert first_order_correction(1, neutron) == pytest.approx(c * s.ell_g**2 * 8 / 15 * 2.338107410459767**2,
                                                               rel=1e-14)


def test_levels_consistent(neutron):
    lines = spectrum(neutron, 5)
    assert [ln.n for ln in lines] == [1, 2, 3, 4, 5]
    for ln in lines:
        assert ln.e == ln.e0 + ln.de1
        assert ln.validity == pytest.approx(abs(ln.de1) / ln.e0, rel=1e-15)
    assert np.all(np.diff([ln.validity for ln in lines]) > 0)


@given(st.floats(1e-30, 1e-20), st.integers(1, 50))
@settings(max_examples=60, deadline=None)
def test_correction_negative_for_positive_gamma(gamma, n):
    assert first_order_correction(n, replace(NEUTRON, gamma=gamma)) < 0


def test_frictionless_levels_exact():
    p = replace(NEUTRON, gamma=0.0)
    for ln in spectrum(p, 4):
        assert ln.de1 == 0.0 and ln.e == ln.e0 and ln.validity == 0.0


def test_figure1_rows(neutron):
    rows = figure1_data(neutron, 10)
    s = derive_scales(neutron)
    assert len(rows) == 10
    for r in rows:
        assert r.abs_de1 == pytest.approx(-first_order_correction(r.n, neutron), rel=1e-15)
        assert r.abs_de1_mgl == pytest.approx(r.abs_de1 / s.e_scale, rel=1e-15)
    assert set(rows[0].to_dict()) == {"n", "z_n", "e0", "abs_de1", "abs_de1_mgl", "e", "validity"}
    with pytest.raises(ValueError):
        figure1_data(neutron, 0)
    with pytest.raises(ValueError):
        figure1_data(neutron, 101)
