import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qbouncer.airy import (
    AiryRangeError,
    airy_eval,
    airy_zero,
    airy_zeros,
    bouncer_mode,
    eigenfunction,
    zero_seed,
)

mpmath.mp.dps = 30


def _mp_airy(t):
    return float(mpmath.airyai(t)), float(mpmath.airyai(t, derivative=1))


def test_values_at_origin_from_gamma_function():
    ai0 = 1.0 / (3 ** (2 / 3) * math.gamma(2 / 3))
    aip0 = -1.0 / (3 ** (1 / 3) * math.gamma(1 / 3))
    v = airy_eval(0.0)
    assert v.ai == pytest.approx(ai0, rel=1e-15)
    assert v.ai_prime == pytest.approx(aip0, rel=1e-15)


def test_against_mpmath_on_grid():
    t = np.linspace(-20.0, 20.0, 401)
    v = airy_eval(t)
    ref = np.array([_mp_airy(x) for x in t])
    assert np.max(np.abs(v.ai - ref[:, 0])) < 1e-12
    assert np.max(np.abs(v.ai_prime - ref[:, 1])) < 1e-12


@pytest.mark.parametrize("t", [-399.0, -250.5, -100.0, -12.01, 8.01, 30.0, 150.0])
def test_far_field_relative_accuracy(t):
    a, b = _mp_airy(t)
    v = airy_eval(t)
    scale_a = max(abs(a), float(mpmath.sqrt(a * a + (b / max(1.0, abs(t)) ** 0.5) ** 2)))
    assert abs(v.ai - a) <= 1e-10 * scale_a + 1e-300
    assert v.ai_prime == pytest.approx(b, rel=1e-9, abs=1e-9 * abs(b) + 1e-300)


@given(st.floats(-40.0, 40.0))
@settings(max_examples=60, deadline=None)
def test_airy_equation_residual(t):
    # five-point second derivative of Ai against t Ai(t)
    h = 1e-2
    pts = t + h * np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    y = airy_eval(pts).ai
    d2 = (-y[0] + 16 * y[1] - 30 * y[2] + 16 * y[3] - y[4]) / (12 * h * h)
    scale = max(1.0, abs(t)) * (abs(y[2]) + abs(airy_eval(t).ai_prime) + 1e-300)
    assert abs(d2 - t * y[2]) <= 1e-6 * scale


@given(st.floats(0.0, 200.0))
@settings(max_examples=50, deadline=None)
def test_positive_on_positive_axis(t):
    v = airy_eval(t)
    assert v.ai >= 0.0 and v.ai_prime <= 0.0


def test_scalar_and_shape_preserved():
    assert isinstance(airy_eval(1.0).ai, float)
    out = airy_eval(np.zeros((3, 2)))
    assert out.ai.shape == (3, 2)


@pytest.mark.parametrize("t", [-400.1, 200.1, math.nan, math.inf])
def test_out_of_range(t):
    with pytest.raises(AiryRangeError):
        airy_eval(t)


@pytest.mark.parametrize("n", [1, 2, 3, 10, 50, 64, 65, 200, 1000])
def test_zeros_against_mpmath(n):
    assert airy_zero(n) == pytest.approx(-float(mpmath.airyaizero(n)), rel=2e-15)


def test_first_two_zeros():
    assert airy_zero(1) == pytest.approx(2.338107410459767, rel=1e-15)
    assert airy_zero(2) == pytest.approx(4.087949444130970, rel=1e-15)


def test_zeros_are_sign_changes_and_ordered():
    z = airy_zeros(30)
    assert np.all(np.diff(z) > 0)
    grid = np.linspace(-(z[-1] + 0.5 * (z[-1] - z[-2])), 0.0, 20001)
    values = airy_eval(grid).ai
    assert np.count_nonzero(np.sign(values[1:]) != np.sign(values[:-1])) == 30


def test_seed_is_close():
    for n in (1, 5, 100):
        assert abs(zero_seed(n) / airy_zero(n) - 1.0) < 1e-2


@pytest.mark.parametrize("n", [0, 1001, 2.5, -3])
def test_zero_index_rejected(n):
    with pytest.raises(AiryRangeError):
        airy_zero(n)


def test_bouncer_mode_and_wall():
    mode = bouncer_mode(3)
    assert mode.norm == pytest.approx(abs(float(mpmath.airyai(-mode.z_n, derivative=1))), rel=1e-13)
    assert abs(eigenfunction(mode, 0.0)) < 1e-14
    # decays into the classically forbidden region without overflow
    far = eigenfunction(mode, np.array([50.0, 500.0]))
    assert np.all(np.isfinite(far)) and far[1] == 0.0
