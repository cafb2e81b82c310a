import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from isoprofile.special import (
    DomainError,
    ball_volume,
    euclidean_constant,
    sin_power_integral,
    sin_power_ratio,
    sphere_volume,
)


@pytest.mark.parametrize("n, expected", [
    (2, 2 * math.sqrt(math.pi)),
    (3, 4 * math.pi / (4 * math.pi / 3) ** (2 / 3)),
    (4, 2 * math.pi**2 / (math.pi**2 / 2) ** 0.75),
    (5, (8 * math.pi**2 / 3) / (8 * math.pi**2 / 15) ** 0.8),
])
def test_euclidean_constant_closed_forms(n, expected):
    assert euclidean_constant(n) == pytest.approx(expected, rel=1e-14)


def test_euclidean_constant_rounded_values():
    assert euclidean_constant(2) == pytest.approx(3.5449, abs=5e-5)
    assert euclidean_constant(3) == pytest.approx(4.8360, abs=5e-5)
    assert euclidean_constant(4) == pytest.approx(5.9616, abs=5e-4)
    assert euclidean_constant(5) == pytest.approx(6.9699, abs=5e-4)


def test_euclidean_constant_rejects_small_dims():
    with pytest.raises(DomainError):
        euclidean_constant(1)


@pytest.mark.parametrize("m, expected", [
    (1, 2 * math.pi), (2, 4 * math.pi), (3, 2 * math.pi**2), (4, 8 * math.pi**2 / 3), (5, math.pi**3),
])
def test_sphere_volume(m, expected):
    assert sphere_volume(m) == pytest.approx(expected, rel=1e-14)


def test_ball_volume_relates_to_sphere():
    for n in range(2, 8):
        assert ball_volume(n) == pytest.approx(sphere_volume(n - 1) / n, rel=1e-14)


y_grid = np.linspace(0.0, math.pi, 41)


def test_sin_integral_k1_closed_form():
    np.testing.assert_allclose(sin_power_integral(1, y_grid), 1 - np.cos(y_grid), rtol=1e-10, atol=1e-14)


def test_sin_integral_k2_closed_form():
    expected = (y_grid - np.sin(y_grid) * np.cos(y_grid)) / 2
    np.testing.assert_allclose(sin_power_integral(2, y_grid), expected, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("k", [3, 4, 6])
def test_sin_integral_against_adaptive_quadrature(k):
    for y in (0.3, 1.2, math.pi / 2, 2.5, 3.1):
        ref, _ = quad(lambda s: math.sin(s) ** k, 0, y, epsabs=0, epsrel=1e-13)
        assert float(sin_power_integral(k, y)) == pytest.approx(ref, rel=1e-11)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 6), st.floats(1e-6, math.pi - 1e-3))
def test_sin_ratio_matches_quotient(k, y):
    direct = float(sin_power_integral(k, y)) / math.sin(y) ** k
    assert float(sin_power_ratio(k, y)) == pytest.approx(direct, rel=1e-9)


def test_sin_ratio_small_argument_series():
    for k in (1, 2, 3):
        y = 1e-6
        assert float(sin_power_ratio(k, y)) == pytest.approx(y / (k + 1), rel=1e-9)
