import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from exponentia.errors import ValidationError
from exponentia.numerics import (
    central_derivative,
    golden_section_max,
    grid_ratio,
    limit_and_slope,
    richardson_limit,
)


@given(peak=st.floats(0.0, 1.0), curv=st.floats(0.1, 10.0))
def test_golden_finds_quadratic_peak(peak, curv):
    x, fx = golden_section_max(lambda t: -curv * (t - peak) ** 2, 0.0, 1.0)
    assert abs(x - peak) < 1e-6
    assert fx <= 0.0 and fx > -1e-11


def test_golden_endpoint_maximum():
    x, fx = golden_section_max(lambda t: t, 0.0, 2.0)
    assert x == pytest.approx(2.0, abs=1e-9)
    x, fx = golden_section_max(lambda t: -t, 0.5, 2.0)
    assert x == 0.5 and fx == -0.5


def test_golden_degenerate_interval():
    assert golden_section_max(math.sin, 1.0, 1.0) == (1.0, math.sin(1.0))
    with pytest.raises(ValidationError):
        golden_section_max(math.sin, 1.0, 0.0)


def test_golden_uses_seed_grid_on_multimodal():
    f = lambda t: math.exp(-((t - 0.9) ** 2) / 1e-3) + 0.5 * math.exp(-((t - 0.1) ** 2) / 1e-3)
    x, _ = golden_section_max(f, 0.0, 1.0)
    assert x == pytest.approx(0.9, abs=1e-6)


def test_grid_ratio():
    assert grid_ratio([1.0, 0.5, 0.25]) == 2.0
    with pytest.raises(ValidationError):
        grid_ratio([1.0, 0.5, 0.2])
    with pytest.raises(ValidationError):
        grid_ratio([0.25, 0.5, 1.0])


@given(a=st.floats(-5, 5), c=st.floats(-5, 5), d=st.floats(-5, 5), e=st.floats(-5, 5))
def test_richardson_exact_on_cubics(a, c, d, e):
    h = 2.0 ** -np.arange(6, 11)
    v = a + c * h + d * h**2 + e * h**3
    assert abs(richardson_limit(h, v) - a) < 1e-12


def test_limit_and_slope_exact_model():
    h = np.array([1 / 64, 1 / 128, 1 / 256, 1 / 512, 1 / 1024])
    a, c, d = 0.4675, -0.16, 0.37
    f0, slope = limit_and_slope(h, a + c * h + d * h**2)
    assert abs(f0 - a) < 1e-9 and abs(slope - c) < 1e-9


def test_limit_and_slope_ratio_three():
    h = 3.0 ** -np.arange(2, 7)
    f0, slope = limit_and_slope(h, 1.0 - 2.0 * h + 5 * h**2 - h**3)
    assert f0 == pytest.approx(1.0, abs=1e-11) and slope == pytest.approx(-2.0, abs=1e-8)


def test_limit_and_slope_needs_four_samples():
    with pytest.raises(ValidationError):
        limit_and_slope([0.5, 0.25, 0.125], [1, 1, 1])


def test_central_derivative():
    assert central_derivative(math.exp, 1.0) == pytest.approx(math.e, rel=1e-10)
    assert central_derivative(lambda t: t**3, 2.0) == pytest.approx(12.0, rel=1e-10)
