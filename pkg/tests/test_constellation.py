import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from exponentia.constellation import (
    Constellation,
    PeakConstraint,
    SignalingScheme,
    check_peak,
    is_symmetric,
    make_custom,
    make_psk,
    pairwise_moment,
)
from exponentia.errors import DomainError, ValidationError

powers = st.floats(min_value=1e-4, max_value=1.0)
rhos = st.floats(min_value=0.0, max_value=1.0)


def test_bpsk_points():
    c = make_psk(2, 1.0)
    assert sorted(c.points.real) == [-1.0, 1.0]
    assert np.allclose(c.probs, 0.5)
    assert c.power == 1.0


def test_qpsk_modulus():
    c = make_psk(4, 0.5)
    assert np.allclose(np.abs(c.points), math.sqrt(0.5), atol=1e-15)
    assert c.power == 0.5


def test_qpsk_power_exact():
    c = make_psk(4, 2.0)
    assert abs(math.fsum(c.probs * np.abs(c.points) ** 2) - 2.0) < 1e-15


@pytest.mark.parametrize("p", [0.0, -1.0])
def test_psk_rejects_nonpositive_power(p):
    with pytest.raises(DomainError):
        make_psk(4, p)


def test_psk_rejects_other_orders():
    with pytest.raises(ValidationError):
        make_psk(8, 1.0)


def test_custom_on_off():
    c = make_custom([0, 2], [0.75, 0.25])
    assert c.power == pytest.approx(1.0, abs=1e-15)


def test_custom_singleton():
    c = make_custom([1], [1.0])
    assert c.power == 1.0 and c.size == 1


@pytest.mark.parametrize(
    "points,probs",
    [
        ([1, -1], [0.6, 0.6]),
        ([1, -1], [1.5, -0.5]),
        ([1, 1 + 1e-14], [0.5, 0.5]),
        ([], []),
        ([1, 2], [1.0]),
    ],
)
def test_custom_validation(points, probs):
    with pytest.raises(ValidationError):
        make_custom(points, probs)


def test_stated_power_must_match():
    with pytest.raises(ValidationError):
        Constellation(np.array([1, -1]), np.array([0.5, 0.5]), 2.0)


def test_arrays_are_read_only():
    c = make_psk(2, 1.0)
    with pytest.raises(ValueError):
        c.points[0] = 3


@pytest.mark.parametrize(
    "c,expected",
    [
        (make_psk(2, 1.0), True),
        (make_custom([0, 2], [0.75, 0.25]), False),
        (make_psk(4, 0.3), True),
        (make_custom([1, -1], [0.4, 0.6]), False),
    ],
)
def test_is_symmetric(c, expected):
    assert is_symmetric(c) is expected


@pytest.mark.parametrize(
    "scheme,k_m,alpha,p,expected",
    [
        ("qpsk", 2.0, 0.5, 0.25, True),
        ("bpsk", 1.0, 1.0, 0.25, False),
        ("bpsk", 1.0, 0.5, 0.37, True),
        ("bpsk", 1.0, 0.5, 1e-6, True),
    ],
)
def test_check_peak(scheme, k_m, alpha, p, expected):
    s = SignalingScheme(scheme, PeakConstraint(k_m, alpha))
    assert check_peak(s, p) is expected


def test_peak_constraint_validation():
    with pytest.raises(ValidationError):
        PeakConstraint(0.0, 0.25)
    with pytest.raises(ValidationError):
        PeakConstraint(1.0, -1.0)


def test_default_peak_parameters():
    assert PeakConstraint() == PeakConstraint(10.0, 0.25)


def test_pairwise_moment_bpsk_example():
    assert pairwise_moment(make_psk(2, 0.5), 1.0) == pytest.approx(math.cosh(0.25), abs=1e-14)


def test_pairwise_moment_qpsk_example():
    assert pairwise_moment(make_psk(4, 0.5), 1.0) == pytest.approx((math.cosh(0.25) + 1) / 2, abs=1e-14)


def test_pairwise_moment_vanishing_power():
    assert pairwise_moment(make_psk(4, 1e-12), 0.5) == pytest.approx(1.0, abs=1e-11)


def test_json_round_trip(tmp_path):
    c = make_custom([0, 2j, -1 + 1j], [0.5, 0.25, 0.25])
    path = tmp_path / "c.json"
    path.write_text(c.to_json())
    back = Constellation.load(path)
    assert np.array_equal(back.points, c.points)
    assert np.array_equal(back.probs, c.probs)
    assert back.power == c.power


def test_json_rejects_wrong_power():
    with pytest.raises(ValidationError):
        Constellation.from_dict({"points": [[1, 0], [-1, 0]], "probs": [0.5, 0.5], "power": 3.0})


def test_json_missing_field():
    with pytest.raises(ValidationError):
        Constellation.from_dict({"points": [[1, 0]]})


def test_custom_scheme_rescales_template():
    tmpl = make_custom([0, 2], [0.75, 0.25])
    s = SignalingScheme.custom(tmpl)
    c = s.at(0.01)
    assert c.power == pytest.approx(0.01, rel=1e-12)
    assert np.array_equal(c.probs, tmpl.probs)


def test_unknown_scheme_kind():
    with pytest.raises(ValidationError):
        SignalingScheme("ook")


@given(p=powers, kind=st.sampled_from(["bpsk", "qpsk"]))
def test_power_closure(p, kind):
    c = SignalingScheme(kind).at(p)
    assert abs(math.fsum(c.probs * np.abs(c.points) ** 2) - p) <= 1e-12


@given(p=powers)
def test_custom_power_closure(p):
    ring = np.exp(2j * np.pi * np.arange(8) / 8)
    c = SignalingScheme.custom(make_custom(ring, np.full(8, 0.125))).at(p)
    assert abs(c.power - p) <= 1e-12


@given(p=powers, kind=st.sampled_from(["bpsk", "qpsk"]))
def test_symmetry_closure(p, kind):
    assert is_symmetric(SignalingScheme(kind).at(p))


@given(p=powers, rho=rhos, kind=st.sampled_from(["bpsk", "qpsk"]))
def test_pairwise_moment_at_least_one_when_symmetric(p, rho, kind):
    assert pairwise_moment(SignalingScheme(kind).at(p), rho) >= 1.0 - 1e-15


@given(p=powers, rho=rhos)
def test_pairwise_moment_bpsk_cosh(p, rho):
    assert abs(pairwise_moment(make_psk(2, p), rho) - math.cosh(2 * p / (1 + rho) ** 2)) <= 1e-14
