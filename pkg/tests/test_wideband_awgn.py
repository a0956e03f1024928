import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exponentia.constellation import SignalingScheme, make_custom, make_psk
from exponentia.errors import DomainError, ValidationError
from exponentia.gallager import mutual_information
from exponentia.wideband_awgn import (
    ChannelParams,
    WidebandCurve,
    WidebandSample,
    awgn_asymptotes,
    first_order_optimality_check,
    fit_limit_and_slope,
    geometric_grid,
    rate_curve,
    rate_per_symbol,
    rate_per_symbol_bisection,
    spectral_efficiency_curve,
)

GRID = geometric_grid(2.0**-6, 2.0**-14)


@pytest.fixture(scope="module")
def qpsk_curve():
    return rate_curve(SignalingScheme.qpsk(), 1.0, 0.1, GRID)


@pytest.fixture(scope="module")
def bpsk_curve():
    return rate_curve(SignalingScheme.bpsk(), 1.0, 0.1, GRID)


def test_channel_params():
    cp = ChannelParams(2.0, 8.0, 0.1)
    assert cp.b == 0.125 and cp.p == 0.25


@pytest.mark.parametrize("args", [(0.0, 8.0, 0.1), (1.0, 0.5, 0.1), (1.0, 8.0, 0.25), (1.0, 8.0, 0.0)])
def test_channel_params_validation(args):
    with pytest.raises(DomainError):
        ChannelParams(*args)


def test_asymptotes_reference():
    a = awgn_asymptotes(1.0, 0.1)
    s = math.sqrt(0.1)
    assert a.r0 == pytest.approx((1 - s) ** 2, abs=1e-15)
    assert a.rdot0 == pytest.approx(-((1 - s) ** 3) / 2, abs=1e-15)
    assert a.rho_star == pytest.approx(s / (1 - s), abs=1e-15)
    assert a.r0 == pytest.approx(0.4675445, abs=1e-7)
    # Reference digits for the slope and rho* differ from the closed forms in the 5th significant figure.
    assert a.rdot0 == pytest.approx(-0.1598381, abs=2e-5)
    assert a.rho_star == pytest.approx(0.4624612, abs=2e-5)


def test_asymptotes_homogeneity():
    a1, a2 = awgn_asymptotes(1.0, 0.1), awgn_asymptotes(2.0, 0.1)
    assert a2.r0 == pytest.approx(2 * a1.r0, rel=1e-15)
    assert a2.rdot0 == pytest.approx(4 * a1.rdot0, rel=1e-15)
    assert a2.rho_star == a1.rho_star


def test_asymptotes_quarter_boundary():
    a = awgn_asymptotes(3.0, 0.25 - 1e-12)
    assert a.r0 == pytest.approx(0.75, abs=1e-5)


@given(z=st.floats(1e-6, 0.2499))
def test_asymptote_invariants(z):
    a = awgn_asymptotes(1.0, z)
    assert a.r0 > 0 and a.rdot0 < 0 and 0 < a.rho_star < 1


@pytest.mark.parametrize("z", [0.0, 0.25, 0.3, -0.1])
def test_asymptotes_domain(z):
    with pytest.raises(DomainError):
        awgn_asymptotes(1.0, z)


def test_rate_per_symbol_small_power():
    p = 0.01
    r, rho = rate_per_symbol(make_psk(4, p), 0.1)
    assert 0.40 <= r / p <= 0.4676
    r2, _ = rate_per_symbol(make_psk(4, p / 16), 0.1)
    assert abs(r2 / (p / 16) - 0.467544) < abs(r / p - 0.467544)


def test_rate_per_symbol_tiny_z_recovers_mutual_information():
    c = make_psk(4, 0.05)
    r, _ = rate_per_symbol(c, 1e-6)
    assert r == pytest.approx(mutual_information(c), rel=0.01)


def test_rate_per_symbol_zero_clamp_is_reported_not_raised():
    r, rho = rate_per_symbol(make_custom([0.0, 1e-3], [0.999999, 0.000001]), 0.2)
    assert r >= 0.0


@settings(max_examples=6)
@given(logp=st.floats(-3.0, 0.0), z=st.floats(0.01, 0.24))
def test_sup_form_matches_bisection(logp, z):
    c = make_psk(4, 10**logp)
    assert abs(rate_per_symbol(c, z)[0] - rate_per_symbol_bisection(c, z)) <= 1e-9


def test_rate_curve_limit_and_monotone(qpsk_curve):
    rates = [s.rate for s in qpsk_curve.samples]
    assert np.all(np.diff(rates) >= 0)
    assert abs(qpsk_curve.r0_extrapolated - 0.467544) < 1e-3


@pytest.mark.parametrize("name", ["qpsk_curve", "bpsk_curve"])
def test_rate_below_limit(name, request):
    curve = request.getfixturevalue(name)
    r0 = awgn_asymptotes(1.0, 0.1).r0
    assert all(s.rate <= r0 for s in curve.samples)


@pytest.mark.parametrize("name", ["qpsk_curve", "bpsk_curve"])
def test_rho_converges_and_stays_interior(name, request):
    curve = request.getfixturevalue(name)
    assert abs(curve.samples[-1].rho_opt - awgn_asymptotes(1.0, 0.1).rho_star) < 1e-2
    assert all(s.rho_opt < 1 - 1e-4 for s in curve.samples)


def test_bpsk_same_limit_steeper(qpsk_curve, bpsk_curve):
    assert bpsk_curve.r0_extrapolated == pytest.approx(qpsk_curve.r0_extrapolated, abs=1e-6)
    assert all(b.rate < q.rate for b, q in zip(bpsk_curve.samples, qpsk_curve.samples))
    assert bpsk_curve.slope_extrapolated / qpsk_curve.slope_extrapolated == pytest.approx(2.0, abs=0.05)


def test_bpsk_is_qpsk_at_double_bandwidth(bpsk_curve, qpsk_curve):
    # BPSK at power p is two uses of a real channel; it matches QPSK at power 2p.
    for s in bpsk_curve.samples[1:]:
        r_q, _ = rate_per_symbol(make_psk(4, 2 * s.b), 0.1)
        assert s.rate == pytest.approx(r_q / (2 * s.b), rel=1e-9)


def test_single_sample_scaling():
    curve = rate_curve(SignalingScheme.qpsk(), 1.0, 0.1, [1 / 64])
    r, _ = rate_per_symbol(make_psk(4, 1 / 64), 0.1)
    assert curve.samples[0].rate == pytest.approx(64 * r, rel=1e-15)
    assert math.isnan(curve.r0_extrapolated)


@pytest.mark.parametrize("grid", [[], [0.5, 0.5], [0.25, 0.5], [2.0], [-0.1]])
def test_rate_curve_grid_validation(grid):
    with pytest.raises(ValidationError):
        rate_curve(SignalingScheme.qpsk(), 1.0, 0.1, grid)


def test_fit_exact_model():
    b = [1 / 64, 1 / 128, 1 / 256, 1 / 512, 1 / 1024]
    samples = [(v, 0.5 - 0.2 * v + 3.0 * v**2) for v in b]
    r0, slope = fit_limit_and_slope(samples)
    assert abs(r0 - 0.5) < 1e-9 and abs(slope + 0.2) < 1e-9


def test_fit_accepts_unsorted_and_sample_objects():
    b = [1 / 128, 1 / 64, 1 / 512, 1 / 256]
    r0, slope = fit_limit_and_slope([WidebandSample(v, 1.0 + v, 0.5) for v in b])
    assert r0 == pytest.approx(1.0, abs=1e-12) and slope == pytest.approx(1.0, abs=1e-9)


def test_fit_requires_geometric_grid():
    with pytest.raises(ValidationError):
        fit_limit_and_slope([(0.1, 1), (0.05, 1), (0.02, 1), (0.01, 1)])
    with pytest.raises(ValidationError):
        fit_limit_and_slope([(0.1, 1), (0.05, 1), (0.025, 1)])


def test_fit_on_qpsk_and_bpsk_data(qpsk_curve, bpsk_curve):
    r0, slope = fit_limit_and_slope(qpsk_curve.samples)
    assert r0 == pytest.approx(0.4675, abs=1e-3)
    assert slope == pytest.approx(-0.160, rel=0.05)
    assert bpsk_curve.slope_extrapolated == pytest.approx(-0.3197, rel=0.05)


def test_spectral_efficiency_endpoint(qpsk_curve):
    se = spectral_efficiency_curve(SignalingScheme.qpsk(), 0.1, GRID, curve=qpsk_curve)
    assert se.ebn0_min_db == pytest.approx(10 * math.log10(math.log(2) / (1 - math.sqrt(0.1)) ** 2), abs=1e-6)
    assert se.ebn0_min_db == pytest.approx(1.710, abs=0.02)
    assert se.gap_db == pytest.approx(3.30, abs=0.05)
    ebn0 = [pt[0] for pt in se.points]
    assert all(v >= se.ebn0_min_db for v in ebn0)
    assert np.all(np.diff(ebn0) < 0)
    for (e, s_eff, bw), smp in zip(se.points, qpsk_curve.samples):
        assert s_eff == pytest.approx(smp.rate / math.log(2) / bw, rel=1e-15)


def test_spectral_efficiency_endpoint_moves_with_z():
    grid = GRID[:4]
    low = spectral_efficiency_curve(SignalingScheme.qpsk(), 1e-6, grid)
    mid = spectral_efficiency_curve(SignalingScheme.qpsk(), 0.1, grid)
    high = spectral_efficiency_curve(SignalingScheme.qpsk(), 0.24, grid)
    assert low.ebn0_min_db == pytest.approx(10 * math.log10(math.log(2)), abs=0.01)
    assert low.ebn0_min_db < mid.ebn0_min_db < high.ebn0_min_db


def test_spectral_efficiency_skips_zero_rates():
    curve = WidebandCurve("qpsk", 1.0, 0.1, (WidebandSample(0.5, 0.0, 1.0), WidebandSample(0.25, 0.4, 0.5)))
    with pytest.warns(RuntimeWarning):
        se = spectral_efficiency_curve(SignalingScheme.qpsk(), 0.1, [], curve=curve)
    assert se.skipped == 1 and len(se.points) == 1


P_GRID = [1e-3 / 2**k for k in range(5)]


@pytest.mark.parametrize("kind", ["qpsk", "bpsk"])
def test_first_order_optimality_symmetric(kind):
    rep = first_order_optimality_check(SignalingScheme(kind), 0.1, P_GRID)
    assert rep.passed and rep.symmetric
    assert rep.target == pytest.approx(0.31623, abs=1e-5)


def test_first_order_report_on_off():
    scheme = SignalingScheme.custom(make_custom([0.0, 2.0], [0.75, 0.25]))
    rep = first_order_optimality_check(scheme, 0.1, P_GRID)
    assert not rep.symmetric
    assert math.isfinite(rep.limit_estimate)


def test_first_order_grid_validation():
    with pytest.raises(ValidationError):
        first_order_optimality_check(SignalingScheme.qpsk(), 0.1, [0.1, 0.05])
