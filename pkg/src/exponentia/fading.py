"""Coherent Rayleigh doubly-block fading: exponents, rates and wideband asymptotes.

Each of the B independent blocks spans T_c seconds and W_c hertz, i.e.
D = W_c T_c complex symbols sharing one gain t = |H|^2 ~ Exp(1). The exponent
constraint z here is per second and not normalized by P.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import logsumexp

from .constellation import Constellation, SignalingScheme
from .errors import DomainError, UnsupportedInputError, ValidationError
from .gallager import moment_integrand
from .numerics import golden_section_max, grid_ratio, limit_and_slope
from .parallel import ordered_map
from .quadrature import (
    GaussQuadratureRule,
    expect_complex_gaussian,
    expect_unit_exponential,
    hermite_rule,
    laguerre_rule,
)

# Laguerre weights below this carry a provably negligible share of a [0, 1] integrand.
WEIGHT_FLOOR = 1e-30

CSV_HEADER = ("inv_wc", "wc", "rate_nats_per_s", "rho_opt")


@dataclass(frozen=True)
class FadingSpec:
    power_P: float
    t_c: float
    blocks_B: int
    w_c: float
    z_exponent: float = 0.0

    def __post_init__(self) -> None:
        if not (self.power_P > 0 and self.t_c > 0 and self.w_c > 0):
            raise DomainError("P, T_c and W_c must be positive")
        if int(self.blocks_B) != self.blocks_B or self.blocks_B < 1:
            raise DomainError("B must be a positive integer")
        if self.d < 1:
            raise DomainError(f"coherence dimension W_c T_c = {self.d!r} must be at least 1")

    @property
    def d(self) -> float:
        return self.w_c * self.t_c

    @property
    def p(self) -> float:
        return self.power_P / (self.blocks_B * self.w_c)

    @property
    def block_energy(self) -> float:
        return self.power_P * self.t_c / self.blocks_B

    @property
    def snr_block(self) -> float:
        """P T_c / B, the block SNR appearing in the closed forms."""
        return self.power_P * self.t_c / self.blocks_B

    def with_wc(self, w_c: float) -> "FadingSpec":
        return replace(self, w_c=w_c)


@dataclass(frozen=True)
class FadingAsymptotes:
    z_star: float
    r0: float
    rdot0: float
    rho_star: float
    r_crit: float
    c_infinity: float

    def to_dict(self) -> dict:
        return asdict(self)


def _checked(c: Constellation, spec: FadingSpec) -> Constellation:
    if not c.is_equal_energy():
        raise UnsupportedInputError("fading exponents need an equal-energy constellation")
    if abs(c.power - spec.p) > 1e-9 * spec.p:
        raise ValidationError(f"constellation power {c.power!r} differs from P/(B W_c) = {spec.p!r}")
    return c


def eo_nonfading_gains(
    c: Constellation, gains: np.ndarray, rho: float, rule: GaussQuadratureRule | None = None
) -> np.ndarray:
    """AWGN E_o at beta = 0 for ``c`` scaled in power by each gain."""
    gains = np.asarray(gains, dtype=float)
    if rho == 0:
        return np.zeros_like(gains)
    s = expect_complex_gaussian(moment_integrand(c, rho, 0.0, gains), rule or hermite_rule())
    return -np.log1p(s)


def _log_fading_moment(c, spec, rho, rule_h, rule_l) -> float:
    """ln E_t[exp(-D E_o^NF(p t, rho))]."""
    keep = rule_l.weights >= WEIGHT_FLOOR
    t, wl = rule_l.nodes[keep], rule_l.weights[keep]
    e = eo_nonfading_gains(c, t, rho, rule_h)
    return float(logsumexp(-spec.d * e, b=wl))


def eo_fading_iid(
    c: Constellation,
    spec: FadingSpec,
    rho: float,
    rule_h: GaussQuadratureRule | None = None,
    rule_l: GaussQuadratureRule | None = None,
) -> float:
    """Exponent per second, (B/T_c) (-ln E_t[exp(-D E_o^NF(p t, rho))])."""
    if rho < 0:
        raise DomainError("rho must be nonnegative")
    c = _checked(c, spec)
    if rho == 0:
        return 0.0
    lm = _log_fading_moment(c, spec, rho, rule_h or hermite_rule(), rule_l or laguerre_rule())
    return -spec.blocks_B / spec.t_c * lm


def eo_fading_limit(spec: FadingSpec, rho: float) -> float:
    """W_c -> infinity exponent (B/T_c) ln(1 + rho P T_c / (B (1 + rho)))."""
    return spec.blocks_B / spec.t_c * math.log1p(rho * spec.snr_block / (1.0 + rho))


def critical_exponent(spec: FadingSpec) -> float:
    """z* = (B/T_c) ln(1 + P T_c/(2B)) - P/(4 + 2 P T_c/B)."""
    return eo_fading_limit(spec, 1.0) - critical_rate_limit(spec)


def critical_rate_limit(spec: FadingSpec) -> float:
    return spec.power_P / (4.0 + 2.0 * spec.snr_block)


def _check_regime(spec: FadingSpec) -> None:
    z = spec.z_exponent
    if not z > 0:
        raise DomainError(f"exponent constraint z must be positive, got {z!r}")
    zs = critical_exponent(spec)
    if z >= zs:
        raise DomainError(f"z = {z!r} is not below z* = {zs!r}; the closed forms need z < z*")


def fading_rate(
    scheme: SignalingScheme,
    spec: FadingSpec,
    rule_h: GaussQuadratureRule | None = None,
    rule_l: GaussQuadratureRule | None = None,
) -> tuple[float, float]:
    """sup over rho in [z/P, 1] of (E_o(rho) - z) / rho."""
    _check_regime(spec)
    rule_h, rule_l = rule_h or hermite_rule(), rule_l or laguerre_rule()
    c = scheme.at(spec.p)
    z = spec.z_exponent
    rho, r = golden_section_max(
        lambda rho: (eo_fading_iid(c, spec, rho, rule_h, rule_l) - z) / rho, z / spec.power_P, 1.0
    )
    return max(float(r), 0.0), rho


def fading_asymptotes(spec: FadingSpec) -> FadingAsymptotes:
    """Closed-form W_c -> infinity quantities at the configured z."""
    P, snr, B = spec.power_P, spec.snr_block, spec.blocks_B
    z = spec.z_exponent
    if z > 0:
        lo = min(z / P, 1.0)
        rho, r0 = golden_section_max(lambda r: (eo_fading_limit(spec, r) - z) / r, lo, 1.0)
    else:
        rho, r0 = 0.0, P
    rdot0 = -(P**2) / (B * (1 + rho) * (1 + rho + rho * snr) ** 2)
    return FadingAsymptotes(critical_exponent(spec), float(r0), rdot0, rho, critical_rate_limit(spec), P)


def exponent_limit(spec: FadingSpec, rate: float) -> tuple[float, float]:
    """W_c -> infinity random-coding exponent at ``rate``: (E, rho_opt)."""
    if rate < 0:
        raise DomainError("rate must be nonnegative")
    rho, e = golden_section_max(lambda r: eo_fading_limit(spec, r) - r * rate, 0.0, 1.0)
    return max(float(e), 0.0), rho


def exponent_curve_limit(spec: FadingSpec, rates: Iterable[float]) -> list[tuple[float, float, float]]:
    return [(float(r), *exponent_limit(spec, r)) for r in rates]


def ergodic_capacity(spec: FadingSpec, order: int | GaussQuadratureRule = 96) -> float:
    """B W_c E[ln(1 + t P/(B W_c))] in nats per second."""
    n = spec.blocks_B * spec.w_c
    return n * expect_unit_exponential(lambda t: np.log1p(t * spec.power_P / n), order)


@dataclass(frozen=True)
class FadingSample:
    w_c: float
    rate: float
    rho_opt: float

    @property
    def inv_wc(self) -> float:
        return 1.0 / self.w_c


@dataclass(frozen=True)
class FadingCurve:
    scheme: str
    spec: FadingSpec
    samples: tuple[FadingSample, ...]
    r0_fit: float = float("nan")
    slope_fit: float = float("nan")

    def csv_rows(self) -> list[tuple[float, ...]]:
        return [(s.inv_wc, s.w_c, s.rate, s.rho_opt) for s in self.samples]


def fading_slope_fit(samples: Iterable) -> tuple[float, float]:
    """(R(0), dR/d(1/W_c) at 0) from (1/W_c, R) samples on a geometric grid."""
    pts = sorted(((float(a), float(b)) for a, b in samples), key=lambda t: -t[0])
    if len(pts) < 4:
        raise ValidationError(f"need at least 4 samples, got {len(pts)}")
    h = np.array([t[0] for t in pts])
    grid_ratio(h)
    return limit_and_slope(h, np.array([t[1] for t in pts]))


def fading_rate_curve(
    scheme: SignalingScheme,
    spec: FadingSpec,
    wc_grid: Sequence[float],
    rule_h: GaussQuadratureRule | None = None,
    rule_l: GaussQuadratureRule | None = None,
    threads: int | None = None,
) -> FadingCurve:
    """Rates over increasing W_c, with the Richardson fit when the grid allows."""
    wc = np.asarray(list(wc_grid), dtype=float)
    if wc.size == 0:
        raise ValidationError("W_c grid is empty")
    if np.any(np.diff(wc) <= 0):
        raise ValidationError("W_c grid must be strictly increasing")
    _check_regime(spec)
    rule_h, rule_l = rule_h or hermite_rule(), rule_l or laguerre_rule()

    def one(w: float) -> FadingSample:
        r, rho = fading_rate(scheme, spec.with_wc(float(w)), rule_h, rule_l)
        return FadingSample(float(w), r, rho)

    samples = tuple(ordered_map(one, wc, threads))
    r0 = slope = float("nan")
    if len(samples) >= 4:
        try:
            r0, slope = fading_slope_fit((s.inv_wc, s.rate) for s in samples)
        except ValidationError:
            pass
    return FadingCurve(scheme.name, spec, samples, r0, slope)


def fading_expectation(
    c: Constellation,
    spec: FadingSpec,
    rho: float,
    rule_h: GaussQuadratureRule | None = None,
    rule_l: GaussQuadratureRule | None = None,
) -> float:
    """E_t[exp(-D E_o^NF(p t, rho))] by Gauss-Laguerre quadrature."""
    c = _checked(c, spec)
    return math.exp(_log_fading_moment(c, spec, rho, rule_h or hermite_rule(), rule_l or laguerre_rule()))


def monte_carlo_fading_expectation(
    c: Constellation,
    spec: FadingSpec,
    rho: float,
    samples: int = 1_000_000,
    seed: int = 0,
    rule_h: GaussQuadratureRule | None = None,
    knots: int = 2049,
) -> tuple[float, float]:
    """Seeded Monte Carlo estimate of the fading expectation: (mean, standard error).

    E_o^NF is tabulated on a uniform gain grid and interpolated by a cubic
    spline, so each draw costs one spline evaluation.
    """
    c = _checked(c, spec)
    rng = np.random.default_rng(seed)
    t = rng.exponential(1.0, samples)
    grid = np.linspace(0.0, float(t.max()), knots)
    spline = CubicSpline(grid, eo_nonfading_gains(c, grid, rho, rule_h))
    g = np.exp(-spec.d * spline(t))
    return float(np.mean(g)), float(np.std(g, ddof=1) / math.sqrt(samples))
