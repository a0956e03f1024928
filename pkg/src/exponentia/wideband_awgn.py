"""Exponent-constrained rates for the wideband AWGN channel and their b -> 0 asymptotes.

Conventions: b = 1/B, per-symbol power p = P b, exponent constraint E >= P z
per second, i.e. E >= p z per symbol.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .constellation import Constellation, SignalingScheme, is_symmetric
from .errors import DomainError, ValidationError
from .gallager import _rho_search, eo, mutual_information
from .numerics import golden_section_max, grid_ratio, limit_and_slope, richardson_limit
from .parallel import ordered_map
from .quadrature import GaussQuadratureRule, hermite_rule

LN2 = math.log(2.0)


def _check_z(z: float) -> None:
    if not 0.0 < z < 0.25:
        raise DomainError(f"normalized exponent z must lie in (0, 1/4), got {z!r}")


@dataclass(frozen=True)
class ChannelParams:
    power_p_total: float
    bandwidth_b: float
    z_normalized: float

    def __post_init__(self) -> None:
        if not self.power_p_total > 0:
            raise DomainError("P must be positive")
        if not self.bandwidth_b >= 1:
            raise DomainError("B must be at least 1")
        _check_z(self.z_normalized)

    @property
    def b(self) -> float:
        return 1.0 / self.bandwidth_b

    @property
    def p(self) -> float:
        return self.power_p_total / self.bandwidth_b


@dataclass(frozen=True)
class WidebandSample:
    b: float
    rate: float
    rho_opt: float

    @property
    def bandwidth(self) -> float:
        return 1.0 / self.b


@dataclass(frozen=True)
class WidebandCurve:
    scheme: str
    power: float
    z: float
    samples: tuple[WidebandSample, ...]
    r0_extrapolated: float = float("nan")
    slope_extrapolated: float = float("nan")

    def csv_rows(self) -> list[tuple[float, ...]]:
        return [(s.b, 1.0 / s.b, 1.0 / s.b, s.rate, s.rho_opt) for s in self.samples]


CSV_HEADER = ("b", "inv_b", "B", "rate_nats_per_s", "rho_opt")
SE_CSV_HEADER = ("ebn0_db", "se_bits_s_hz", "B")


@dataclass(frozen=True)
class Asymptotes:
    r0: float
    rdot0: float
    rho_star: float


def awgn_asymptotes(P: float, z: float) -> Asymptotes:
    """Closed-form R(0), dR/db at 0, and the limiting optimizer."""
    if not P > 0:
        raise DomainError("P must be positive")
    _check_z(z)
    s = math.sqrt(z)
    return Asymptotes(P * (1 - s) ** 2, -(P**2) * (1 - s) ** 3 / 2, s / (1 - s))


def rate_per_symbol(
    c: Constellation, z: float, rule: GaussQuadratureRule | None = None
) -> tuple[float, float]:
    """sup over rho of (E_o(rho) - p z) / rho, clamped at 0.

    Since E_o(rho) < p rho, the ratio is negative for rho <= z, so the search
    runs over [z, 1].
    """
    _check_z(z)
    rule = rule or hermite_rule()
    pz = c.power * z
    rho, r = golden_section_max(lambda rho: (eo(c, rho, rule).value - pz) / rho, z, 1.0)
    return max(float(r), 0.0), rho


def rate_per_symbol_bisection(
    c: Constellation, z: float, rule: GaussQuadratureRule | None = None, tol: float = 1e-13
) -> float:
    """Largest r with E_r(r) >= p z, found by bisection on the random-coding exponent."""
    _check_z(z)
    rule = rule or hermite_rule()
    pz = c.power * z
    if eo(c, 1.0, rule).value <= pz:
        return 0.0
    lo, hi = 0.0, mutual_information(c, rule)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _rho_search(c, mid, 0.0, 1.0, rule)[1] >= pz:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_b_grid(b_grid: Sequence[float]) -> np.ndarray:
    b = np.asarray(list(b_grid), dtype=float)
    if b.size == 0:
        raise ValidationError("b grid is empty")
    if np.any(~np.isfinite(b)) or np.any(b <= 0) or np.any(b > 1):
        raise ValidationError("b grid values must lie in (0, 1]")
    if np.any(np.diff(b) >= 0):
        raise ValidationError("b grid must be strictly decreasing")
    return b


def geometric_grid(start: float, stop: float, ratio: float = 2.0) -> list[float]:
    """Decreasing grid start, start/ratio, ... down to stop (inclusive within 1e-9)."""
    if not (start > 0 and stop > 0 and ratio > 1 and stop <= start):
        raise ValidationError("geometric grid needs 0 < stop <= start and ratio > 1")
    n = int(math.floor(math.log(start / stop) / math.log(ratio) + 1e-9))
    return [start / ratio**k for k in range(n + 1)]


def fit_limit_and_slope(samples: Iterable) -> tuple[float, float]:
    """Richardson estimates of (R(0), dR/db(0)) from (b, R) samples on a geometric grid."""
    pts = [(s.b, s.rate) if isinstance(s, WidebandSample) else (float(s[0]), float(s[1])) for s in samples]
    if len(pts) < 4:
        raise ValidationError(f"need at least 4 samples, got {len(pts)}")
    pts.sort(key=lambda t: -t[0])
    b = np.array([t[0] for t in pts])
    grid_ratio(b)
    return limit_and_slope(b, np.array([t[1] for t in pts]))


def rate_curve(
    scheme: SignalingScheme,
    P: float,
    z: float,
    b_grid: Sequence[float],
    rule: GaussQuadratureRule | None = None,
    threads: int | None = None,
) -> WidebandCurve:
    """R(b) = r(P b) / b on the grid, with extrapolated limit and slope when possible."""
    _check_z(z)
    if not P > 0:
        raise DomainError("P must be positive")
    b = _check_b_grid(b_grid)
    rule = rule or hermite_rule()

    def one(bv: float) -> WidebandSample:
        r, rho = rate_per_symbol(scheme.at(P * bv), z, rule)
        return WidebandSample(float(bv), r / bv, rho)

    samples = tuple(ordered_map(one, b, threads))
    r0 = slope = float("nan")
    if len(samples) >= 4:
        try:
            r0, slope = fit_limit_and_slope(samples)
        except ValidationError:
            pass
    return WidebandCurve(scheme.name, P, z, samples, r0, slope)


@dataclass(frozen=True)
class SpectralEfficiencyCurve:
    points: tuple[tuple[float, float, float], ...]
    skipped: int
    ebn0_min_db: float
    reference_ebn0_db: float = 10.0 * math.log10(LN2)

    @property
    def gap_db(self) -> float:
        return self.ebn0_min_db - self.reference_ebn0_db


def spectral_efficiency_curve(
    scheme: SignalingScheme,
    z: float,
    b_grid: Sequence[float],
    P: float = 1.0,
    rule: GaussQuadratureRule | None = None,
    threads: int | None = None,
    curve: WidebandCurve | None = None,
) -> SpectralEfficiencyCurve:
    """(Eb/N0 in dB, bits/s/Hz, B) per sample; the B -> infinity endpoint uses the fitted R(0)."""
    curve = curve or rate_curve(scheme, P, z, b_grid, rule, threads)
    pts, skipped = [], 0
    for s in curve.samples:
        if not s.rate > 0:
            skipped += 1
            continue
        bits = s.rate / LN2
        pts.append((10.0 * math.log10(P / bits), bits * s.b, 1.0 / s.b))
    if skipped:
        warnings.warn(f"{skipped} zero-rate samples skipped", RuntimeWarning, stacklevel=2)
    r0 = curve.r0_extrapolated
    if not (r0 > 0):
        r0 = awgn_asymptotes(P, z).r0
    return SpectralEfficiencyCurve(tuple(pts), skipped, 10.0 * math.log10(P * LN2 / r0))


@dataclass(frozen=True)
class FirstOrderReport:
    limit_estimate: float
    target: float
    passed: bool
    symmetric: bool
    ratios: tuple[float, ...] = field(default=())


def first_order_optimality_check(
    scheme: SignalingScheme,
    z: float,
    p_grid: Sequence[float],
    rule: GaussQuadratureRule | None = None,
    tol: float = 1e-3,
) -> FirstOrderReport:
    """Estimate lim E_o(p, q_p, rho*)/p as p -> 0 and compare with rho*/(1+rho*)."""
    p = np.asarray(list(p_grid), dtype=float)
    if p.size == 0 or np.any(np.diff(p) >= 0) or p[-1] > 1e-3:
        raise ValidationError("p grid must decrease to at most 1e-3")
    rule = rule or hermite_rule()
    rho = awgn_asymptotes(1.0, z).rho_star
    ratios = np.array([eo(scheme.at(pv), rho, rule).value / pv for pv in p])
    try:
        est = richardson_limit(p, ratios) if p.size >= 4 else float(ratios[-1])
    except ValidationError:
        est = float(ratios[-1])
    target = rho / (1 + rho)
    sym = is_symmetric(scheme.at(float(p[-1])))
    return FirstOrderReport(est, target, abs(est - target) <= tol, sym, tuple(float(v) for v in ratios))
