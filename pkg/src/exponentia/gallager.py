"""Gallager exponents for finite constellations on the unit-noise AWGN channel.

All output-space integrals are written against w ~ CN(0, 1) via the
substitution y = w, so that for symbol x_k

    f(y | x_k) / f_w(y) = exp(A_k(y)),  A_k(y) = 2 Re(y conj(x_k)) - |x_k|^2,

and the Gallager integral is E_w[M(y)^(1+rho)] with
M(y) = sum_k q_k exp(beta (|x_k|^2 - p)) exp(A_k(y) / (1 + rho)).

For large amplitudes the bumps of M sit outside the Hermite nodes. There the
integral is rewritten symbol by symbol with w centered on x_k:

    E_w[M^(1+rho)] = sum_k q_k c_k E_w[R_k(w)^rho],
    R_k(w) = sum_j q_j c_j exp(-(2 Re(w conj(d_kj)) + |d_kj|^2) / (1 + rho)),

with d_kj = x_k - x_j and c_k = exp(beta (|x_k|^2 - p)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .constellation import Constellation
from .errors import DomainError, ValidationError
from .numerics import central_derivative, golden_section_max
from .quadrature import GaussQuadratureRule, expect_complex_gaussian, hermite_rule

DEFAULT_RHO_CAP = 8.0
# Amplitude above which the symbol-centered form replaces the direct one.
SHIFT_RADIUS = 5.0


@dataclass(frozen=True)
class ExponentResult:
    """Optimized exponent with its maximizers and Kuhn-Tucker diagnostic."""

    value: float
    rho_opt: float
    beta_opt: float = 0.0
    kt_spread: float = float("nan")
    saturated: bool = False


def default_beta_max(p: float) -> float:
    return 4.0 / (1.0 + p)


def _exponent_matrix(c: Constellation, y: np.ndarray) -> np.ndarray:
    """A_k(y) for every node (rows) and symbol (columns)."""
    x = c.points
    return 2.0 * (y[:, None] * np.conj(x)[None, :]).real - (np.abs(x) ** 2)[None, :]


@dataclass(frozen=True)
class AlphaKernel:
    """The tilted output measure alpha(y) and its normalized forms M and T."""

    constellation: Constellation
    rho: float
    beta: float = 0.0

    def __post_init__(self) -> None:
        if self.rho < 0 or self.beta < 0:
            raise DomainError("rho and beta must be nonnegative")

    def _exponents(self, y) -> np.ndarray:
        c = self.constellation
        a = _exponent_matrix(c, np.atleast_1d(np.asarray(y, dtype=complex)))
        return a / (1.0 + self.rho) + self.beta * (c.energies - c.power)

    def T(self, y) -> np.ndarray:
        c = self.constellation
        s = 1.0 / (1.0 + self.rho)
        shift = self.beta * (c.energies - c.power)
        a = _exponent_matrix(c, np.atleast_1d(np.asarray(y, dtype=complex)))
        return np.sum(c.probs * (np.exp(shift) * np.expm1(a * s) + np.expm1(shift)), axis=1)

    def M(self, y) -> np.ndarray:
        return 1.0 + self.T(y)

    def log_M(self, y) -> np.ndarray:
        t = self.T(y)
        low = t <= -0.5
        out = np.log1p(np.where(low, 0.0, t))
        if np.any(low):
            expo = self._exponents(y)[low]
            out[low] = logsumexp(expo, b=self.constellation.probs, axis=1)
        return out

    def alpha(self, y) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=complex))
        fw = np.exp(-np.abs(y) ** 2) / math.pi
        return fw ** (1.0 / (1.0 + self.rho)) * self.M(y)

    def moment_minus_one(self, y) -> np.ndarray:
        """M(y)^(1+rho) - 1 in the direct form, without cancellation for small T."""
        return np.expm1((1.0 + self.rho) * self.log_M(y))


def _support(c: Constellation) -> Constellation:
    keep = c.probs > 0
    if np.all(keep):
        return c
    return Constellation(c.points[keep], c.probs[keep], c.power)


def moment_integrand(c: Constellation, rho: float, beta: float, gains) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized integrand whose CN(0,1) mean is E[M^(1+rho)] - 1 per gain.

    Each gain t scales the constellation power by t. The returned callable
    maps N complex nodes to an (N, len(gains)) array.
    """
    gains = np.atleast_1d(np.asarray(gains, dtype=float))
    x = c.points
    e = np.abs(x) ** 2
    s = 1.0 / (1.0 + rho)
    lc = beta * (e - c.power)
    cq = c.probs * np.exp(lc)
    base = c.probs * np.expm1(lc)
    sigma = float(np.sum(base))
    d = x[:, None] - x[None, :]
    dd = np.abs(d) ** 2
    centered = np.sqrt(gains) * c.max_amplitude > SHIFT_RADIUS

    log_cq = np.log(cq)

    def log_mix(expo: np.ndarray, total: np.ndarray) -> np.ndarray:
        """log(1 + total), falling back to log-sum-exp where total is near -1."""
        low = total <= -0.5
        out = np.log1p(np.where(low, 0.0, total))
        if np.any(low):
            out[low] = logsumexp(expo[low] + log_cq, axis=-1)
        return out

    def g(y: np.ndarray) -> np.ndarray:
        out = np.empty((y.size, gains.size))
        cross = 2.0 * (y[:, None] * np.conj(x)[None, :]).real if not np.all(centered) else None
        dcross = -2.0 * (y[:, None, None] * np.conj(d)[None]).real if np.any(centered) else None
        for i, t in enumerate(gains):
            r = math.sqrt(t)
            if centered[i]:
                expo = (r * dcross - t * dd) * s
                tau = np.sum(cq * np.expm1(expo) + base, axis=2)
                out[:, i] = np.sum(cq * np.expm1(rho * log_mix(expo, tau)), axis=1) + sigma
            else:
                expo = (r * cross - t * e) * s
                tt = np.sum(cq * np.expm1(expo) + base, axis=1)
                out[:, i] = np.expm1((1.0 + rho) * log_mix(expo, tt))
        return out

    return g


def eo_fixed_beta(
    c: Constellation, rho: float, beta: float = 0.0, rule: GaussQuadratureRule | None = None
) -> float:
    """-ln E_w[M^(1+rho)] at fixed beta."""
    if rho < 0 or beta < 0:
        raise DomainError("rho and beta must be nonnegative")
    c = _support(c)
    if rho == 0 or c.size == 1:
        return 0.0
    s = expect_complex_gaussian(moment_integrand(c, rho, beta, 1.0), rule or hermite_rule())
    return -math.log1p(float(s[0]))


def kuhn_tucker_residual(
    c: Constellation,
    rho: float,
    beta: float = 0.0,
    rule: GaussQuadratureRule | None = None,
    probes: Sequence[complex] = (),
) -> np.ndarray:
    """Per-symbol Kuhn-Tucker residuals, followed by residuals at ``probes``.

    Entry k is int alpha^rho e^{beta(|x_k|^2-p)} f(y|x_k)^{1/(1+rho)} dy minus
    int alpha^{1+rho} dy. Optimality needs zeros on the support and nonpositive
    values at every other candidate point.
    """
    rule = rule or hermite_rule()
    kernel = AlphaKernel(_support(c), rho, beta)
    cand = np.concatenate([c.points, np.asarray(probes, dtype=complex).ravel()])
    shift = beta * (np.abs(cand) ** 2 - c.power)
    s = 1.0 / (1.0 + rho)

    def g(y):
        t = kernel.T(y)
        a = 2.0 * (y[:, None] * np.conj(cand)[None, :]).real - (np.abs(cand) ** 2)[None, :]
        own = np.exp(shift) * np.expm1(a * s) + np.expm1(shift)
        return np.exp(rho * kernel.log_M(y))[:, None] * (own - t[:, None])

    return np.asarray(expect_complex_gaussian(g, rule), dtype=float)


def _kt_spread(c: Constellation, rho: float, beta: float, rule) -> float:
    if c.size == 1 or rho == 0:
        return 0.0
    res = kuhn_tucker_residual(c, rho, beta, rule)[c.probs > 0]
    return float(res.max() - res.min())


def eo(
    c: Constellation,
    rho: float,
    rule: GaussQuadratureRule | None = None,
    beta_max: float | None = None,
    with_kt: bool = False,
) -> ExponentResult:
    """E_o maximized over beta in [0, beta_max]; beta = 0 for equal-energy inputs."""
    rule = rule or hermite_rule()
    c_eff = _support(c)
    if c_eff.is_equal_energy() or rho == 0 or c_eff.size == 1:
        beta, value = 0.0, eo_fixed_beta(c_eff, rho, 0.0, rule)
    else:
        bmax = default_beta_max(c.power) if beta_max is None else beta_max
        beta, value = golden_section_max(lambda b: eo_fixed_beta(c_eff, rho, b, rule), 0.0, bmax)
    spread = _kt_spread(c_eff, rho, beta, rule) if with_kt else float("nan")
    return ExponentResult(float(value), rho, beta, spread)


def _rho_search(c, r, lo, hi, rule) -> tuple[float, float]:
    return golden_section_max(lambda rho: eo(c, rho, rule).value - rho * r, lo, hi)


def random_coding_exponent(
    c: Constellation, r: float, rule: GaussQuadratureRule | None = None
) -> ExponentResult:
    """sup over rho in [0, 1] of E_o(rho) - rho r."""
    if r < 0:
        raise DomainError("rate must be nonnegative")
    rule = rule or hermite_rule()
    rho, value = _rho_search(c, r, 0.0, 1.0, rule)
    inner = eo(c, rho, rule, with_kt=True)
    return ExponentResult(float(value), rho, inner.beta_opt, inner.kt_spread)


def sphere_packing_exponent(
    c: Constellation, r: float, rho_cap: float = DEFAULT_RHO_CAP, rule: GaussQuadratureRule | None = None
) -> ExponentResult:
    """sup over rho in [0, rho_cap] of E_o(rho) - rho r, flagged when the cap binds."""
    if not r > 0:
        raise DomainError("rate must be positive")
    if rho_cap < 1:
        raise DomainError("rho_cap must be at least 1")
    rule = rule or hermite_rule()
    rho, value = _rho_search(c, r, 0.0, rho_cap, rule)
    inner = eo(c, rho, rule, with_kt=True)
    return ExponentResult(float(value), rho, inner.beta_opt, inner.kt_spread, rho >= rho_cap - 1e-6)


def critical_rate(c: Constellation, rule: GaussQuadratureRule | None = None) -> tuple[float, float]:
    """(r_crit, z_crit / p) with r_crit = dE_o/drho at rho = 1."""
    rule = rule or hermite_rule()
    r_crit = central_derivative(lambda rho: eo(c, rho, rule).value, 1.0)
    z = (eo(c, 1.0, rule).value - r_crit) / c.power if c.power > 0 else 0.0
    return r_crit, z


def mutual_information(c: Constellation, rule: GaussQuadratureRule | None = None) -> float:
    """I(X; Y) in nats per symbol."""
    rule = rule or hermite_rule()
    c = _support(c)
    if c.size == 1:
        return 0.0
    x, q = c.points, c.probs
    total = 0.0
    for xk, qk in zip(x, q):
        d = xk - x

        def g(w, d=d):
            expo = -2.0 * (w[:, None] * np.conj(d)[None, :]).real - (np.abs(d) ** 2)[None, :]
            return -logsumexp(expo, b=q[None, :], axis=1)

        total += qk * expect_complex_gaussian(g, rule)
    return max(total, 0.0)


def infinite_bandwidth_reliability(r_over_p: float) -> float:
    """Capacity-normalized reliability function of the infinite-bandwidth channel."""
    x = float(r_over_p)
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"normalized rate must lie in [0, 1], got {x!r}")
    if x <= 0.25:
        return 0.5 - x
    return (1.0 - math.sqrt(x)) ** 2


def small_power_gap(c: Constellation, rho: float, rule: GaussQuadratureRule | None = None) -> float:
    """(E_o/(p rho) - 1/(1+rho)) / p, the normalized second-order term."""
    if not (c.power > 0 and rho > 0):
        raise ValidationError("needs positive power and rho")
    value = eo(c, rho, rule).value
    return (value / (c.power * rho) - 1.0 / (1.0 + rho)) / c.power
