"""Gaussian quadrature against the complex normal and unit exponential laws."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np

from .errors import IntegrationError, ValidationError

DEFAULT_HERMITE_ORDER = 48
DEFAULT_LAGUERRE_ORDER = 96

_RESCALE = 1e150


def _jacobi(kind: str, n: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Recurrence coefficients (diag a_0..a_{n-1}, offdiag b_1..b_n, mass)."""
    k = np.arange(n, dtype=float)
    if kind == "hermite":
        return np.zeros(n), np.sqrt(np.arange(1, n + 1) / 2.0), math.sqrt(math.pi)
    if kind == "laguerre":
        return 2.0 * k + 1.0, np.arange(1, n + 1, dtype=float), 1.0
    raise ValidationError(f"unknown rule kind {kind!r}")


def _recurrence(x: np.ndarray, a: np.ndarray, b: np.ndarray, mass: float):
    """Evaluate p_n, p_n' and the Christoffel weight at each x.

    Orthonormal polynomials are carried with a per-node scale so that the
    large Laguerre nodes neither overflow nor lose the weight to underflow.
    """
    n = a.size
    p_prev = np.zeros_like(x)
    p = np.full_like(x, 1.0 / math.sqrt(mass))
    d_prev = np.zeros_like(x)
    d = np.zeros_like(x)
    ssum = p * p
    log_scale = np.zeros_like(x)
    for k in range(n):
        bk = b[k - 1] if k > 0 else 0.0
        p_next = ((x - a[k]) * p - bk * p_prev) / b[k]
        d_next = (p + (x - a[k]) * d - bk * d_prev) / b[k]
        p_prev, p, d_prev, d = p, p_next, d, d_next
        if k < n - 1:
            ssum = ssum + p * p
        m = np.maximum(np.abs(p), np.abs(p_prev))
        big = m > _RESCALE
        if np.any(big):
            f = np.where(big, m, 1.0)
            p, p_prev, d, d_prev = p / f, p_prev / f, d / f, d_prev / f
            ssum = ssum / (f * f)
            log_scale = log_scale + np.log(f)
    weights = np.exp(-2.0 * log_scale) / ssum
    return p, d, weights


@lru_cache(maxsize=None)
def _golub_welsch(kind: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    a, b, mass = _jacobi(kind, n)
    jac = np.diag(a) + np.diag(b[:-1], 1) + np.diag(b[:-1], -1)
    x = np.linalg.eigvalsh(jac)
    for _ in range(8):
        pn, dn, _w = _recurrence(x, a, b, mass)
        step = pn / dn
        x = x - step
        if np.all(np.abs(step) <= 4e-16 * np.maximum(1.0, np.abs(x))):
            break
    _pn, _dn, w = _recurrence(x, a, b, mass)
    if kind == "hermite":
        x = 0.5 * (x - x[::-1])
        w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True, eq=False)
class GaussQuadratureRule:
    """Gauss rule normalized to a probability measure.

    ``kind="hermite"``: measure exp(-t^2)/sqrt(pi) on the real line, one axis
    of the unit complex Gaussian. ``kind="laguerre"``: exp(-t) on [0, inf).
    """

    kind: str
    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self) -> None:
        if self.order < 2:
            raise ValidationError(f"quadrature order must be at least 2, got {self.order}")
        if len(self.nodes) != self.order or len(self.weights) != self.order:
            raise ValidationError("node and weight counts must equal the order")

    @cached_property
    def complex_nodes(self) -> np.ndarray:
        t = self.nodes
        return (t[:, None] + 1j * t[None, :]).ravel()

    @cached_property
    def complex_weights(self) -> np.ndarray:
        w = self.weights
        return (w[:, None] * w[None, :]).ravel()


@lru_cache(maxsize=None)
def hermite_rule(order: int = DEFAULT_HERMITE_ORDER) -> GaussQuadratureRule:
    if order < 2:
        raise ValidationError(f"quadrature order must be at least 2, got {order}")
    x, w = _golub_welsch("hermite", order)
    w = w / math.sqrt(math.pi)
    w.setflags(write=False)
    return GaussQuadratureRule("hermite", order, x, w)


@lru_cache(maxsize=None)
def laguerre_rule(order: int = DEFAULT_LAGUERRE_ORDER) -> GaussQuadratureRule:
    if order < 2:
        raise ValidationError(f"quadrature order must be at least 2, got {order}")
    x, w = _golub_welsch("laguerre", order)
    return GaussQuadratureRule("laguerre", order, x, w)


def _weighted_sum(nodes: np.ndarray, weights: np.ndarray, values) -> float | np.ndarray:
    v = np.asarray(values, dtype=float)
    if v.shape[0] != nodes.shape[0]:
        raise ValidationError("integrand must return one value per node")
    bad = ~np.isfinite(v)
    if np.any(bad):
        i = int(np.argwhere(bad)[0][0])
        raise IntegrationError(nodes[i], v[i])
    if v.ndim == 1:
        return float(np.sum(weights * v))
    return np.sum(weights.reshape((-1,) + (1,) * (v.ndim - 1)) * v, axis=0)


def expect_complex_gaussian(
    g: Callable[[np.ndarray], np.ndarray], rule: GaussQuadratureRule | None = None
):
    """E[g(w)] for w ~ CN(0, 1) on the tensor Gauss-Hermite grid.

    ``g`` is called once with the complex node array and must be vectorized.
    """
    rule = rule or hermite_rule()
    if rule.kind != "hermite":
        raise ValidationError("complex Gaussian expectation needs a Hermite rule")
    y = rule.complex_nodes
    return _weighted_sum(y, rule.complex_weights, g(y))


def expect_unit_exponential(
    g: Callable[[np.ndarray], np.ndarray], order: int | GaussQuadratureRule = DEFAULT_LAGUERRE_ORDER
):
    """E[g(t)] for t ~ Exp(1) by Gauss-Laguerre quadrature."""
    rule = order if isinstance(order, GaussQuadratureRule) else laguerre_rule(order)
    if rule.kind != "laguerre":
        raise ValidationError("exponential expectation needs a Laguerre rule")
    return _weighted_sum(rule.nodes, rule.weights, g(rule.nodes))


@dataclass(frozen=True)
class OracleGrid:
    """Midpoint grid on the square [-half_width, half_width]^2."""

    half_width: float = 8.0
    steps: int = 2048

    def __post_init__(self) -> None:
        if not self.half_width > 0:
            raise ValidationError("half_width must be positive")
        if self.steps < 64:
            raise ValidationError(f"oracle grid needs at least 64 steps, got {self.steps}")

    @classmethod
    def for_radius(cls, max_abs: float, steps: int = 2048) -> "OracleGrid":
        return cls(8.0 + 2.0 * max_abs, steps)


def oracle_expect_complex_gaussian(
    g: Callable[[np.ndarray], np.ndarray], grid: OracleGrid | None = None, chunk_rows: int = 128
) -> float:
    """Brute-force midpoint-rule E[g(w)], w ~ CN(0, 1). Independent of Gauss rules."""
    grid = grid or OracleGrid()
    h = 2.0 * grid.half_width / grid.steps
    u = -grid.half_width + (np.arange(grid.steps) + 0.5) * h
    fu = np.exp(-u * u)
    partial = []
    for start in range(0, grid.steps, chunk_rows):
        v = u[start : start + chunk_rows]
        y = (u[None, :] + 1j * v[:, None]).ravel()
        dens = (fu[None, :] * np.exp(-v * v)[:, None]).ravel()
        vals = np.asarray(g(y), dtype=float)
        partial.append(float(np.sum(dens * vals)))
    return math.fsum(partial) * h * h / math.pi
