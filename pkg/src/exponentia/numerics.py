"""Scalar maximization and Richardson extrapolation."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError, ValidationError

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    seed_points: int = 33,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Maximize ``f`` on [lo, hi]; returns (argmax, max).

    A uniform seed grid locates the best cell, then golden-section search
    refines inside the two neighbouring cells.
    """
    if not hi >= lo:
        raise ValidationError(f"empty interval [{lo!r}, {hi!r}]")
    if hi == lo:
        return lo, f(lo)
    xs = np.linspace(lo, hi, seed_points)
    fs = [f(float(x)) for x in xs]
    i = int(np.argmax(fs))
    best_x, best_f = float(xs[i]), fs[i]
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, seed_points - 1)])
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    else:
        raise ConvergenceError("golden-section search did not converge", (a, b))
    for x, fx in ((c, fc), (d, fd)):
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def grid_ratio(h: Sequence[float], rtol: float = 1e-9) -> float:
    """Common ratio h[i]/h[i+1] of a strictly decreasing geometric grid."""
    h = np.asarray(h, dtype=float)
    if h.size < 2 or np.any(h <= 0):
        raise ValidationError("grid must hold at least two positive values")
    ratios = h[:-1] / h[1:]
    s = float(ratios[0])
    if s <= 1.0 or np.any(np.abs(ratios - s) > rtol * s):
        raise ValidationError("grid is not geometric and strictly decreasing")
    return s


def richardson_limit(h: Sequence[float], values: Sequence[float], order: int = 3) -> float:
    """Extrapolate values(h) to h = 0 assuming a power series in h.

    Uses the ``order + 1`` smallest steps of a geometric grid sorted in
    decreasing order.
    """
    h = np.asarray(h, dtype=float)
    v = np.asarray(values, dtype=float)
    if h.size != v.size:
        raise ValidationError("step and value arrays differ in length")
    if h.size < order + 1:
        raise ValidationError(f"need at least {order + 1} samples, got {h.size}")
    s = grid_ratio(h)
    t = list(v[-(order + 1):])
    for j in range(1, order + 1):
        f = s**j
        t = [(f * t[i + 1] - t[i]) / (f - 1.0) for i in range(len(t) - 1)]
    return float(t[0])


def limit_and_slope(h: Sequence[float], values: Sequence[float], order: int = 3) -> tuple[float, float]:
    """Return (F(0), F'(0)) from samples of F on a decreasing geometric grid."""
    h = np.asarray(h, dtype=float)
    v = np.asarray(values, dtype=float)
    if h.size < 4:
        raise ValidationError(f"need at least 4 samples, got {h.size}")
    f0 = richardson_limit(h, v, order)
    slope = richardson_limit(h, (v - f0) / h, min(order, h.size - 1) - 1)
    return f0, slope


def central_derivative(f: Callable[[float], float], x: float, h: float = 1e-5) -> float:
    """Central difference at steps h and h/2 combined by one Richardson step."""
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4.0 * d2 - d1) / 3.0
