"""Finite input alphabets, peak constraints and bandwidth-indexed signaling schemes."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError, ValidationError

PROB_TOL = 1e-12
POWER_TOL = 1e-12
DUPLICATE_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Constellation:
    """Discrete input distribution on the complex plane with N0 = 1.

    ``points`` is a complex array, ``probs`` the matching probabilities and
    ``power`` the average energy per complex symbol.
    """

    points: np.ndarray
    probs: np.ndarray
    power: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=complex).ravel()
        q = np.asarray(self.probs, dtype=float).ravel()
        if pts.size == 0:
            raise ValidationError("alphabet must be nonempty")
        if pts.size != q.size:
            raise ValidationError(f"{pts.size} points but {q.size} probabilities")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(q))):
            raise ValidationError("points and probabilities must be finite")
        if np.any(q < 0):
            raise ValidationError("probabilities must be nonnegative")
        total = math.fsum(q)
        if abs(total - 1.0) > PROB_TOL:
            raise ValidationError(f"probabilities sum to {total!r}, expected 1")
        if pts.size > 1:
            dist = np.abs(pts[:, None] - pts[None, :])
            np.fill_diagonal(dist, np.inf)
            if dist.min() <= DUPLICATE_TOL:
                i, j = np.unravel_index(np.argmin(dist), dist.shape)
                raise ValidationError(f"duplicate points {pts[i]!r} and {pts[j]!r}")
        p = math.fsum(q * np.abs(pts) ** 2)
        if abs(p - float(self.power)) > POWER_TOL * max(1.0, p):
            raise ValidationError(f"stated power {self.power!r} but alphabet has {p!r}")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "probs", _frozen(q))
        object.__setattr__(self, "power", float(self.power))

    @property
    def size(self) -> int:
        return int(self.points.size)

    @property
    def max_amplitude(self) -> float:
        return float(np.max(np.abs(self.points)))

    @property
    def energies(self) -> np.ndarray:
        return np.abs(self.points) ** 2

    def is_equal_energy(self, tol: float = 1e-12) -> bool:
        """True when every symbol with positive probability has energy ``power``."""
        e = self.energies[self.probs > 0]
        return bool(np.all(np.abs(e - self.power) <= tol * max(1.0, self.power)))

    def scaled(self, gain: float) -> "Constellation":
        """Amplitudes multiplied by ``sqrt(gain)``; power multiplied by ``gain``."""
        if gain < 0:
            raise DomainError("gain must be nonnegative")
        return Constellation(self.points * math.sqrt(gain), self.probs, self.power * gain)

    def to_dict(self) -> dict:
        return {
            "points": [[float(z.real), float(z.imag)] for z in self.points],
            "probs": [float(v) for v in self.probs],
            "power": self.power,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Constellation":
        try:
            raw = data["points"]
            probs = data["probs"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"constellation JSON missing field: {exc}") from None
        pts = []
        for item in raw:
            if isinstance(item, (int, float)):
                pts.append(complex(item))
            elif len(item) == 2:
                pts.append(complex(float(item[0]), float(item[1])))
            else:
                raise ValidationError(f"point {item!r} is not a [re, im] pair")
        c = make_custom(pts, probs)
        if "power" in data and abs(float(data["power"]) - c.power) > POWER_TOL * max(1.0, c.power):
            raise ValidationError(f"stated power {data['power']!r} but alphabet has {c.power!r}")
        return c

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Constellation":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path: str | Path) -> "Constellation":
        return cls.from_json(Path(path).read_text())


@dataclass(frozen=True)
class PeakConstraint:
    """Peak amplitude rule ``max|x| <= k_m * p**peak_exponent``."""

    k_m: float = 10.0
    peak_exponent: float = 0.25

    def __post_init__(self) -> None:
        if not (self.k_m > 0 and self.peak_exponent > 0):
            raise ValidationError("k_m and peak_exponent must be positive")

    def bound(self, p: float) -> float:
        return self.k_m * p**self.peak_exponent


def make_psk(order: int, p: float) -> Constellation:
    """BPSK (order 2) or QPSK (order 4) at power ``p``."""
    if not p > 0:
        raise DomainError(f"power must be positive, got {p!r}")
    if order == 2:
        a = math.sqrt(p)
        return Constellation(np.array([a, -a], dtype=complex), np.full(2, 0.5), p)
    if order == 4:
        a = math.sqrt(p / 2)
        pts = a * np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j])
        return Constellation(pts, np.full(4, 0.25), p)
    raise ValidationError(f"PSK order must be 2 or 4, got {order!r}")


def make_custom(points: Sequence[complex], probs: Sequence[float]) -> Constellation:
    pts = np.asarray(points, dtype=complex).ravel()
    q = np.asarray(probs, dtype=float).ravel()
    if pts.size != q.size:
        raise ValidationError(f"{pts.size} points but {q.size} probabilities")
    power = math.fsum(q * np.abs(pts) ** 2) if pts.size else 0.0
    return Constellation(pts, q, power)


def is_symmetric(c: Constellation, tol: float = 1e-12) -> bool:
    """True iff each point x has a mirror -x carrying the same probability."""
    for x, q in zip(c.points, c.probs):
        d = np.abs(c.points + x)
        j = int(np.argmin(d))
        if d[j] > tol or abs(c.probs[j] - q) > tol:
            return False
    return True


def pairwise_moment(c: Constellation, rho: float) -> float:
    """E[exp(2 Re(x1 conj(x2)) / (1+rho)^2)] for independent x1, x2 ~ q."""
    cross = 2.0 * (c.points[:, None] * np.conj(c.points)[None, :]).real
    w = c.probs[:, None] * c.probs[None, :]
    return float(np.sum(w * np.exp(cross / (1.0 + rho) ** 2)))


@dataclass(frozen=True)
class SignalingScheme:
    """Rule producing a constellation of power ``p`` for every ``p > 0``.

    ``kind`` is ``"bpsk"``, ``"qpsk"`` or ``"custom"``; a custom scheme rescales
    ``template`` to the requested power.
    """

    kind: str
    peak: PeakConstraint = field(default_factory=PeakConstraint)
    template: Constellation | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("bpsk", "qpsk", "custom"):
            raise ValidationError(f"unknown scheme kind {self.kind!r}")
        if self.kind == "custom":
            if self.template is None:
                raise ValidationError("custom scheme needs a template constellation")
            if not self.template.power > 0:
                raise ValidationError("custom template must have positive power")

    @classmethod
    def bpsk(cls, peak: PeakConstraint | None = None) -> "SignalingScheme":
        return cls("bpsk", peak or PeakConstraint())

    @classmethod
    def qpsk(cls, peak: PeakConstraint | None = None) -> "SignalingScheme":
        return cls("qpsk", peak or PeakConstraint())

    @classmethod
    def custom(cls, template: Constellation, peak: PeakConstraint | None = None) -> "SignalingScheme":
        return cls("custom", peak or PeakConstraint(), template)

    @property
    def name(self) -> str:
        return self.kind

    def at(self, p: float) -> Constellation:
        if not p > 0:
            raise DomainError(f"power must be positive, got {p!r}")
        if self.kind == "bpsk":
            return make_psk(2, p)
        if self.kind == "qpsk":
            return make_psk(4, p)
        t = self.template
        return Constellation(t.points * math.sqrt(p / t.power), t.probs, p)


def check_peak(scheme: SignalingScheme, p: float) -> bool:
    """Whether the scheme's constellation at power ``p`` respects its peak rule."""
    c = scheme.at(p)
    return c.max_amplitude <= scheme.peak.bound(p) * (1 + 1e-12)
