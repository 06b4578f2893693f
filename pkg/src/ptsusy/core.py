"""Domain types and the PT-symmetric square well V+(x) in a box.

Units are hbar = 2m = 1, so the kinetic operator is -d^2/dx^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

REGION_TAGS = ("L2", "L1", "R1", "R2")


class DomainError(ValueError):
    """Raised when an argument is outside the model's domain."""


@dataclass(frozen=True)
class ProblemParams:
    """Box half-width ``L``, well half-width ``l`` and imaginary strength ``g``."""

    L: float
    l: float
    g: float

    @property
    def hermitian(self) -> bool:
        return self.g == 0.0

    @property
    def breakpoints(self) -> tuple[float, float, float]:
        return (-self.l, 0.0, self.l)

    def regions(self) -> tuple[Region, ...]:
        L, l = self.L, self.l
        bounds = ((-L, -l), (-l, 0.0), (0.0, l), (l, L))
        return tuple(Region(tag, iv) for tag, iv in zip(REGION_TAGS, bounds))

    def as_dict(self) -> dict:
        return {"L": self.L, "l": self.l, "g": self.g}


@dataclass(frozen=True)
class Region:
    tag: str
    interval: tuple[float, float]

    @property
    def width(self) -> float:
        return self.interval[1] - self.interval[0]


@dataclass(frozen=True)
class EnergyLevel:
    """A real eigenvalue ``E = k^2 = t^2 - s^2`` with ``g = 2 s t``."""

    n: int
    E: float
    k: float
    s: float
    t: float

    @property
    def kappa(self) -> complex:
        return complex(self.s, self.t)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "E": self.E,
            "k": self.k,
            "s": self.s,
            "t": self.t,
            "kappa": [self.s, self.t],
        }


@dataclass(frozen=True)
class ComplexSample:
    x: float
    value: complex


def make_problem(L: float, l: float, g: float) -> ProblemParams:
    """Validate and pack the model parameters."""
    L, l, g = float(L), float(l), float(g)
    if not all(math.isfinite(v) for v in (L, l, g)):
        raise DomainError("parameters must be finite")
    if not L > 0:
        raise DomainError("L > 0 violated")
    if not l > 0:
        raise DomainError("l > 0 violated")
    if not l < L:
        raise DomainError("l < L violated")
    if not g >= 0:
        raise DomainError("g >= 0 violated")
    return ProblemParams(L, l, g)


def region_index(x, p: ProblemParams):
    """Index into ``REGION_TAGS`` for each x (the origin is assigned to R1)."""
    x = np.asarray(x, dtype=float)
    return np.select([x < -p.l, x < 0.0, x <= p.l], [0, 1, 2], 3)


def _check_inside(x, L: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > L):
        raise DomainError(f"|x| <= L violated (L={L})")
    return x


def eval_vplus(x, p: ProblemParams):
    """V+(x): 0 outside the well, +ig on (0, l], -ig on [-l, 0).

    At x = +-l the field-free value is returned, at x = 0 the value is 0.
    Accepts scalars or arrays.
    """
    xa = _check_inside(x, p.L)
    inside = (np.abs(xa) < p.l) & (xa != 0.0)
    v = np.where(inside, 1j * p.g * np.sign(xa), 0.0 + 0.0j)
    return complex(v) if v.ndim == 0 else v


def decompose_kappa(E: float, g: float) -> tuple[float, float, complex]:
    """Split ``kappa = s + i t`` with ``kappa^2 = -E + i g``, s >= 0, t > 0.

    The larger of s, t is taken from the square root and the other from
    ``g = 2 s t`` to avoid cancellation.
    """
    r = math.hypot(E, g)
    if E >= 0:
        t = math.sqrt((r + E) / 2)
        s = g / (2 * t) if t > 0 else 0.0
    else:
        s = math.sqrt((r - E) / 2)
        t = g / (2 * s)
    return s, t, complex(s, t)


def make_level(n: int, E: float, g: float) -> EnergyLevel:
    if E <= 0:
        raise DomainError("E > 0 violated")
    s, t, _ = decompose_kappa(E, g)
    return EnergyLevel(n=n, E=float(E), k=math.sqrt(E), s=s, t=t)


def level_residuals(level: EnergyLevel, g: float) -> dict[str, float]:
    """Algebraic consistency of a level with the coupling ``g``."""
    return {
        "E - k^2": abs(level.E - level.k**2),
        "E - (t^2 - s^2)": abs(level.E - (level.t**2 - level.s**2)),
        "g - 2st": abs(g - 2 * level.s * level.t),
        "kappa^2 - (-E + ig)": abs(level.kappa**2 - complex(-level.E, g)),
    }

