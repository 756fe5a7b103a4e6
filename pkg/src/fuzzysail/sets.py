"""Piecewise-linear membership functions, linguistic variables and footprints.

Every shape is a trapezoid ``(a, b, c, d)``; triangles have ``b == c`` and
shoulders have ``a == b`` or ``c == d``. Abscissae that sit exactly on a
universe bound mark an open shoulder and are never moved by perturbation or
footprint construction, so the outermost terms keep covering the edge of
the universe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "OutOfUniverseError",
    "PiecewiseLinearMF",
    "LinguisticVariable",
    "IT2SetPair",
    "trapezoid",
    "membership",
    "footprint",
    "default_partition",
    "TERM_LABELS",
]

TERM_LABELS = ("LargeNegative", "Negative", "None", "Positive", "LargePositive")


class OutOfUniverseError(ValueError):
    """Raised when a crisp input falls outside a variable's universe."""


def trapezoid(x, a, b, c, d):
    """Vectorised trapezoid membership; all arguments broadcast together."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        rise = (x - a) / (b - a)
        fall = (d - x) / (d - c)
    mu = np.where(x <= c, 1.0, fall)
    mu = np.where(x < b, rise, mu)
    return np.where((x < a) | (x > d), 0.0, mu)


@dataclass(frozen=True)
class PiecewiseLinearMF:
    """Trapezoidal membership function over degrees."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError(f"non-finite abscissa in {vals}")
        if not (self.a <= self.b <= self.c <= self.d):
            raise ValueError(f"abscissae must satisfy a <= b <= c <= d, got {vals}")

    @classmethod
    def triangle(cls, a: float, b: float, c: float) -> "PiecewiseLinearMF":
        return cls(a, b, b, c)

    @property
    def params(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __call__(self, x):
        mu = trapezoid(x, self.a, self.b, self.c, self.d)
        return float(mu) if mu.ndim == 0 else mu


def membership(mf: PiecewiseLinearMF, x: float) -> float:
    """Degree of membership of ``x`` in ``mf``."""
    return float(trapezoid(x, *mf.params))


@dataclass(frozen=True)
class LinguisticVariable:
    """A named input with exactly five ordered terms over a closed universe."""

    name: str
    universe: tuple[float, float]
    terms: tuple[tuple[str, PiecewiseLinearMF], ...]
    _params: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        lo, hi = (float(v) for v in self.universe)
        if not lo < hi:
            raise ValueError(f"empty universe {self.universe}")
        object.__setattr__(self, "universe", (lo, hi))
        terms = tuple((str(label), mf) for label, mf in self.terms)
        object.__setattr__(self, "terms", terms)
        if len(terms) != 5:
            raise ValueError(f"{self.name}: expected 5 terms, got {len(terms)}")
        params = np.array([mf.params for _, mf in terms], dtype=float)
        params.setflags(write=False)
        object.__setattr__(self, "_params", params)
        if np.any(np.diff(params[:, 0]) < 0) or np.any(np.diff(params[:, 3]) < 0):
            raise ValueError(f"{self.name}: term supports are not ordered left to right")
        self._check_complete()

    def _check_complete(self):
        # memberships are linear between breakpoints, so testing breakpoints
        # and the midpoints between them is exhaustive
        lo, hi = self.universe
        pts = np.unique(np.clip(np.append(self._params.ravel(), [lo, hi]), lo, hi))
        probe = np.concatenate([pts, (pts[:-1] + pts[1:]) / 2])
        covered = self.fuzzify_many(probe).max(axis=-1)
        if np.any(covered <= 0):
            gap = probe[np.argmin(covered)]
            raise ValueError(f"{self.name}: universe not covered near x={gap:g}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.terms)

    @property
    def params(self) -> np.ndarray:
        """Read-only ``(5, 4)`` array of term abscissae."""
        return self._params

    def check(self, x) -> None:
        lo, hi = self.universe
        arr = np.asarray(x, dtype=float)
        if np.any(~np.isfinite(arr)) or np.any(arr < lo) or np.any(arr > hi):
            raise OutOfUniverseError(
                f"{self.name}: input outside universe [{lo:g}, {hi:g}]"
            )

    def fuzzify_many(self, x) -> np.ndarray:
        """Memberships with shape ``x.shape + (5,)``; no universe check."""
        x = np.asarray(x, dtype=float)[..., None]
        p = self._params
        return trapezoid(x, p[:, 0], p[:, 1], p[:, 2], p[:, 3])

    def fuzzify(self, x: float) -> np.ndarray:
        self.check(x)
        return self.fuzzify_many(x)

    def pinned(self) -> np.ndarray:
        """Boolean mask of abscissae lying on a universe bound."""
        lo, hi = self.universe
        return (self._params == lo) | (self._params == hi)

    def with_params(self, params: np.ndarray, name: str | None = None) -> "LinguisticVariable":
        terms = tuple(
            (label, PiecewiseLinearMF(*map(float, row)))
            for label, row in zip(self.labels, np.asarray(params, dtype=float))
        )
        return LinguisticVariable(name or self.name, self.universe, terms)


@dataclass(frozen=True)
class IT2SetPair:
    """Lower and upper membership functions bounding a footprint of uncertainty."""

    lower: PiecewiseLinearMF
    upper: PiecewiseLinearMF
    movement: float

    def __post_init__(self):
        if self.movement < 0:
            raise ValueError("movement must be >= 0")

    def __call__(self, x) -> tuple:
        return self.lower(x), self.upper(x)


def footprint_params(params: np.ndarray, movement: float, pinned: np.ndarray):
    """Lower and upper abscissae for a ``(..., 4)`` parameter array.

    The upper set is dilated by ``movement / 2`` on each side; the lower set
    is contracted by the same amount and, when its core would invert, the
    core collapses onto the centre of the original core.
    """
    h = movement / 2.0
    p = np.asarray(params, dtype=float)
    shift = np.array([-h, -h, h, h])
    upper = np.where(pinned, p, p + shift)
    lower = np.where(pinned, p, p - shift)
    centre = (p[..., 1] + p[..., 2]) / 2
    inverted = lower[..., 1] > lower[..., 2]
    lower[..., 1] = np.where(inverted, centre, lower[..., 1])
    lower[..., 2] = np.where(inverted, centre, lower[..., 2])
    lower[..., 0] = np.minimum(lower[..., 0], lower[..., 1])
    lower[..., 3] = np.maximum(lower[..., 3], lower[..., 2])
    return lower, upper


def footprint(var: LinguisticVariable, movement: float) -> list[IT2SetPair]:
    """Interval type-2 pairs obtained by blurring each term of ``var``."""
    if movement < 0:
        raise ValueError("movement must be >= 0")
    lower, upper = footprint_params(var.params, movement, var.pinned())
    return [
        IT2SetPair(PiecewiseLinearMF(*lo), PiecewiseLinearMF(*up), float(movement))
        for lo, up in zip(lower.tolist(), upper.tolist())
    ]


def default_partition(name: str = "error", labels: Sequence[str] = TERM_LABELS) -> LinguisticVariable:
    """Symmetric five-term partition of [-180, 180] degrees."""
    shapes = [
        PiecewiseLinearMF(-180, -180, -90, -30),
        PiecewiseLinearMF.triangle(-90, -30, 0),
        PiecewiseLinearMF.triangle(-30, 0, 30),
        PiecewiseLinearMF.triangle(0, 30, 90),
        PiecewiseLinearMF(30, 90, 180, 180),
    ]
    return LinguisticVariable(name, (-180.0, 180.0), tuple(zip(labels, shapes)))
