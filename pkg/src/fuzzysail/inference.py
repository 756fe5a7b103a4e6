"""Type-1, interval type-2 and non-stationary inference over two inputs.

All engines use min for antecedent conjunction and singleton consequents.
Batched functions take arrays of crisp inputs and skip universe checks; the
scalar functions validate and return Python floats.

Sums over the 25 rules pair rule ``k`` with rule ``24 - k`` before adding,
which makes outputs exactly antisymmetric under a mirrored rule table.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .rules import RuleBase
from .sets import IT2SetPair, LinguisticVariable, PiecewiseLinearMF, footprint_params, trapezoid

__all__ = [
    "FiringInterval",
    "NSConfig",
    "TypeReduced",
    "fuzzify",
    "rule_strengths",
    "weighted_average",
    "t1_outputs",
    "evaluate_t1",
    "firing_bounds",
    "firing_interval",
    "km_bounds",
    "reduce_km",
    "it2_bounds",
    "perturb",
    "ns_outputs",
    "evaluate_ns",
]


@dataclass(frozen=True)
class FiringInterval:
    lo: float
    hi: float

    def __post_init__(self):
        if not 0.0 <= self.lo <= self.hi <= 1.0:
            raise ValueError(f"invalid firing interval [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class NSConfig:
    """Non-stationary ensemble settings.

    ``shared_shift`` moves all terms of a variable by one draw per
    instantiation instead of drawing per term.
    """

    sigma: float = 0.0
    ensemble_size: int = 30
    rng_seed: int = 0
    shared_shift: bool = False

    def __post_init__(self):
        if not self.sigma >= 0:
            raise ValueError("sigma must be >= 0")
        if int(self.ensemble_size) != self.ensemble_size or self.ensemble_size < 1:
            raise ValueError("ensemble_size must be a positive integer")


class TypeReduced(NamedTuple):
    y_l: float
    y_r: float
    fired: bool


def fuzzify(var: LinguisticVariable, x: float) -> np.ndarray:
    """Membership of ``x`` in each of the five terms of ``var``."""
    return var.fuzzify(x)


def _paired_sum(v: np.ndarray) -> np.ndarray:
    n = v.shape[-1]
    if n == 1:
        return v[..., 0]
    half = n // 2
    total = v[..., 0] + v[..., n - 1]
    for k in range(1, half):
        total = total + (v[..., k] + v[..., n - 1 - k])
    if n % 2:
        total = total + v[..., half]
    return total


def rule_strengths(mu_e: np.ndarray, mu_de: np.ndarray) -> np.ndarray:
    """Min-conjunction of every (error term, change term) pair, row-major."""
    w = np.minimum(mu_e[..., :, None], mu_de[..., None, :])
    return w.reshape(w.shape[:-2] + (w.shape[-2] * w.shape[-1],))


def weighted_average(w: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Height defuzzification; zero total strength gives 0."""
    num = _paired_sum(w * y)
    den = _paired_sum(w)
    safe = np.where(den > 0, den, 1.0)
    return np.where(den > 0, num / safe, 0.0)


def _clip(out, rules: RuleBase):
    return np.clip(out, rules.singletons[0], rules.singletons[-1])


def t1_outputs(error_var, derror_var, rules: RuleBase, e, de) -> np.ndarray:
    w = rule_strengths(error_var.fuzzify_many(e), derror_var.fuzzify_many(de))
    return _clip(weighted_average(w, rules.consequents), rules)


def evaluate_t1(rules: RuleBase, error_var: LinguisticVariable,
                derror_var: LinguisticVariable, e: float, de: float) -> float:
    """Type-1 output in percent rudder change."""
    error_var.check(e)
    derror_var.check(de)
    return float(t1_outputs(error_var, derror_var, rules, e, de))


def _pair_params(pairs: Sequence[IT2SetPair]):
    lower = np.array([p.lower.params for p in pairs], dtype=float)
    upper = np.array([p.upper.params for p in pairs], dtype=float)
    return lower, upper


def _bounds_from_params(lower_e, upper_e, lower_de, upper_de, e, de):
    e = np.asarray(e, dtype=float)[..., None]
    de = np.asarray(de, dtype=float)[..., None]

    def mu(p, x):
        return trapezoid(x, p[:, 0], p[:, 1], p[:, 2], p[:, 3])

    lo = rule_strengths(mu(lower_e, e), mu(lower_de, de))
    hi = rule_strengths(mu(upper_e, e), mu(upper_de, de))
    return lo, hi


def firing_bounds(it2_error: Sequence[IT2SetPair], it2_derror: Sequence[IT2SetPair], e, de):
    """Arrays ``(lo, hi)`` of shape ``(..., 25)``."""
    le, ue = _pair_params(it2_error)
    ld, ud = _pair_params(it2_derror)
    return _bounds_from_params(le, ue, ld, ud, e, de)


def firing_interval(it2_error: Sequence[IT2SetPair], it2_derror: Sequence[IT2SetPair],
                    e: float, de: float) -> list[FiringInterval]:
    lo, hi = firing_bounds(it2_error, it2_derror, e, de)
    return [FiringInterval(float(a), float(b)) for a, b in zip(lo, hi)]


KM_TIE = 1e-12


def _km_left(lo, hi, y, start, max_iter: int):
    # KM switch rule for the left end: upper weights on consequents at or
    # below the current estimate, lower weights above it. The estimate is
    # rounded, so consequents within a relative KM_TIE of it count as ties.
    cur = start
    mask = None
    for _ in range(max_iter):
        sel = y <= (cur + KM_TIE * (1.0 + np.abs(cur)))[..., None]
        if mask is not None and np.array_equal(sel, mask):
            break
        cur = weighted_average(np.where(sel, hi, lo), y)
        mask = sel
    return cur


def km_bounds(lo, hi, y, max_iter: int = 25):
    """Karnik-Mendel endpoints of the interval weighted average.

    Parameters
    ----------
    lo, hi : array_like, shape (..., n)
        Lower and upper firing strengths.
    y : array_like, shape (n,)
        Consequent values.

    Returns
    -------
    y_l, y_r, fired : ndarray
        Endpoints (0 where nothing fired) and the fired mask.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    lo, hi = np.broadcast_arrays(lo, hi)
    y = np.asarray(y, dtype=float)
    fired = _paired_sum(hi) > 0
    start = weighted_average((lo + hi) / 2, y)
    y_l = _km_left(lo, hi, y, start, max_iter)
    # the right end is the mirrored left end, which keeps mirrored inputs
    # bit-exactly antisymmetric
    y_r = -_km_left(lo, hi, -y, -start, max_iter)
    # rounding can leave the ends one ulp out of order when all fired
    # consequents are equal
    lo_end = np.where(fired, np.minimum(y_l, y_r), 0.0)
    hi_end = np.where(fired, np.maximum(y_l, y_r), 0.0)
    return lo_end, hi_end, fired


def reduce_km(intervals: Sequence[FiringInterval], rules: RuleBase) -> TypeReduced:
    """Type-reduce 25 rule firing intervals against ``rules``."""
    if len(intervals) != len(rules.consequents):
        raise ValueError("need one firing interval per rule")
    lo = np.array([iv.lo for iv in intervals])
    hi = np.array([iv.hi for iv in intervals])
    y_l, y_r, fired = km_bounds(lo, hi, rules.consequents)
    return TypeReduced(float(y_l), float(y_r), bool(fired))


def it2_bounds(error_var: LinguisticVariable, derror_var: LinguisticVariable,
               rules: RuleBase, movement: float, e, de):
    """``(y_l, y_r)`` arrays for a footprint of width ``movement``."""
    le, ue = footprint_params(error_var.params, movement, error_var.pinned())
    ld, ud = footprint_params(derror_var.params, movement, derror_var.pinned())
    lo, hi = _bounds_from_params(le, ue, ld, ud, e, de)
    y_l, y_r, _ = km_bounds(lo, hi, rules.consequents)
    return _clip(y_l, rules), _clip(y_r, rules)


def _shifted(params, pinned, offsets):
    moved = np.where(pinned, params, params + offsets[..., None])
    return np.maximum.accumulate(moved, axis=-1)


def perturb(base: LinguisticVariable, sigma: float, rng: np.random.Generator,
            shared: bool = False) -> LinguisticVariable:
    """One non-stationary instantiation of ``base``.

    Each term moves horizontally by its own Normal(0, sigma) draw (a single
    draw for all terms when ``shared``). The result may leave gaps in the
    universe and is therefore built without the partition checks.
    """
    if not sigma >= 0:
        raise ValueError("sigma must be >= 0")
    if sigma == 0:
        return base
    draws = rng.normal(0.0, sigma, size=1 if shared else 5)
    offsets = np.broadcast_to(draws, (5,))
    params = _shifted(base.params, base.pinned(), offsets)
    return _unchecked_variable(base, params)


def _unchecked_variable(base: LinguisticVariable, params: np.ndarray) -> LinguisticVariable:
    var = object.__new__(LinguisticVariable)
    terms = tuple(
        (label, object.__new__(PiecewiseLinearMF)) for label in base.labels
    )
    for (_, mf), row in zip(terms, params.tolist()):
        for name, v in zip("abcd", row):
            object.__setattr__(mf, name, v)
    params = np.array(params, dtype=float)
    params.setflags(write=False)
    object.__setattr__(var, "name", base.name)
    object.__setattr__(var, "universe", base.universe)
    object.__setattr__(var, "terms", terms)
    object.__setattr__(var, "_params", params)
    return var


def ns_outputs(error_var: LinguisticVariable, derror_var: LinguisticVariable,
               rules: RuleBase, cfg: NSConfig, rng: np.random.Generator, e, de) -> np.ndarray:
    """Ensemble-mean outputs for a 1-D batch of inputs.

    Draws are consumed per input in order, each input taking
    ``ensemble_size`` instantiations of (error terms, change terms), so a
    batch call consumes the stream exactly as repeated scalar calls would.
    """
    e = np.atleast_1d(np.asarray(e, dtype=float))
    de = np.atleast_1d(np.asarray(de, dtype=float))
    if cfg.sigma == 0:
        return t1_outputs(error_var, derror_var, rules, e, de)
    n, size = e.shape[0], cfg.ensemble_size
    shape = (n, size, 2, 1 if cfg.shared_shift else 5)
    draws = np.broadcast_to(rng.normal(0.0, cfg.sigma, size=shape), (n, size, 2, 5))
    pe = _shifted(error_var.params, error_var.pinned(), draws[:, :, 0, :])
    pd = _shifted(derror_var.params, derror_var.pinned(), draws[:, :, 1, :])
    mu_e = trapezoid(e[:, None, None], pe[..., 0], pe[..., 1], pe[..., 2], pe[..., 3])
    mu_d = trapezoid(de[:, None, None], pd[..., 0], pd[..., 1], pd[..., 2], pd[..., 3])
    out = weighted_average(rule_strengths(mu_e, mu_d), rules.consequents)
    return _clip(out.sum(axis=-1) / size, rules)


def evaluate_ns(cfg: NSConfig, rules: RuleBase, error_var: LinguisticVariable,
                derror_var: LinguisticVariable, e: float, de: float,
                rng: np.random.Generator | None = None) -> float:
    """Mean type-1 output over freshly perturbed instantiations.

    ``rng`` is the caller's stream; without one a fresh generator is seeded
    from ``cfg.rng_seed``.
    """
    error_var.check(e)
    derror_var.check(de)
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    return float(ns_outputs(error_var, derror_var, rules, cfg, rng, e, de)[0])
