"""Heading controllers behind one step contract.

``step(heading, desired, dt)`` returns a rudder command in percent. PI
commands are absolute rudder positions (``mode == "absolute"``); the fuzzy
family emits position changes (``mode == "delta"``) that the simulator
accumulates and clamps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative
from .estimators import DualSurfaceFLC, IntervalType2FLC, NonStationaryFLC, Type1FLC

__all__ = [
    "wrap_error",
    "ControllerState",
    "ControllerSpec",
    "PIController",
    "FuzzyHeadingController",
    "make_controller",
    "KINDS",
    "DS_MOVEMENT",
]

KINDS = ("pi", "t1", "ns", "it2", "ds")
DS_MOVEMENT = 5.0


def wrap_error(desired: float, current: float) -> float:
    """Shortest signed angle from ``current`` to ``desired`` in (-180, 180]."""
    d = (desired - current) % 360.0
    return d - 360.0 if d > 180.0 else d


@dataclass
class ControllerState:
    previous_error: float | None = None
    integral: float = 0.0


@dataclass(frozen=True)
class ControllerSpec:
    """Controller kind and its single tuning parameter.

    The parameter is sigma for ``ns``, movement for ``it2`` and threshold for
    ``ds``; ``pi`` and ``t1`` take none.
    """

    kind: str
    param: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown controller kind {self.kind!r}; choose from {KINDS}")
        if self.kind in ("pi", "t1"):
            if self.param is not None:
                raise ValueError(f"{self.kind} takes no parameter")
        else:
            if self.param is None:
                raise ValueError(f"{self.kind} requires a parameter")
            object.__setattr__(
                self, "param", check_nonnegative(self.param, "parameter", allow_inf=self.kind == "ds")
            )

    @property
    def label(self) -> str:
        return self.kind if self.param is None else f"{self.kind}({self.param:g})"


class PIController:
    """Proportional-integral heading controller with integral clamping.

    The command uses the integral accumulated before the current step; the
    integral is then advanced by ``error * dt`` and clamped so that
    ``ki * integral`` stays within the rudder limit.
    """

    mode = "absolute"

    def __init__(self, kp: float = 1.7, ki: float = 0.01, limit: float = 100.0):
        self.kp = kp
        self.ki = ki
        self.limit = limit
        self.state = ControllerState()

    def reset(self):
        self.state = ControllerState()

    def command(self, error: float, dt: float) -> float:
        if not dt > 0:
            raise ValueError("dt must be > 0")
        s = self.state
        u = self.kp * error + self.ki * s.integral
        u = min(max(u, -self.limit), self.limit)
        s.integral += error * dt
        if self.ki > 0:
            cap = self.limit / self.ki
            s.integral = min(max(s.integral, -cap), cap)
        s.previous_error = error
        return u

    def step(self, heading: float, desired: float, dt: float) -> float:
        return self.command(wrap_error(desired, heading), dt)


class FuzzyHeadingController:
    """Stateful wrapper feeding (error, change of error) to a fitted engine.

    The first observed error seeds the memory so the first change is 0. The
    change of error is wrapped into (-180, 180] like the error itself.
    """

    mode = "delta"

    def __init__(self, estimator):
        self.estimator = estimator
        self.state = ControllerState()

    def reset(self):
        self.state = ControllerState()

    def command(self, error: float, dt: float) -> float:
        if not dt > 0:
            raise ValueError("dt must be > 0")
        s = self.state
        prev = error if s.previous_error is None else s.previous_error
        derror = wrap_error(error, prev)
        self.estimator.error_var_.check(error)
        self.estimator.derror_var_.check(derror)
        u = float(self.estimator._outputs(np.array([error]), np.array([derror]))[0])
        s.previous_error = error
        return u

    def step(self, heading: float, desired: float, dt: float) -> float:
        return self.command(wrap_error(desired, heading), dt)


def make_controller(spec: ControllerSpec, seed: int | None = 0, config=None):
    """Fresh controller for ``spec``; ``seed`` feeds the non-stationary stream."""
    kind, p = spec.kind, spec.param
    if kind == "pi":
        ctrl = PIController()
        ctrl.spec = spec
        return ctrl
    if kind == "t1":
        est = Type1FLC(config=config)
    elif kind == "ns":
        est = NonStationaryFLC(sigma=p, random_state=seed, config=config)
    elif kind == "it2":
        est = IntervalType2FLC(movement=p, config=config)
    else:
        est = DualSurfaceFLC(threshold=p, movement=DS_MOVEMENT, config=config)
    ctrl = FuzzyHeadingController(est.fit())
    ctrl.spec = spec
    return ctrl

