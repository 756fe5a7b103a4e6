"""Desk-scale sailing simulator for heading-controller experiments.

Conventions: compass degrees clockwise from north, ``x`` east and ``y``
north in metres, wind direction is where the wind blows from. The boat
starts at the origin and sails for a single waypoint.

Wind shifts also yaw the boat by ``shift_yaw_gain`` times the shift. This
coupling lives in the episode loop rather than in :func:`physics_step`,
which on its own never turns the boat without rudder.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .controllers import wrap_error
from .metrics import rmse

__all__ = [
    "NoiseLevel",
    "PhysicsParams",
    "BoatState",
    "WindModel",
    "EpisodeConfig",
    "TackMemory",
    "TraceRow",
    "RunRecord",
    "polar_speed",
    "sail_rule",
    "sail_efficiency",
    "true_wind_angle",
    "physics_step",
    "tack_supervisor",
    "bearing_to",
    "run_episode",
    "write_trace",
    "write_summary",
    "TRACE_HEADER",
]


def compass(angle: float) -> float:
    """Angle reduced to [0, 360); tiny negatives would otherwise give 360.0."""
    a = angle % 360.0
    return 0.0 if a == 360.0 else a


class NoiseLevel(enum.Enum):
    LOW = ("low", 0.0, None)
    MEDIUM = ("med", 20.0, 5.0)
    HIGH = ("high", 30.0, 3.0)

    def __init__(self, short, arc, period):
        self.short = short
        self.arc = arc
        self.period = period

    @classmethod
    def parse(cls, name: str) -> "NoiseLevel":
        key = name.strip().lower()
        aliases = {"low": cls.LOW, "med": cls.MEDIUM, "medium": cls.MEDIUM, "high": cls.HIGH}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown noise level {name!r}; use low, med or high") from None


@dataclass(frozen=True)
class PhysicsParams:
    rudder_gain: float = 10.0  # deg/s per m/s of speed at full rudder
    speed_tau: float = 3.0  # s
    polar_angles: tuple[float, ...] = (0.0, 45.0, 90.0, 110.0, 135.0, 180.0)
    polar_factors: tuple[float, ...] = (0.0, 0.0, 0.5, 0.55, 0.45, 0.35)
    shift_yaw_gain: float = 0.5


DEFAULT_PHYSICS = PhysicsParams()


@dataclass(frozen=True)
class BoatState:
    x: float = 0.0
    y: float = 0.0
    heading: float = 0.0
    speed: float = 0.0
    rudder: float = 0.0
    sail_angle: float = 90.0


class WindModel:
    """Wind direction held constant between periodic uniform resamples.

    The direction stays within ``base_direction +/- arc / 2``; resampling
    happens at every multiple of ``change_period`` seconds.
    """

    def __init__(self, base_direction: float, speed: float = 7.0, arc: float = 0.0,
                 change_period: float | None = None, rng_seed: int = 0):
        if arc < 0:
            raise ValueError("arc must be >= 0")
        if arc > 0 and not (change_period and change_period > 0):
            raise ValueError("a non-zero arc needs a positive change_period")
        self.base_direction = compass(float(base_direction))
        self.speed = float(speed)
        self.arc = float(arc)
        self.change_period = change_period
        self.rng = np.random.default_rng(rng_seed)
        self.direction = self.base_direction
        self._next_change = change_period if arc > 0 else math.inf
        self._last_t = 0.0

    @classmethod
    def for_noise(cls, noise: NoiseLevel, base_direction: float, speed: float = 7.0,
                  rng_seed: int = 0) -> "WindModel":
        return cls(base_direction, speed, noise.arc, noise.period, rng_seed)

    def resample(self) -> float:
        half = self.arc / 2
        self.direction = compass(self.base_direction + self.rng.uniform(-half, half))
        return self.direction

    def step(self, t: float) -> float:
        """Direction at time ``t``; ``t`` must not decrease between calls."""
        if t < self._last_t:
            raise ValueError("wind time must be nondecreasing")
        self._last_t = t
        while t >= self._next_change - 1e-9:
            self.resample()
            self._next_change += self.change_period
        return self.direction


def polar_speed(true_wind_angle: float, wind_speed: float,
                params: PhysicsParams = DEFAULT_PHYSICS) -> float:
    """Target boat speed; zero inside the no-go zone."""
    factor = float(np.interp(true_wind_angle, params.polar_angles, params.polar_factors))
    return wind_speed * factor


def sail_rule(true_wind_angle: float) -> float:
    return min(max(true_wind_angle / 2.0, 15.0), 90.0)


def sail_efficiency(sail_angle: float, true_wind_angle: float) -> float:
    return max(0.0, math.cos(math.radians(sail_angle - sail_rule(true_wind_angle))))


def true_wind_angle(heading: float, wind_from: float) -> float:
    return abs(wrap_error(wind_from, heading))


def physics_step(state: BoatState, wind_from: float, wind_speed: float, dt: float,
                 params: PhysicsParams = DEFAULT_PHYSICS) -> BoatState:
    """Advance one explicit-Euler step; speed relaxes exponentially."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    twa = true_wind_angle(state.heading, wind_from)
    target = polar_speed(twa, wind_speed, params) * sail_efficiency(state.sail_angle, twa)
    turn_rate = params.rudder_gain * (state.rudder / 100.0) * state.speed
    h = math.radians(state.heading)
    return replace(
        state,
        x=state.x + state.speed * math.sin(h) * dt,
        y=state.y + state.speed * math.cos(h) * dt,
        heading=compass(state.heading + turn_rate * dt),
        speed=max(0.0, target + (state.speed - target) * math.exp(-dt / params.speed_tau)),
    )


def bearing_to(x: float, y: float, target: tuple[float, float]) -> float:
    return compass(math.degrees(math.atan2(target[0] - x, target[1] - y)))


@dataclass
class TackMemory:
    """Tack side and course geometry kept by the tacking supervisor.

    ``side`` is +1 on starboard (wind direction + close-hauled angle), -1 on
    port and ``None`` when not tacking.
    """

    origin: tuple[float, float] = (0.0, 0.0)
    waypoint: tuple[float, float] = (-550.0, 0.0)
    side: int | None = None
    no_go: float = 45.0
    close_hauled: float = 50.0
    hysteresis: float = 40.0

    def cross_track(self, x: float, y: float) -> float:
        """Signed distance from the course line, positive to its right."""
        theta = math.radians(bearing_to(*self.origin, self.waypoint))
        return (x - self.origin[0]) * math.cos(theta) - (y - self.origin[1]) * math.sin(theta)


def tack_supervisor(desired_bearing: float, wind_from: float, state: BoatState,
                    memory: TackMemory) -> float:
    """Bearing to hand to the controller, replacing upwind targets."""
    off = wrap_error(desired_bearing, wind_from)
    if abs(off) > memory.no_go:
        memory.side = None
        return desired_bearing
    if memory.side is None:
        memory.side = 1 if off >= 0 else -1
    course = bearing_to(*memory.origin, memory.waypoint)
    xt = memory.cross_track(state.x, state.y)
    heading = wind_from + memory.side * memory.close_hauled
    drift = math.sin(math.radians(heading - course))
    if abs(xt) > memory.hysteresis and xt * drift > 0:
        memory.side = -memory.side
        heading = wind_from + memory.side * memory.close_hauled
    return compass(heading)


@dataclass(frozen=True)
class EpisodeConfig:
    waypoint: tuple[float, float] = (-550.0, 0.0)
    completion_radius: float = 10.0
    timeout: float = 600.0
    physics_dt: float = 0.1
    control_period: float = 1.0
    seed: int = 0
    wind_from: float = 120.0
    wind_speed: float = 7.0
    start_heading: float = 270.0
    physics: PhysicsParams = field(default_factory=PhysicsParams)

    def __post_init__(self):
        if not (self.physics_dt > 0 and self.control_period > 0 and self.timeout > 0):
            raise ValueError("time steps and timeout must be positive")
        ratio = self.control_period / self.physics_dt
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ValueError("control_period must be an integer multiple of physics_dt")

    @property
    def steps_per_control(self) -> int:
        return int(round(self.control_period / self.physics_dt))


class TraceRow(NamedTuple):
    t: float
    heading: float
    desired: float
    error: float
    rudder: float
    wind_dir: float
    x: float
    y: float


TRACE_HEADER = TraceRow._fields


@dataclass
class RunRecord:
    controller: str
    param: float | None
    noise: str
    seed: int
    completed: bool
    time_taken: float
    rmse: float
    trace: list[TraceRow] = field(default_factory=list, repr=False)
    aborted: str | None = None
    final_distance: float = math.nan


def _controller_label(controller):
    spec = getattr(controller, "spec", None)
    if spec is not None:
        return spec.kind, spec.param
    return type(controller).__name__, None


def run_episode(controller, cfg: EpisodeConfig, noise: NoiseLevel, label=None) -> RunRecord:
    """Sail one episode, invoking ``controller`` every control period.

    ``controller.step(heading, desired, dt)`` returns a rudder command that is
    treated as a change or an absolute position according to
    ``controller.mode``. A controller with an ``observe(t, state, wind_dir,
    wind_speed)`` method is shown the full observation first. The episode
    ends inside the completion radius or at the timeout; an exception from the controller aborts it and the record
    is flagged incomplete.
    """
    kind, param = label or _controller_label(controller)
    wind = WindModel.for_noise(noise, cfg.wind_from, cfg.wind_speed, rng_seed=(cfg.seed, 1))
    memory = TackMemory(waypoint=cfg.waypoint)
    params = cfg.physics
    state = BoatState(heading=compass(cfg.start_heading))
    state = replace(state, sail_angle=sail_rule(true_wind_angle(state.heading, wind.direction)))
    spc = cfg.steps_per_control
    n_max = int(round(cfg.timeout / cfg.physics_dt))
    trace: list[TraceRow] = []
    completed = False
    aborted = None
    elapsed = cfg.timeout
    prev_wind = wind.direction
    observe = getattr(controller, "observe", None)

    for step in range(n_max):
        t = round(step * cfg.physics_dt, 9)
        wind_dir = wind.step(t)
        if wind_dir != prev_wind:
            kick = params.shift_yaw_gain * wrap_error(wind_dir, prev_wind)
            state = replace(state, heading=compass(state.heading + kick))
            prev_wind = wind_dir
        if step % spc == 0:
            desired = bearing_to(state.x, state.y, cfg.waypoint)
            commanded = tack_supervisor(desired, wind_dir, state, memory)
            try:
                if observe is not None:
                    observe(t, state, wind_dir, wind.speed)
                u = float(controller.step(state.heading, commanded, cfg.control_period))
                mode = controller.mode
            except Exception as exc:  # noqa: BLE001 - any controller failure ends the run
                aborted = f"{type(exc).__name__}: {exc}"
                break
            if not math.isfinite(u):
                aborted = f"non-finite rudder command {u!r}"
                break
            rudder = state.rudder + u if mode == "delta" else u
            rudder = min(max(rudder, -100.0), 100.0)
            twa = true_wind_angle(state.heading, wind_dir)
            state = replace(state, rudder=rudder, sail_angle=sail_rule(twa))
            trace.append(TraceRow(
                t, state.heading, commanded, wrap_error(commanded, state.heading),
                rudder, wind_dir, state.x, state.y,
            ))
        state = physics_step(state, wind_dir, wind.speed, cfg.physics_dt, params)
        dist = math.hypot(state.x - cfg.waypoint[0], state.y - cfg.waypoint[1])
        if dist <= cfg.completion_radius:
            completed = True
            elapsed = round((step + 1) * cfg.physics_dt, 9)
            break

    dist = math.hypot(state.x - cfg.waypoint[0], state.y - cfg.waypoint[1])
    score = rmse(r.error for r in trace) if trace else math.nan
    return RunRecord(kind, param, noise.short, cfg.seed, completed, elapsed, score,
                     trace, aborted, dist)


def write_trace(record: RunRecord, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for row in record.trace:
            writer.writerow([repr(float(v)) for v in row])


SUMMARY_HEADER = ("controller", "parameter", "noise", "seed", "completed", "time_taken",
                  "rmse", "steps")


def write_summary(record: RunRecord, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        writer.writerow([
            record.controller,
            "N/A" if record.param is None else repr(float(record.param)),
            record.noise, record.seed, int(record.completed),
            repr(float(record.time_taken)), repr(float(record.rmse)), len(record.trace),
        ])
