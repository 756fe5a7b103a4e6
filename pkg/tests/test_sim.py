import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzzysail.controllers import ControllerSpec, make_controller
from fuzzysail.sim import (
    TRACE_HEADER,
    BoatState,
    EpisodeConfig,
    NoiseLevel,
    PhysicsParams,
    TackMemory,
    WindModel,
    bearing_to,
    physics_step,
    polar_speed,
    run_episode,
    sail_efficiency,
    sail_rule,
    tack_supervisor,
    write_summary,
    write_trace,
)


class Constant:
    """Controller that always sends the same command."""

    def __init__(self, u=0.0, mode="delta"):
        self.u, self.mode = u, mode

    def step(self, heading, desired, dt):
        return self.u


class Exploding:
    mode = "delta"

    def __init__(self, after=3, value=None):
        self.calls, self.after, self.value = 0, after, value

    def step(self, heading, desired, dt):
        self.calls += 1
        if self.calls > self.after:
            if self.value is None:
                raise RuntimeError("boom")
            return self.value
        return 0.0


def test_noise_presets():
    assert [(n.short, n.arc, n.period) for n in NoiseLevel] == [
        ("low", 0.0, None), ("med", 20.0, 5.0), ("high", 30.0, 3.0)]
    assert NoiseLevel.parse("Medium") is NoiseLevel.MEDIUM
    with pytest.raises(ValueError):
        NoiseLevel.parse("extreme")


def test_wind_low_noise_constant():
    wind = WindModel.for_noise(NoiseLevel.LOW, 120.0)
    assert {wind.step(t / 10) for t in range(5000)} == {120.0}


def test_wind_medium_changes_at_period():
    wind = WindModel.for_noise(NoiseLevel.MEDIUM, 120.0, rng_seed=4)
    assert wind.step(4.9) == 120.0
    changed = wind.step(5.0)
    assert changed != 120.0 and abs(changed - 120.0) <= 10.0
    assert wind.step(9.9) == changed


def test_wind_high_statistics():
    wind = WindModel.for_noise(NoiseLevel.HIGH, 120.0, rng_seed=12)
    dirs = np.array([wind.resample() for _ in range(10_000)])
    assert dirs.min() >= 105.0 and dirs.max() <= 135.0
    assert abs(dirs.mean() - 120.0) < 0.5


def test_wind_time_must_not_decrease():
    wind = WindModel.for_noise(NoiseLevel.HIGH, 120.0)
    wind.step(5.0)
    with pytest.raises(ValueError):
        wind.step(4.0)


@given(st.integers(0, 2**32), st.sampled_from([NoiseLevel.MEDIUM, NoiseLevel.HIGH]),
       st.floats(0, 359.9))
def test_wind_containment(seed, noise, base):
    wind = WindModel.for_noise(noise, base, rng_seed=seed)
    for t in range(0, 120, 3):
        off = (wind.step(float(t)) - base + 180) % 360 - 180
        assert abs(off) <= noise.arc / 2 + 1e-9


@pytest.mark.parametrize("twa, expected", [(0, 0.0), (45, 0.0), (90, 3.5)])
def test_polar_examples(twa, expected):
    assert polar_speed(twa, 7.0) == pytest.approx(expected)


@given(st.floats(0, 180))
def test_polar_energy_bound(twa):
    assert 0.0 <= polar_speed(twa, 7.0) <= 0.55 * 7.0 + 1e-12


@pytest.mark.parametrize("twa, expected", [(180, 90), (60, 30), (10, 15)])
def test_sail_rule(twa, expected):
    assert sail_rule(twa) == expected


def test_sail_efficiency_peaks_on_rule():
    assert sail_efficiency(sail_rule(100), 100) == 1.0
    assert sail_efficiency(sail_rule(100) + 90, 100) == pytest.approx(0.0, abs=1e-15)


def test_physics_neutral_rudder_keeps_heading():
    s = BoatState(heading=33.0, speed=3.0, rudder=0.0)
    assert physics_step(s, 120.0, 7.0, 0.7).heading == 33.0


def test_physics_no_steerage_without_speed():
    s = BoatState(heading=33.0, speed=0.0, rudder=100.0)
    assert physics_step(s, 120.0, 7.0, 1.0).heading == 33.0


def test_physics_full_rudder_turn():
    s = BoatState(heading=0.0, speed=2.0, rudder=100.0)
    assert physics_step(s, 120.0, 7.0, 1.0).heading == pytest.approx(20.0)


def test_physics_head_to_wind_decelerates():
    s = BoatState(heading=120.0, speed=3.0, rudder=0.0, sail_angle=15.0)
    speeds = []
    for _ in range(100):
        s = physics_step(s, 120.0, 7.0, 0.1)
        speeds.append(s.speed)
    assert all(b < a for a, b in zip(speeds, speeds[1:]))


def test_physics_position_convention():
    east = physics_step(BoatState(heading=90.0, speed=2.0), 0.0, 7.0, 1.0)
    assert east.x == pytest.approx(2.0) and east.y == pytest.approx(0.0, abs=1e-12)
    assert bearing_to(0, 0, (-550, 0)) == 270.0


@given(st.floats(0, 359.9), st.floats(0, 3.85), st.floats(-100, 100), st.floats(0, 90),
       st.floats(0, 359.9))
def test_physics_invariants(heading, speed, rudder, sail, wind_from):
    s = physics_step(BoatState(heading=heading, speed=speed, rudder=rudder, sail_angle=sail),
                     wind_from, 7.0, 0.1)
    assert 0 <= s.heading < 360
    assert 0 <= s.speed <= 3.85 + 1e-12
    assert math.isfinite(s.x) and math.isfinite(s.y)


def test_supervisor_pass_through():
    mem = TackMemory()
    assert tack_supervisor(30.0, 120.0, BoatState(), mem) == 30.0
    assert mem.side is None


def test_supervisor_close_hauled_on_active_tack():
    mem = TackMemory(side=1)
    assert tack_supervisor(270.0, 270.0, BoatState(), mem) == 320.0


def test_supervisor_flips_past_hysteresis():
    mem = TackMemory(side=1)
    # course runs west; positive cross-track lies north of it
    assert mem.cross_track(-100.0, 41.0) == pytest.approx(41.0)
    out = tack_supervisor(270.0, 270.0, BoatState(x=-100.0, y=41.0), mem)
    assert out == 220.0 and mem.side == -1


def test_supervisor_holds_inside_hysteresis():
    mem = TackMemory(side=1)
    assert tack_supervisor(270.0, 270.0, BoatState(x=-100.0, y=39.0), mem) == 320.0


def test_episode_config_validation():
    with pytest.raises(ValueError):
        EpisodeConfig(control_period=0.25, physics_dt=0.1)
    assert EpisodeConfig().steps_per_control == 10


def test_t1_low_noise_completes():
    rec = run_episode(make_controller(ControllerSpec("t1")), EpisodeConfig(seed=1), NoiseLevel.LOW)
    assert rec.completed
    assert rec.time_taken < 600
    assert rec.final_distance <= 10.0
    assert rec.aborted is None


def test_zero_controller_from_north_never_arrives():
    cfg = EpisodeConfig(start_heading=0.0)
    rec = run_episode(Constant(0.0), cfg, NoiseLevel.LOW)
    assert not rec.completed
    assert rec.time_taken == 600.0
    assert len(rec.trace) == 600


@pytest.mark.parametrize("noise", list(NoiseLevel), ids=lambda n: n.short)
def test_episode_deterministic(noise):
    a = run_episode(make_controller(ControllerSpec("ns", 5.0), seed=2), EpisodeConfig(seed=3), noise)
    b = run_episode(make_controller(ControllerSpec("ns", 5.0), seed=2), EpisodeConfig(seed=3), noise)
    assert a == b


def test_trace_rows_and_rudder_clamp():
    rec = run_episode(Constant(35.0), EpisodeConfig(timeout=30.0), NoiseLevel.HIGH)
    assert len(rec.trace) == 30
    assert [r.t for r in rec.trace[:3]] == [0.0, 1.0, 2.0]
    assert all(-100 <= r.rudder <= 100 for r in rec.trace)
    assert rec.trace[-1].rudder == 100.0


def test_absolute_mode_sets_rudder():
    rec = run_episode(Constant(-40.0, mode="absolute"), EpisodeConfig(timeout=5.0), NoiseLevel.LOW)
    assert {r.rudder for r in rec.trace} == {-40.0}


def test_rmse_matches_trace():
    rec = run_episode(make_controller(ControllerSpec("pi")), EpisodeConfig(seed=5), NoiseLevel.HIGH)
    errs = np.array([r.error for r in rec.trace])
    assert rec.rmse == pytest.approx(math.sqrt(np.mean(errs ** 2)), rel=1e-12)
    assert rec.rmse >= abs(errs.mean())


@pytest.mark.parametrize("ctrl", [Exploding(), Exploding(value=math.nan)], ids=["raise", "nan"])
def test_controller_failure_aborts(ctrl):
    rec = run_episode(ctrl, EpisodeConfig(), NoiseLevel.LOW)
    assert not rec.completed
    assert rec.aborted
    assert len(rec.trace) == 3


def test_noise_moves_the_boat_off_course():
    low = run_episode(make_controller(ControllerSpec("t1")), EpisodeConfig(seed=1), NoiseLevel.LOW)
    high = run_episode(make_controller(ControllerSpec("t1")), EpisodeConfig(seed=1), NoiseLevel.HIGH)
    assert high.rmse > low.rmse


def test_shift_kick_can_be_disabled():
    cfg = EpisodeConfig(seed=1, physics=PhysicsParams(shift_yaw_gain=0.0))
    rec = run_episode(make_controller(ControllerSpec("t1")), cfg, NoiseLevel.HIGH)
    assert rec.rmse < 1e-6


def test_trace_and_summary_csv(tmp_path):
    rec = run_episode(make_controller(ControllerSpec("t1")), EpisodeConfig(seed=1), NoiseLevel.MEDIUM)
    write_trace(rec, tmp_path / "t.csv")
    write_summary(rec, tmp_path / "s.csv")
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == ",".join(TRACE_HEADER) == "t,heading,desired,error,rudder,wind_dir,x,y"
    assert len(lines) == len(rec.trace) + 1
    row = [float(v) for v in lines[5].split(",")]
    assert tuple(row) == tuple(rec.trace[4])
    summary = (tmp_path / "s.csv").read_text().splitlines()
    assert summary[0].startswith("controller,parameter,noise,seed,completed")
    assert summary[1].startswith("t1,N/A,med,1,1,")
