import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from fuzzysail.config import FuzzyConfig, builtin
from fuzzysail.estimators import (
    DualSurfaceFLC,
    IntervalType2FLC,
    NonStationaryFLC,
    Type1FLC,
    select_surface,
)
from fuzzysail.sets import OutOfUniverseError

ESTIMATORS = [Type1FLC(), NonStationaryFLC(sigma=5, random_state=0), IntervalType2FLC(movement=5),
              DualSurfaceFLC(threshold=10)]


@pytest.mark.parametrize("est", ESTIMATORS, ids=lambda e: type(e).__name__)
def test_clone_and_params(est):
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert twin is not est


def test_set_params_roundtrip():
    est = IntervalType2FLC().set_params(movement=12.5)
    assert est.get_params()["movement"] == 12.5


@pytest.mark.parametrize("est", ESTIMATORS, ids=lambda e: type(e).__name__)
def test_predict_shape_and_range(est):
    X = np.random.default_rng(0).uniform(-180, 180, size=(40, 2))
    out = clone(est).fit().predict(X)
    assert out.shape == (40,)
    assert np.all(np.abs(out) <= 60)


def test_unfitted_predict_raises():
    with pytest.raises(NotFittedError):
        Type1FLC().predict([[0, 0]])


@pytest.mark.parametrize("X", [[[0, 0, 0]], [[1.0]], [[np.nan, 0]], [[np.inf, 0]]])
def test_bad_input_rejected(X):
    with pytest.raises(ValueError):
        Type1FLC().fit().predict(X)


def test_out_of_universe_rejected():
    with pytest.raises(OutOfUniverseError):
        IntervalType2FLC(movement=5).fit().predict([[200.0, 0.0]])


@pytest.mark.parametrize("est", [IntervalType2FLC(movement=-1), NonStationaryFLC(sigma=-2),
                                 DualSurfaceFLC(threshold=-1), IntervalType2FLC(movement=np.inf),
                                 NonStationaryFLC(sigma=1, ensemble_size=0)],
                         ids=str)
def test_invalid_hyperparameters(est):
    with pytest.raises(ValueError):
        est.fit()


def test_threshold_may_be_infinite():
    assert DualSurfaceFLC(threshold=np.inf).fit().threshold_ == np.inf


def test_config_by_name_and_object():
    a = Type1FLC(config="printed_table").fit()
    b = Type1FLC(config=builtin("printed_table")).fit()
    X = [[40.0, -20.0], [-100.0, 70.0]]
    assert np.array_equal(a.predict(X), b.predict(X))
    assert not np.array_equal(a.predict(X), Type1FLC(config=FuzzyConfig()).fit().predict(X))


def test_predict_interval_orders_ends():
    X = np.random.default_rng(1).uniform(-180, 180, size=(100, 2))
    y_l, y_r = IntervalType2FLC(movement=15).fit().predict_interval(X)
    assert np.all(y_l <= y_r)


def test_ns_refit_restarts_stream():
    est = NonStationaryFLC(sigma=10, random_state=7)
    X = [[12.0, 3.0]]
    first = est.fit().predict(X)
    assert np.array_equal(est.fit().predict(X), first)
    assert not np.array_equal(est.predict(X), first)


@pytest.mark.parametrize("e, expected", [(1.0, 5.0), (10.0, -10.0), (-10.0, 20.0)])
def test_select_surface_examples(e, expected):
    assert select_surface(e, -10.0, 20.0, 5.0) == expected


@given(st.floats(-180, 180, allow_nan=False), st.floats(0, 200, allow_nan=False),
       st.floats(-60, 60, allow_nan=False), st.floats(-60, 60, allow_nan=False))
def test_select_surface_branches(e, threshold, ls, us):
    out = float(select_surface(e, ls, us, threshold))
    if abs(e) < threshold:
        assert out == (ls + us) / 2
    elif e > 0:
        assert out == ls
    else:
        assert out == us


def test_select_surface_threshold_zero():
    e = np.array([-3.0, 0.0, 2.0])
    out = select_surface(e, np.full(3, -7.0), np.full(3, 9.0), 0.0)
    assert out.tolist() == [9.0, 9.0, -7.0]
