"""Estimator-style wrappers around the fuzzy engines.

Each estimator maps rows of ``X = [[error, derror], ...]`` (degrees) to a
rudder change in percent. ``fit`` only resolves and validates the
configuration; there is nothing to learn, so ``y`` is ignored.

>>> est = IntervalType2FLC(movement=10).fit()
>>> est.predict([[0.0, 0.0]])
array([0.])
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import inference
from ._validation import check_error_pairs, check_nonnegative, resolve_config
from .sets import footprint

__all__ = ["Type1FLC", "NonStationaryFLC", "IntervalType2FLC", "DualSurfaceFLC"]


class _FuzzyController(BaseEstimator):
    def fit(self, X=None, y=None):
        cfg = resolve_config(self.config)
        self.error_var_ = cfg.error_var
        self.derror_var_ = cfg.derror_var
        self.rules_ = cfg.rules
        self._validate_extra()
        return self

    def _validate_extra(self):
        pass

    def predict(self, X):
        check_is_fitted(self, "rules_")
        e, de = check_error_pairs(X, self.error_var_, self.derror_var_)
        return self._outputs(e, de)

    def _outputs(self, e, de):
        raise NotImplementedError

    def output_range(self):
        check_is_fitted(self, "rules_")
        return self.rules_.singletons[0], self.rules_.singletons[-1]


class Type1FLC(_FuzzyController):
    """Type-1 controller with min conjunction and height defuzzification.

    Parameters
    ----------
    config : FuzzyConfig, str or path, optional
        Sets and rule table; ``None`` uses the built-in defaults.
    """

    def __init__(self, config=None):
        self.config = config

    def _outputs(self, e, de):
        return inference.t1_outputs(self.error_var_, self.derror_var_, self.rules_, e, de)


class NonStationaryFLC(_FuzzyController):
    """Ensemble of randomly shifted type-1 systems, averaged.

    Every call to ``predict`` draws fresh instantiations from the stream
    created by ``fit``, so refitting replays the same outputs.

    Parameters
    ----------
    sigma : float
        Standard deviation in degrees of the horizontal shift.
    ensemble_size : int
        Instantiations averaged per input row.
    random_state : int or None
        Seed of the draw stream.
    shared_shift : bool
        One draw per variable per instantiation instead of one per term.
    config : FuzzyConfig, str or path, optional
    """

    def __init__(self, sigma=0.0, ensemble_size=30, random_state=None,
                 shared_shift=False, config=None):
        self.sigma = sigma
        self.ensemble_size = ensemble_size
        self.random_state = random_state
        self.shared_shift = shared_shift
        self.config = config

    def _validate_extra(self):
        self.ns_config_ = inference.NSConfig(
            check_nonnegative(self.sigma, "sigma"),
            self.ensemble_size,
            0 if self.random_state is None else int(self.random_state),
            bool(self.shared_shift),
        )
        self.rng_ = np.random.default_rng(self.random_state)

    def _outputs(self, e, de):
        return inference.ns_outputs(
            self.error_var_, self.derror_var_, self.rules_, self.ns_config_, self.rng_, e, de
        )


class IntervalType2FLC(_FuzzyController):
    """Interval type-2 controller with Karnik-Mendel type reduction.

    ``predict`` returns the midpoint of the type-reduced interval.

    Parameters
    ----------
    movement : float
        Width in degrees of the footprint of uncertainty at flat points.
    config : FuzzyConfig, str or path, optional
    """

    def __init__(self, movement=0.0, config=None):
        self.movement = movement
        self.config = config

    def _validate_extra(self):
        self.movement_ = check_nonnegative(self.movement, "movement")
        self.error_pairs_ = footprint(self.error_var_, self.movement_)
        self.derror_pairs_ = footprint(self.derror_var_, self.movement_)

    def _bounds(self, e, de):
        return inference.it2_bounds(
            self.error_var_, self.derror_var_, self.rules_, self.movement_, e, de
        )

    def predict_interval(self, X):
        """Lower and upper type-reduced outputs, each of shape ``(n,)``."""
        check_is_fitted(self, "rules_")
        e, de = check_error_pairs(X, self.error_var_, self.derror_var_)
        return self._bounds(e, de)

    def _outputs(self, e, de):
        y_l, y_r = self._bounds(e, de)
        return (y_l + y_r) / 2


class DualSurfaceFLC(IntervalType2FLC):
    """Switches between the lower surface, upper surface and their mean.

    Inside ``|error| < threshold`` the mean is used; otherwise a positive
    error selects the lower surface and a non-positive error the upper one.

    Parameters
    ----------
    threshold : float
        Error magnitude in degrees below which the mean is used; may be inf.
    movement : float
        Footprint width, 5 degrees in the reference experiments.
    config : FuzzyConfig, str or path, optional
    """

    def __init__(self, threshold=5.0, movement=5.0, config=None):
        self.threshold = threshold
        self.movement = movement
        self.config = config

    def _validate_extra(self):
        super()._validate_extra()
        self.threshold_ = check_nonnegative(self.threshold, "threshold", allow_inf=True)

    def _outputs(self, e, de):
        y_l, y_r = self._bounds(e, de)
        return select_surface(e, y_l, y_r, self.threshold_)


def select_surface(error, lower, upper, threshold):
    """Three-way choice between ``lower``, ``upper`` and their mean."""
    error = np.asarray(error, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    out = np.where(error > 0, lower, upper)
    return np.where(np.abs(error) < threshold, (lower + upper) / 2, out)
