"""Type-1, non-stationary, interval type-2 and dual-surface fuzzy heading
control on a deterministic sailing simulator."""

from .controllers import ControllerSpec, PIController, make_controller, wrap_error
from .estimators import DualSurfaceFLC, IntervalType2FLC, NonStationaryFLC, Type1FLC
from .sim import EpisodeConfig, NoiseLevel, run_episode

__version__ = "0.1.0"

__all__ = [
    "ControllerSpec",
    "PIController",
    "make_controller",
    "wrap_error",
    "Type1FLC",
    "NonStationaryFLC",
    "IntervalType2FLC",
    "DualSurfaceFLC",
    "EpisodeConfig",
    "NoiseLevel",
    "run_episode",
]
