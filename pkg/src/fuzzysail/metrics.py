"""Per-run performance metrics."""

from __future__ import annotations

import math
from typing import Iterable


def rmse(errors: Iterable[float]) -> float:
    """Root mean square of heading errors in degrees."""
    errors = list(errors)
    if not errors:
        raise ValueError("rmse of an empty trace")
    return math.sqrt(math.fsum(e * e for e in errors) / len(errors))
