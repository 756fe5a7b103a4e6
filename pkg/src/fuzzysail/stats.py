"""Two-sided Mann-Whitney U test.

Small samples (combined size up to ``EXACT_LIMIT``) get the exact
permutation distribution of U over mid-ranks, so ties are handled exactly.
Larger samples use the normal approximation with tie and continuity
corrections.
"""

from __future__ import annotations

import itertools
import math
from typing import NamedTuple, Sequence

EXACT_LIMIT = 16


class MannWhitneyResult(NamedTuple):
    u: float
    p: float
    method: str


def midranks(values: Sequence[float]) -> list[float]:
    """1-based ranks, ties sharing the mean of their positions."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _tie_term(values) -> float:
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return float(sum(t ** 3 - t for t in counts.values()))


def mann_whitney(a: Sequence[float], b: Sequence[float],
                 exact_limit: int = EXACT_LIMIT) -> MannWhitneyResult:
    """U statistic of ``a`` and its two-sided p-value against ``b``."""
    a = [float(v) for v in a]
    b = [float(v) for v in b]
    na, nb = len(a), len(b)
    if na < 1 or nb < 1:
        raise ValueError("both samples need at least one value")
    if any(math.isnan(v) for v in a + b):
        raise ValueError("samples contain NaN")
    combined = a + b
    ranks = midranks(combined)
    u = math.fsum(ranks[:na]) - na * (na + 1) / 2
    mean = na * nb / 2
    n = na + nb

    if n <= exact_limit:
        # doubled mid-ranks are integers, so the enumeration compares exactly
        doubled = [int(round(2 * r)) for r in ranks]
        observed = abs(2 * sum(doubled[:na]) - na * (na + 1) * 2 - 4 * mean)
        hits = total = 0
        for combo in itertools.combinations(doubled, na):
            total += 1
            if abs(2 * sum(combo) - na * (na + 1) * 2 - 4 * mean) >= observed:
                hits += 1
        return MannWhitneyResult(u, hits / total, "exact")

    var = na * nb / 12 * ((n + 1) - _tie_term(combined) / (n * (n - 1)))
    if var <= 0:
        return MannWhitneyResult(u, 1.0, "normal")
    z = max(abs(u - mean) - 0.5, 0.0) / math.sqrt(var)
    return MannWhitneyResult(u, min(1.0, math.erfc(z / math.sqrt(2))), "normal")
