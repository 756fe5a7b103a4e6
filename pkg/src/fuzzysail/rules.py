"""Rule tables mapping (error term, change-of-error term) to output singletons."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["RuleBase", "OUTPUT_LABELS", "default_rule_base", "printed_table_rule_base"]

OUTPUT_LABELS = ("SL", "L", "K", "R", "SR")


@dataclass(frozen=True)
class RuleBase:
    """A complete 5x5 rule table with five singleton consequents.

    ``table[i][j]`` is the index into ``singletons`` fired by error term ``i``
    and change-of-error term ``j``. Singletons are rudder change in percent.
    """

    table: tuple[tuple[int, ...], ...]
    singletons: tuple[float, ...] = (-60.0, -30.0, 0.0, 30.0, 60.0)
    _consequents: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        singletons = tuple(float(v) for v in self.singletons)
        if len(table) != 5 or any(len(row) != 5 for row in table):
            raise ValueError("rule table must be 5x5")
        if any(not 0 <= v < 5 for row in table for v in row):
            raise ValueError("rule table entries must index one of 5 singletons")
        if len(singletons) != 5 or any(b <= a for a, b in zip(singletons, singletons[1:])):
            raise ValueError("need 5 strictly increasing singleton values")
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "singletons", singletons)
        cons = np.array(singletons)[np.array(table).ravel()]
        cons.setflags(write=False)
        object.__setattr__(self, "_consequents", cons)

    @property
    def consequents(self) -> np.ndarray:
        """Consequent value of each of the 25 rules, row-major over the table."""
        return self._consequents

    def labelled(self) -> list[list[str]]:
        return [[OUTPUT_LABELS[v] for v in row] for row in self.table]


def default_rule_base(singletons=(-60.0, -30.0, 0.0, 30.0, 60.0)) -> RuleBase:
    """Antisymmetric PD-style table: ``clamp(i + j - 2, 0, 4)``."""
    table = tuple(tuple(min(max(i + j - 2, 0), 4) for j in range(5)) for i in range(5))
    return RuleBase(table, tuple(singletons))


# Entries as printed in the source rule table. Rows there are change-of-error
# terms and columns are error terms listed from LargePositive to
# LargeNegative; "l" is restored where the print shows the digit 1.
_PRINTED = (
    ("SR", "SR", "R", "R", "R"),
    ("K", "L", "R", "K", "K"),
    ("K", "L", "K", "R", "K"),
    ("K", "K", "L", "R", "K"),
    ("L", "L", "L", "SL", "SL"),
)


def printed_table_rule_base(singletons=(-60.0, -30.0, 0.0, 30.0, 60.0)) -> RuleBase:
    """The printed table, transposed into ``table[error][derror]`` order.

    It is internally inconsistent (large negative change of error can map to
    a strong right action) and is shipped only for comparison runs.
    """
    idx = {label: k for k, label in enumerate(OUTPUT_LABELS)}
    table = [[0] * 5 for _ in range(5)]
    for de_i, row in enumerate(_PRINTED):
        for col, label in enumerate(row):
            table[4 - col][de_i] = idx[label]
    return RuleBase(tuple(map(tuple, table)), tuple(singletons))
