import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fuzzysail.config import ConfigError, FuzzyConfig, builtin, dumps, load, loads
from fuzzysail.rules import OUTPUT_LABELS, RuleBase, default_rule_base, printed_table_rule_base


def test_default_table_is_antisymmetric_pd():
    rb = default_rule_base()
    for i in range(5):
        for j in range(5):
            assert rb.table[i][j] == min(max(i + j - 2, 0), 4)
            assert rb.table[4 - i][4 - j] == 4 - rb.table[i][j]


def test_default_singletons():
    assert default_rule_base().singletons == (-60.0, -30.0, 0.0, 30.0, 60.0)


def test_consequents_row_major():
    rb = default_rule_base()
    y = rb.consequents
    assert y.shape == (25,)
    assert y[0] == -60.0 and y[12] == 0.0 and y[24] == 60.0
    assert y[4] == 0.0  # (LargeNegative error, LargePositive change)


def test_labelled_view():
    lab = default_rule_base().labelled()
    assert lab[2][2] == "K"
    assert lab[4][2] == "SR"
    assert set(sum(lab, [])) <= set(OUTPUT_LABELS)


@pytest.mark.parametrize("table, singletons", [
    ([[0] * 5] * 4, (-60, -30, 0, 30, 60)),
    ([[0] * 5] * 5, (-60, -30, 0, 0, 60)),
    ([[5] * 5] * 5, (-60, -30, 0, 30, 60)),
])
def test_invalid_rule_bases(table, singletons):
    with pytest.raises(ValueError):
        RuleBase(tuple(map(tuple, table)), tuple(singletons))


def test_printed_table_transposition():
    rb = printed_table_rule_base()
    lab = rb.labelled()
    # first printed row lists LargePositive..LargeNegative error columns
    assert [lab[4 - c][0] for c in range(5)] == ["SR", "SR", "R", "R", "R"]
    assert [lab[4 - c][4] for c in range(5)] == ["L", "L", "L", "SL", "SL"]


def test_builtin_configs():
    assert builtin("default") == FuzzyConfig()
    assert builtin("printed_table").rules == printed_table_rule_base()


def test_roundtrip_text():
    cfg = builtin("printed_table")
    assert loads(dumps(cfg)) == cfg


@given(st.lists(st.integers(0, 4), min_size=25, max_size=25),
       st.lists(st.floats(-100, 100, allow_nan=False), min_size=5, max_size=5, unique=True))
def test_roundtrip_random_rules(entries, values):
    table = tuple(tuple(entries[5 * i:5 * i + 5]) for i in range(5))
    cfg = FuzzyConfig(rules=RuleBase(table, tuple(sorted(values))))
    assert loads(dumps(cfg)) == cfg


def test_load_from_file(tmp_path):
    path = tmp_path / "x.fis"
    path.write_text(dumps(FuzzyConfig()))
    assert load(path) == FuzzyConfig()


def test_partial_file_falls_back_to_defaults():
    cfg = loads("[rules]\nsingletons -50 -20 0 20 50\n" + "K K K K K\n" * 5)
    assert cfg.error_var == FuzzyConfig().error_var
    assert cfg.rules.singletons == (-50.0, -20.0, 0.0, 20.0, 50.0)
    assert np.all(cfg.rules.consequents == 0.0)


def test_index_entries_accepted():
    text = "[rules]\nsingletons -60 -30 0 30 60\n" + "0 1 2 3 4\n" * 5
    assert loads(text).rules.table[3] == (0, 1, 2, 3, 4)


@pytest.mark.parametrize("text", [
    "[error]\nuniverse -180 180\nA -180 -180 -90 -30\n",
    "[rules]\nsingletons 1 2 3\n",
    "[rules]\nsingletons -60 -30 0 30 60\n" + "K K K K X\n" * 5,
    "[bogus]\n",
    "[error]\nuniverse -180 180\n" + "A 0 1 2 nope\n" * 5,
    "stray line\n",
])
def test_malformed_config(text):
    with pytest.raises(ConfigError):
        loads(text)
