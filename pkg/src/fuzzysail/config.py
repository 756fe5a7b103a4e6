"""Plain-text format for linguistic variables and rule tables.

Grammar (``#`` starts a comment, blank lines are ignored)::

    [error]                       # also [derror]
    universe <lo> <hi>
    <label> <a> <b> <c> <d>       # exactly five term lines, left to right

    [rules]
    singletons <y0> <y1> <y2> <y3> <y4>
    <o00> <o01> <o02> <o03> <o04> # five rows, one per error term;
    ...                           # columns follow the derror terms

Table entries are output labels (SL L K R SR) or integer indices 0-4.
Sections may appear in any order; a missing section falls back to the
built-in default.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .rules import OUTPUT_LABELS, RuleBase, default_rule_base
from .sets import LinguisticVariable, PiecewiseLinearMF, default_partition

__all__ = ["FuzzyConfig", "ConfigError", "loads", "load", "dumps", "builtin"]


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FuzzyConfig:
    error_var: LinguisticVariable = field(default_factory=lambda: default_partition("error"))
    derror_var: LinguisticVariable = field(default_factory=lambda: default_partition("derror"))
    rules: RuleBase = field(default_factory=default_rule_base)


def _floats(tokens, lineno):
    try:
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: {exc}") from None


def _entry(token, lineno):
    if token.upper() in OUTPUT_LABELS:
        return OUTPUT_LABELS.index(token.upper())
    try:
        return int(token)
    except ValueError:
        raise ConfigError(f"line {lineno}: bad table entry {token!r}") from None


def loads(text: str) -> FuzzyConfig:
    sections: dict[str, list[tuple[int, list[str]]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in ("error", "derror", "rules"):
                raise ConfigError(f"line {lineno}: unknown section [{current}]")
            if current in sections:
                raise ConfigError(f"line {lineno}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise ConfigError(f"line {lineno}: content before first section")
        sections[current].append((lineno, line.split()))

    defaults = FuzzyConfig()
    out = {}
    for name in ("error", "derror"):
        if name not in sections:
            out[name] = getattr(defaults, f"{name}_var")
            continue
        universe, terms = None, []
        for lineno, tokens in sections[name]:
            if tokens[0] == "universe":
                if len(tokens) != 3:
                    raise ConfigError(f"line {lineno}: universe needs two bounds")
                universe = tuple(_floats(tokens[1:], lineno))
            elif len(tokens) == 5:
                try:
                    terms.append((tokens[0], PiecewiseLinearMF(*_floats(tokens[1:], lineno))))
                except ConfigError:
                    raise
                except ValueError as exc:
                    raise ConfigError(f"line {lineno}: {exc}") from None
            else:
                raise ConfigError(f"line {lineno}: expected 'label a b c d'")
        if universe is None:
            raise ConfigError(f"[{name}] has no universe line")
        try:
            out[name] = LinguisticVariable(name, universe, tuple(terms))
        except ValueError as exc:
            raise ConfigError(f"[{name}]: {exc}") from None

    if "rules" in sections:
        singletons, rows = None, []
        for lineno, tokens in sections["rules"]:
            if tokens[0] == "singletons":
                singletons = _floats(tokens[1:], lineno)
            else:
                rows.append([_entry(t, lineno) for t in tokens])
        try:
            rules = RuleBase(tuple(map(tuple, rows)), tuple(singletons or defaults.rules.singletons))
        except ValueError as exc:
            raise ConfigError(f"[rules]: {exc}") from None
    else:
        rules = defaults.rules
    return FuzzyConfig(out["error"], out["derror"], rules)


def load(path) -> FuzzyConfig:
    return loads(Path(path).read_text())


def builtin(name: str) -> FuzzyConfig:
    """Load a bundled configuration: ``default`` or ``printed_table``."""
    text = resources.files("fuzzysail.data").joinpath(f"{name}.fis").read_text()
    return loads(text)


def _fmt(v: float) -> str:
    return repr(float(v))


def dumps(cfg: FuzzyConfig) -> str:
    lines = []
    for section, var in (("error", cfg.error_var), ("derror", cfg.derror_var)):
        lines.append(f"[{section}]")
        lines.append(f"universe {_fmt(var.universe[0])} {_fmt(var.universe[1])}")
        for label, mf in var.terms:
            lines.append(" ".join([label, *map(_fmt, mf.params)]))
        lines.append("")
    lines.append("[rules]")
    lines.append("singletons " + " ".join(map(_fmt, cfg.rules.singletons)))
    for row in cfg.rules.labelled():
        lines.append(" ".join(f"{v:<2}" for v in row).rstrip())
    return "\n".join(lines) + "\n"
