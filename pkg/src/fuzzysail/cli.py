"""Command line entry point: ``fuzzysail <subcommand> [flags]``.

Exit status is 0 on success, 1 on a usage error and 2 when the command
itself fails (unreadable input, aborted episode, protocol error).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import harness, wire
from ._validation import resolve_config
from .config import ConfigError
from .controllers import DS_MOVEMENT, KINDS, ControllerSpec, make_controller
from .sim import EpisodeConfig, NoiseLevel, PhysicsParams, run_episode, write_summary, write_trace
from .stats import mann_whitney

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

EPISODE_KEYS = ("completion_radius", "timeout", "wind_from", "wind_speed", "start_heading")
PHYSICS_KEYS = ("rudder_gain", "speed_tau", "shift_yaw_gain")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _noise(value: str) -> NoiseLevel:
    try:
        return NoiseLevel.parse(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _param(value: str) -> float:
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from None
    if math.isnan(v):
        raise argparse.ArgumentTypeError("parameter cannot be NaN")
    return v


def _positive_int(value: str) -> int:
    try:
        v = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonnegative_int(value: str) -> int:
    try:
        v = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _assignment(value: str) -> tuple[str, float]:
    key, sep, raw = value.partition("=")
    if not sep or key not in EPISODE_KEYS + PHYSICS_KEYS:
        raise argparse.ArgumentTypeError(
            f"expected KEY=VALUE with KEY in {', '.join(EPISODE_KEYS + PHYSICS_KEYS)}"
        )
    try:
        v = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {raw!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"{key} must be finite")
    return key, v


def _spec(args) -> ControllerSpec:
    try:
        return ControllerSpec(args.controller, args.param)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def _episode(args, seed: int = 0) -> EpisodeConfig:
    overrides = dict(getattr(args, "set", None) or [])
    physics = PhysicsParams(**{k: v for k, v in overrides.items() if k in PHYSICS_KEYS})
    fields = {k: v for k, v in overrides.items() if k in EPISODE_KEYS}
    try:
        return EpisodeConfig(seed=seed, physics=physics, **fields)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config(args):
    return resolve_config(args.config) if getattr(args, "config", None) else None


def _describe(spec: ControllerSpec) -> str:
    if spec.kind == "ns":
        return f"ns sigma={spec.param:g}"
    if spec.kind == "it2":
        return f"it2 movement={spec.param:g}"
    if spec.kind == "ds":
        return f"ds movement={DS_MOVEMENT:g} threshold={spec.param:g}"
    return spec.kind


def _record_line(rec) -> str:
    line = (f"completed={int(rec.completed)} time={rec.time_taken!r} rmse={rec.rmse!r} "
            f"steps={len(rec.trace)}")
    if rec.aborted:
        line += f" aborted={rec.aborted!r}"
    return line


def cmd_run(args) -> int:
    spec = _spec(args)
    cfg = _episode(args, args.seed)
    ctrl = make_controller(spec, seed=harness.controller_seed(args.seed), config=_config(args))
    rec = run_episode(ctrl, cfg, args.noise, label=(spec.kind, spec.param))
    if args.out:
        write_trace(rec, args.out)
    if args.summary:
        write_summary(rec, args.summary)
    print(f"{_describe(spec)} noise={args.noise.short} seed={args.seed} {_record_line(rec)}")
    return EXIT_RUNTIME if rec.aborted else EXIT_OK


def cmd_batch(args) -> int:
    spec = _spec(args)
    batch = harness.batch_run(spec, args.noise, runs=args.runs, base_seed=args.seed_base,
                              cfg=_episode(args), config=_config(args))
    if args.out:
        harness.write_runs([batch], args.out)
    print(f"{_describe(spec)} noise={args.noise.short} runs={args.runs} "
          f"mean_rmse={batch.mean_rmse!r} std_rmse={batch.std_rmse!r} "
          f"mean_time={batch.mean_time!r} std_time={batch.std_time!r} "
          f"n_incomplete={batch.n_incomplete}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = harness.sweep(args.noise, runs=args.runs, base_seed=args.seed_base,
                            cfg=_episode(args), config=_config(args), jobs=args.jobs)
    for noise in args.noise:
        batches = results[noise]
        rows = harness.significance_table(batches)
        harness.write_table(rows, out_dir / f"table_{noise.short}.csv")
        harness.write_runs(batches, out_dir / f"runs_{noise.short}.csv")
        print(harness.format_table(rows, noise))
        print()
    return EXIT_OK


def cmd_surface(args) -> int:
    spec = _spec(args)
    if spec.kind == "pi":
        raise UsageError("surfaces are defined for the fuzzy controllers only")
    grid = harness.surface(spec, seed=args.seed, config=_config(args))
    grid.write_csv(args.out)
    print(f"{_describe(spec)} rows={grid.values.size} min={grid.values.min()!r} "
          f"max={grid.values.max()!r} out={args.out}")
    return EXIT_OK


def _selector(text: str | None):
    if text is None:
        return None
    kind, _, param = text.partition(":")
    if kind not in KINDS:
        raise UsageError(f"unknown controller kind in selector {text!r}")
    if not param:
        return kind, None
    try:
        return kind, float(param)
    except ValueError:
        raise UsageError(f"bad parameter in selector {text!r}") from None


def _sample(path, selector, noise, metric) -> list[float]:
    rows = harness.read_runs(path)
    if selector is not None:
        kind, param = selector
        rows = [r for r in rows if r["variety"] == kind and (param is None or r["parameter"] == param)]
    if noise is not None:
        rows = [r for r in rows if r["noise"] == noise.short]
    if not rows:
        raise ValueError(f"{path}: no rows match the selection")
    return [r[metric] for r in rows]


def cmd_stats(args) -> int:
    metric = "rmse" if args.metric == "rmse" else "time_taken"
    a = _sample(args.a, _selector(args.select_a), args.noise, metric)
    b = _sample(args.b, _selector(args.select_b), args.noise, metric)
    res = mann_whitney(a, b)
    payload = {"metric": args.metric, "n_a": len(a), "n_b": len(b), "u": res.u, "p": res.p,
               "method": res.method, "significant": res.p < harness.ALPHA}
    text = json.dumps(payload, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_serve(args) -> int:
    cfg = _episode(args, args.seed)

    def ready(port):
        print(f"listening on {args.host}:{port}", file=sys.stderr, flush=True)

    rec = wire.serve(cfg, args.noise, port=args.port, host=args.host, on_ready=ready,
                     accept_timeout=args.accept_timeout)
    if args.out:
        write_trace(rec, args.out)
    if args.summary:
        write_summary(rec, args.summary)
    print(f"remote noise={args.noise.short} seed={args.seed} {_record_line(rec)}")
    return EXIT_RUNTIME if rec.aborted else EXIT_OK


def cmd_client(args) -> int:
    spec = _spec(args)
    ctrl = make_controller(spec, seed=harness.controller_seed(args.seed), config=_config(args))
    end = wire.run_client(args.host, args.port, ctrl)
    print(" ".join(f"{k}={v}" for k, v in end.items()))
    return EXIT_OK


def _add_controller(p, required=True):
    p.add_argument("--controller", choices=KINDS, required=required,
                   help="controller kind")
    p.add_argument("--param", type=_param, default=None,
                   help="sigma for ns, FOU movement for it2, threshold for ds (inf allowed); "
                        "none for pi and t1")


def _add_common(p):
    p.add_argument("--config", default=None,
                   help="fuzzy config file, or the bundled name 'default' or 'printed_table'")
    p.add_argument("--set", action="append", type=_assignment, metavar="KEY=VALUE",
                   help="override an episode or physics constant; repeatable")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fuzzysail", description="Fuzzy heading controllers on a sailing simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="sail one episode")
    _add_controller(p)
    p.add_argument("--noise", type=_noise, default=NoiseLevel.LOW, help="low, med or high")
    p.add_argument("--seed", type=_nonnegative_int, default=0, help="episode seed")
    p.add_argument("--out", help="trace CSV path")
    p.add_argument("--summary", help="summary CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="run seeds seed-base .. seed-base+runs-1 for one controller")
    _add_controller(p)
    p.add_argument("--noise", type=_noise, default=NoiseLevel.LOW, help="low, med or high")
    p.add_argument("--runs", type=_positive_int, default=30, help="episodes per batch")
    p.add_argument("--seed-base", type=_nonnegative_int, default=0, help="seed of the first run")
    p.add_argument("--out", help="runs CSV path")
    _add_common(p)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("sweep", help="every controller row at every noise level")
    p.add_argument("--noise", type=_noise, nargs="+", default=list(NoiseLevel),
                   help="noise levels to sweep (default: all three)")
    p.add_argument("--runs", type=_positive_int, default=30, help="episodes per batch")
    p.add_argument("--seed-base", type=_nonnegative_int, default=0, help="seed of the first run")
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    p.add_argument("--out-dir", default=".", help="directory for table_*.csv and runs_*.csv")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("surface", help="export a 361x361 control surface")
    _add_controller(p)
    p.add_argument("--seed", type=_nonnegative_int, default=0, help="seed for ns surfaces")
    p.add_argument("--out", default="surface.csv", help="surface CSV path")
    p.add_argument("--config", default=None,
                   help="fuzzy config file, or the bundled name 'default' or 'printed_table'")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("stats", help="Mann-Whitney test between two runs CSVs")
    p.add_argument("--a", required=True, help="runs CSV for sample a")
    p.add_argument("--b", required=True, help="runs CSV for sample b")
    p.add_argument("--metric", choices=("rmse", "time"), default="rmse", help="compared column")
    p.add_argument("--select-a", help="keep rows of KIND or KIND:PARAM from a")
    p.add_argument("--select-b", help="keep rows of KIND or KIND:PARAM from b")
    p.add_argument("--noise", type=_noise, default=None, help="keep rows of one noise level")
    p.add_argument("--out", help="also write the JSON result here")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="serve one episode to a TCP controller client")
    p.add_argument("--port", type=_nonnegative_int, default=5555, help="0 picks a free port")
    p.add_argument("--host", default="127.0.0.1", help="interface to bind")
    p.add_argument("--noise", type=_noise, default=NoiseLevel.LOW, help="low, med or high")
    p.add_argument("--seed", type=_nonnegative_int, default=0, help="episode seed")
    p.add_argument("--accept-timeout", type=float, default=None,
                   help="seconds to wait for a client")
    p.add_argument("--out", help="trace CSV path")
    p.add_argument("--summary", help="summary CSV path")
    p.add_argument("--set", action="append", type=_assignment, metavar="KEY=VALUE",
                   help="override an episode or physics constant; repeatable")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("client", help="steer a remote simulator with a local controller")
    _add_controller(p)
    p.add_argument("--port", type=_nonnegative_int, default=5555, help="server port")
    p.add_argument("--host", default="127.0.0.1", help="server host")
    p.add_argument("--seed", type=_nonnegative_int, default=0,
                   help="seed for the ns controller stream")
    p.add_argument("--config", default=None,
                   help="fuzzy config file, or the bundled name 'default' or 'printed_table'")
    p.set_defaults(func=cmd_client)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"fuzzysail {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, ConfigError, wire.ProtocolError) as exc:
        print(f"fuzzysail {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
