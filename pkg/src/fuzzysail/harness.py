"""Batch experiments, control surfaces and significance tables."""

from __future__ import annotations

import csv
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .controllers import DS_MOVEMENT, ControllerSpec, make_controller
from .estimators import DualSurfaceFLC, IntervalType2FLC, NonStationaryFLC, Type1FLC
from .metrics import rmse
from .sim import EpisodeConfig, NoiseLevel, RunRecord, run_episode
from .stats import mann_whitney

__all__ = [
    "rmse",
    "BatchResult",
    "SurfaceGrid",
    "TableRow",
    "SWEEP_GRID",
    "controller_seed",
    "batch_run",
    "sweep",
    "surface",
    "significance_table",
    "write_table",
    "read_table",
    "write_runs",
    "read_runs",
    "TABLE_HEADER",
    "RUNS_HEADER",
]

SWEEP_GRID = (
    ControllerSpec("pi"),
    ControllerSpec("t1"),
    *(ControllerSpec("ns", p) for p in (2.0, 5.0, 10.0, 20.0)),
    *(ControllerSpec("it2", p) for p in (2.0, 5.0, 10.0, 20.0)),
    *(ControllerSpec("ds", p) for p in (2.0, 5.0, 10.0, 25.0, 50.0)),
)

TABLE_HEADER = ("variety", "parameter", "mean_rmse", "std_rmse", "mean_time", "std_time",
                "p_rmse_vs_t1", "p_time_vs_t1", "n_incomplete")
RUNS_HEADER = ("variety", "parameter", "noise", "seed", "completed", "time_taken", "rmse")

ALPHA = 0.05


def controller_seed(run_seed: int) -> int:
    """Seed of a run's controller stream, independent of its wind stream."""
    return int(np.random.SeedSequence((run_seed, 2)).generate_state(1)[0])


def _mean_std(values):
    mean = statistics.fmean(values)
    if len(values) < 2:
        return mean, 0.0
    return mean, statistics.stdev(values)


@dataclass
class BatchResult:
    spec: ControllerSpec
    noise: NoiseLevel
    records: list[RunRecord]

    @property
    def rmses(self) -> list[float]:
        return [r.rmse for r in self.records]

    @property
    def times(self) -> list[float]:
        return [r.time_taken for r in self.records]

    @property
    def std_defined(self) -> bool:
        return len(self.records) > 1

    @property
    def mean_rmse(self) -> float:
        return _mean_std(self.rmses)[0]

    @property
    def std_rmse(self) -> float:
        return _mean_std(self.rmses)[1]

    @property
    def mean_time(self) -> float:
        return _mean_std(self.times)[0]

    @property
    def std_time(self) -> float:
        return _mean_std(self.times)[1]

    @property
    def n_incomplete(self) -> int:
        return sum(not r.completed for r in self.records)


def _one_run(spec, noise, seed, cfg, config, keep_trace):
    ctrl = make_controller(spec, seed=controller_seed(seed), config=config)
    ep = EpisodeConfig(**{**cfg.__dict__, "seed": seed})
    rec = run_episode(ctrl, ep, noise, label=(spec.kind, spec.param))
    if not keep_trace:
        rec.trace = []
    return rec


def batch_run(spec: ControllerSpec, noise: NoiseLevel, runs: int = 30, base_seed: int = 0,
              cfg: EpisodeConfig | None = None, config=None,
              keep_traces: bool = False) -> BatchResult:
    """Run ``runs`` episodes with seeds ``base_seed + i``.

    Incomplete runs stay in the batch with the timeout as their time.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    cfg = cfg or EpisodeConfig()
    records = [
        _one_run(spec, noise, base_seed + i, cfg, config, keep_traces) for i in range(runs)
    ]
    return BatchResult(spec, noise, records)


def _batch_job(args):
    return batch_run(*args)


def sweep(noise_levels=tuple(NoiseLevel), runs: int = 30, base_seed: int = 0,
          grid=SWEEP_GRID, cfg: EpisodeConfig | None = None, config=None,
          jobs: int = 1) -> dict[NoiseLevel, list[BatchResult]]:
    """Every grid row at every noise level; output order follows the grid."""
    tasks = [(spec, noise, runs, base_seed, cfg, config) for noise in noise_levels for spec in grid]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_batch_job, tasks))
    else:
        results = [_batch_job(t) for t in tasks]
    out: dict[NoiseLevel, list[BatchResult]] = {noise: [] for noise in noise_levels}
    for batch in results:
        out[batch.noise].append(batch)
    return out


@dataclass
class SurfaceGrid:
    """Controller output over the (error, change of error) grid.

    ``values[i, j]`` is the output at ``error = axis[i]`` and
    ``derror = axis[j]``.
    """

    spec: ControllerSpec
    axis: np.ndarray
    values: np.ndarray

    def rows(self):
        for i, e in enumerate(self.axis):
            for j, de in enumerate(self.axis):
                yield float(e), float(de), float(self.values[i, j])

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("error", "derror", "output"))
            for e, de, out in self.rows():
                writer.writerow((repr(e), repr(de), repr(out)))


def surface_estimator(spec: ControllerSpec, seed: int = 0, config=None):
    kind, p = spec.kind, spec.param
    if kind == "t1":
        est = Type1FLC(config=config)
    elif kind == "ns":
        est = NonStationaryFLC(sigma=p, random_state=seed, config=config)
    elif kind == "it2":
        est = IntervalType2FLC(movement=p, config=config)
    elif kind == "ds":
        est = DualSurfaceFLC(threshold=p, movement=DS_MOVEMENT, config=config)
    else:
        raise ValueError("control surfaces are defined for the fuzzy controllers only")
    return est.fit()


def surface(spec: ControllerSpec, seed: int = 0, config=None, lo: float = -180.0,
            hi: float = 180.0, step: float = 1.0, rows_per_chunk: int = 19) -> SurfaceGrid:
    """Evaluate the raw engine on every grid cell, row by row.

    Both inputs are free axes, so no controller memory is involved. A
    non-stationary engine draws fresh instantiations for every cell in
    row-major order.
    """
    est = surface_estimator(spec, seed, config)
    n = int(round((hi - lo) / step)) + 1
    axis = lo + step * np.arange(n)
    values = np.empty((n, n))
    for start in range(0, n, rows_per_chunk):
        e_rows = axis[start:start + rows_per_chunk]
        e, de = np.meshgrid(e_rows, axis, indexing="ij")
        X = np.column_stack([e.ravel(), de.ravel()])
        values[start:start + len(e_rows)] = est.predict(X).reshape(e.shape)
    return SurfaceGrid(spec, axis, values)


@dataclass
class TableRow:
    variety: str
    parameter: float | None
    mean_rmse: float
    std_rmse: float
    mean_time: float
    std_time: float
    p_rmse_vs_t1: float
    p_time_vs_t1: float
    n_incomplete: int
    marks: set = field(default_factory=set, compare=False)

    @property
    def significant_rmse(self) -> bool:
        return self.p_rmse_vs_t1 < ALPHA

    @property
    def significant_time(self) -> bool:
        return self.p_time_vs_t1 < ALPHA


def significance_table(batches: list[BatchResult],
                       baseline: BatchResult | None = None) -> list[TableRow]:
    """Summary rows with Mann-Whitney p-values against the type-1 batch.

    ``marks`` holds ``best_rmse``/``best_time`` (lowest mean in the row's
    variety) and ``best_rmse_overall``/``best_time_overall``.
    """
    if baseline is None:
        baseline = next((b for b in batches if b.spec.kind == "t1"), None)
        if baseline is None:
            raise ValueError("no type-1 baseline batch")
    rows = []
    for b in batches:
        if b.noise is not baseline.noise:
            raise ValueError(
                f"noise mismatch: {b.spec.label} at {b.noise.short}, "
                f"baseline at {baseline.noise.short}"
            )
        rows.append(TableRow(
            b.spec.kind, b.spec.param, b.mean_rmse, b.std_rmse, b.mean_time, b.std_time,
            mann_whitney(b.rmses, baseline.rmses).p,
            mann_whitney(b.times, baseline.times).p,
            b.n_incomplete,
        ))
    _mark_best(rows)
    return rows


def _mark_best(rows: list[TableRow]) -> None:
    for metric in ("rmse", "time"):
        key = f"mean_{metric}"
        best = min(getattr(r, key) for r in rows)
        for r in rows:
            if getattr(r, key) == best:
                r.marks.add(f"best_{metric}_overall")
        for variety in {r.variety for r in rows}:
            group = [r for r in rows if r.variety == variety]
            best = min(getattr(r, key) for r in group)
            for r in group:
                if getattr(r, key) == best:
                    r.marks.add(f"best_{metric}")


def _fmt_param(p):
    return "N/A" if p is None else repr(float(p))


def _parse_param(s):
    return None if s == "N/A" else float(s)


def write_table(rows: list[TableRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TABLE_HEADER)
        for r in rows:
            writer.writerow([
                r.variety, _fmt_param(r.parameter),
                *(repr(float(getattr(r, k))) for k in TABLE_HEADER[2:8]),
                r.n_incomplete,
            ])


def read_table(path) -> list[TableRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TABLE_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        rows = [
            TableRow(d["variety"], _parse_param(d["parameter"]),
                     *(float(d[k]) for k in TABLE_HEADER[2:8]), int(d["n_incomplete"]))
            for d in reader
        ]
    _mark_best(rows)
    return rows


def format_table(rows: list[TableRow], noise: NoiseLevel | None = None) -> str:
    """Plain-text rendering; ``*`` marks p < 0.05 against type-1, ``+`` a
    best-in-variety mean and ``!`` the best mean overall."""

    def cell(value, row, metric, sig):
        tag = ("*" if sig else "") + ("+" if f"best_{metric}" in row.marks else "")
        tag += "!" if f"best_{metric}_overall" in row.marks else ""
        return f"{value:8.2f}{tag:<3}"

    head = f"{'variety':<8}{'param':>7}  {'rmse':>11}{'sd':>7}  {'time':>11}{'sd':>7}  inc"
    lines = [f"noise: {noise.short}"] if noise else []
    lines.append(head)
    for r in rows:
        p = "N/A" if r.parameter is None else f"{r.parameter:g}"
        lines.append(
            f"{r.variety:<8}{p:>7}  {cell(r.mean_rmse, r, 'rmse', r.significant_rmse)}"
            f"{r.std_rmse:7.2f}  {cell(r.mean_time, r, 'time', r.significant_time)}"
            f"{r.std_time:7.2f}  {r.n_incomplete:3d}"
        )
    return "\n".join(lines)


def write_runs(batches: list[BatchResult], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RUNS_HEADER)
        for b in batches:
            for r in b.records:
                writer.writerow([
                    b.spec.kind, _fmt_param(b.spec.param), r.noise, r.seed, int(r.completed),
                    repr(float(r.time_taken)), repr(float(r.rmse)),
                ])


def read_runs(path) -> list[dict]:
    """Rows of a runs CSV with numeric fields converted."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RUNS_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            {
                "variety": d["variety"],
                "parameter": _parse_param(d["parameter"]),
                "noise": d["noise"],
                "seed": int(d["seed"]),
                "completed": bool(int(d["completed"])),
                "time_taken": float(d["time_taken"]),
                "rmse": float(d["rmse"]),
            }
            for d in reader
        ]

