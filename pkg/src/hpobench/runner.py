"""Experiment grid: sample sizes x variates x optimizers, plus tables and statistics."""
from __future__ import annotations

import csv
import hashlib
import logging
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from . import gbt
from .data import TimeSeriesFrame, load_frame, take_sample
from .features import LagConfig, chrono_split, make_supervised
from .gbt import HyperParams
from .metrics import MetricRecord, mape, r_squared, timed
from .objective import ObjectiveSpec
from .optimizers import ALGORITHMS, RUNNERS, BudgetPolicy, OptimizationResult
from .space import PARAM_NAMES, SearchSpace
from .stats import KruskalWallisReport, PairwiseMatrix, dunn_bonferroni, kruskal_wallis

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
VARIATES = ("univariate", "multivariate")
METRICS = ("mape", "r2", "runtime")
DISPLAY = {
    "random": "Random Search",
    "cmaes": "CMA-ES",
    "bayes": "Bayesian",
    "pso": "PSO",
    "ngopt": "NGOpt",
}
RESULTS_HEADER = (
    "run_id", "algorithm", "variate", "sample_size", "seed", "mape", "r2", "runtime_s",
    "best_max_depth", "best_learning_rate", "best_n_estimators", "best_subsample",
    "best_colsample_bytree", "best_min_child_weight", "status",
)
HISTORY_HEADER = (
    "run_id", "algorithm", "config", "sample_size", "trial", "objective", "elapsed_s",
) + PARAM_NAMES
# nominal seconds per split-scan row visit for the deterministic "work" clock
WORK_SECONDS_PER_UNIT = 2.5e-9


class ConfigError(ValueError):
    pass


def default_sizes() -> List[int]:
    return list(range(1000, 20001, 1000))


def parse_sizes(text) -> List[int]:
    """Accept a list, ``"1000,2000"`` or an inclusive range ``"1000:5000:500"``."""
    if isinstance(text, (list, tuple)):
        return [int(s) for s in text]
    text = str(text).strip()
    if ":" in text:
        parts = [int(p) for p in text.split(":")]
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = parts
        return list(range(start, stop + 1, step))
    return [int(s) for s in text.split(",") if s.strip()]


def _split_names(value) -> List[str]:
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return list(value)


@dataclass(frozen=True)
class ExperimentConfig:
    data: Optional[str] = None
    synthetic: bool = False
    synthetic_rows: int = 0  # 0: just enough for the largest size
    seed: int = 0
    sizes: Tuple[int, ...] = tuple(default_sizes())
    variates: Tuple[str, ...] = VARIATES
    algorithms: Tuple[str, ...] = ALGORITHMS
    lags: int = 24
    exog: Tuple[str, ...] = ()  # empty: every exogenous column
    max_trials: int = 50
    patience: Optional[int] = 20
    test_fraction: float = 0.2
    repeats: int = 1
    clock: str = "wall"
    workers: int = 1
    out: str = "results"
    grids: Optional[Dict[str, Tuple]] = None

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        object.__setattr__(self, "variates", tuple(self.variates))
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        object.__setattr__(self, "exog", tuple(self.exog))
        if self.grids:
            try:
                full = SearchSpace.from_mapping(self.grids).to_mapping()
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            object.__setattr__(self, "grids", {k: tuple(v) for k, v in full.items()})
        self.validate()

    def validate(self) -> None:
        if not self.sizes:
            raise ConfigError("no sample sizes given")
        if list(self.sizes) != sorted(set(self.sizes)):
            raise ConfigError("sizes must be strictly ascending")
        if self.sizes[0] < self.lags + 25:
            raise ConfigError(f"every size must be >= lags + 25 = {self.lags + 25}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ConfigError(f"unknown algorithm(s) {bad}; choose from {ALGORITHMS}")
        bad = [v for v in self.variates if v not in VARIATES]
        if bad or not self.variates:
            raise ConfigError(f"unknown variate(s) {bad}; choose from {VARIATES}")
        if self.clock not in ("wall", "work"):
            raise ConfigError("clock must be 'wall' or 'work'")
        if self.repeats < 1:
            raise ConfigError("repeats must be >= 1")
        if self.data is None and not self.synthetic:
            raise ConfigError("give a data path or enable synthetic data")
        self.budget()
        self.space()

    def budget(self) -> BudgetPolicy:
        try:
            return BudgetPolicy(self.max_trials, self.patience)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def space(self) -> SearchSpace:
        return SearchSpace.from_mapping(self.grids or {})

    def to_mapping(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        out["grids"] = self.space().to_mapping()
        return out

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        mapping = dict(mapping or {})
        version = mapping.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version}")
        known = {f.name for f in fields(cls)}
        unknown = set(mapping) - known
        if unknown:
            raise ConfigError(f"unknown config key(s) {sorted(unknown)}")
        if "sizes" in mapping:
            mapping["sizes"] = parse_sizes(mapping["sizes"])
        for key in ("variates", "algorithms", "exog"):
            if key in mapping and mapping[key] is not None:
                mapping[key] = _split_names(mapping[key])
        if mapping.get("grids"):
            mapping["grids"] = {k: tuple(v) for k, v in mapping["grids"].items()}
        return cls(**mapping)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_mapping(yaml.safe_load(fh) or {})

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            yaml.safe_dump(self.to_mapping(), fh, sort_keys=False)


def derive_seed(master: int, algorithm: str, variate: str, size: int, repeat: int = 0) -> int:
    key = f"{master}|{algorithm}|{variate}|{size}"
    if repeat:
        key += f"|{repeat}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:4], "little")


def make_clock(kind: str):
    """Wall clock, or a deterministic clock counting split-scan work since creation."""
    if kind == "work":
        w0 = gbt.work_units()
        return lambda: (gbt.work_units() - w0) * WORK_SECONDS_PER_UNIT
    return time.perf_counter


@dataclass
class CellResult:
    run_id: str
    algorithm: str
    variate: str
    sample_size: int
    seed: int
    repeat: int = 0
    mape: float = math.nan
    r2: float = math.nan
    runtime_s: float = math.nan
    best_params: Optional[HyperParams] = None
    status: str = "ok"
    optimization: Optional[OptimizationResult] = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def metric(self, name: str) -> float:
        return {"mape": self.mape, "r2": self.r2, "runtime": self.runtime_s}[name]

    def record(self) -> MetricRecord:
        return MetricRecord(self.algorithm, self.variate, self.sample_size,
                            self.mape, self.r2, self.runtime_s)


@dataclass
class RunLedger:
    cells: List[CellResult]
    config: Optional[ExperimentConfig] = None

    @property
    def records(self) -> List[MetricRecord]:
        return [c.record() for c in self.cells if c.ok]

    @property
    def failed(self) -> List[CellResult]:
        return [c for c in self.cells if not c.ok]

    def select(self, variate=None, algorithm=None, ok_only=True) -> List[CellResult]:
        return [
            c for c in self.cells
            if (variate is None or c.variate == variate)
            and (algorithm is None or c.algorithm == algorithm)
            and (c.ok or not ok_only)
        ]

    def algorithms(self) -> List[str]:
        seen = []
        for c in self.cells:
            if c.algorithm not in seen:
                seen.append(c.algorithm)
        return seen

    def variates(self) -> List[str]:
        return [v for v in VARIATES if any(c.variate == v for c in self.cells)]


def _run_id(algorithm: str, variate: str, size: int, repeat: int) -> str:
    rid = f"{algorithm}-{variate[:5]}-{size}"
    return f"{rid}-r{repeat}" if repeat else rid


def _exog_indices(frame: TimeSeriesFrame, exog: Sequence[str]) -> Optional[List[int]]:
    if not exog:
        return None
    missing = [c for c in exog if c not in frame.feature_names]
    if missing:
        raise ConfigError(f"exogenous column(s) {missing} not in data")
    return [frame.feature_names.index(c) for c in exog]


def run_cell(frame: TimeSeriesFrame, cfg: ExperimentConfig, algorithm: str, variate: str,
             size: int, seed: int, repeat: int = 0) -> CellResult:
    """One grid cell: sample -> lag -> split -> timed search -> refit -> test scores.

    The timed window covers objective construction and the optimizer run only.
    Test MAPE and R^2 are computed in original units.
    """
    cell = CellResult(_run_id(algorithm, variate, size, repeat), algorithm, variate, size, seed, repeat)
    try:
        sample = take_sample(frame, size)
        cols = _exog_indices(frame, cfg.exog)
        if cols is not None:
            sample = replace(sample, features=sample.features[:, cols],
                             feature_names=tuple(sample.feature_names[i] for i in cols))
        ds = make_supervised(sample, LagConfig(cfg.lags, variate == "multivariate"))
        split = chrono_split(ds, cfg.test_fraction)
        space = cfg.space()
        budget = cfg.budget()
        clock = make_clock(cfg.clock)
        optimizer = RUNNERS[algorithm]
        mode = "cv5" if algorithm == "random" else "holdout"

        def search():
            objective = ObjectiveSpec(split.train, mode=mode, seed=seed)
            return optimizer(objective, space, budget, seed, clock=clock)

        result, runtime = timed(search, clock)
        model = gbt.fit(split.train.X, split.train.y, result.best_params, seed)
        pred = gbt.predict(model, split.test.X)
        scaling = frame.scaling
        actual = scaling.inverse_target(split.test.y) if scaling else split.test.y
        predicted = scaling.inverse_target(pred) if scaling else pred
        cell.mape = mape(actual, predicted)
        cell.r2 = r_squared(actual, predicted)
        cell.runtime_s = runtime
        cell.best_params = result.best_params
        cell.optimization = result
    except Exception as exc:  # noqa: BLE001 - a failing cell must not abort the grid
        log.error("cell %s failed: %s", cell.run_id, exc)
        cell.status = f"failed: {type(exc).__name__}: {exc}".replace("\n", " ")
    return cell


def grid_cells(cfg: ExperimentConfig):
    for repeat in range(cfg.repeats):
        for size in cfg.sizes:
            for variate in cfg.variates:
                for algorithm in cfg.algorithms:
                    yield algorithm, variate, size, derive_seed(cfg.seed, algorithm, variate, size, repeat), repeat


def worker_count(cfg: ExperimentConfig) -> int:
    """Configured workers, capped by ``HPOBENCH_WORKERS`` when set."""
    n = cfg.workers
    env = os.environ.get("HPOBENCH_WORKERS")
    if env:
        n = min(n, int(env))
    return max(1, n)


def _run_cell_task(args):
    frame, cfg, algorithm, variate, size, seed, repeat = args
    return run_cell(frame, cfg, algorithm, variate, size, seed, repeat)


def load_experiment_frame(cfg: ExperimentConfig) -> TimeSeriesFrame:
    if cfg.data is not None and not cfg.synthetic:
        frame, _ = load_frame(cfg.data)
    else:
        rows = cfg.synthetic_rows or max(cfg.sizes)
        frame, _ = load_frame(None, rows, cfg.seed)
    if len(frame) < max(cfg.sizes):
        raise ConfigError(f"data has {len(frame)} rows; largest size is {max(cfg.sizes)}")
    return frame


def run_experiment(cfg: ExperimentConfig, frame: Optional[TimeSeriesFrame] = None,
                   progress=None) -> RunLedger:
    """Run every grid cell; the ledger is always in config order."""
    if frame is None:
        frame = load_experiment_frame(cfg)
    tasks = [(frame, cfg) + cell for cell in grid_cells(cfg)]
    workers = worker_count(cfg)
    cells: List[CellResult] = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for cell in pool.map(_run_cell_task, tasks):
                cells.append(cell)
                if progress:
                    progress(cell)
    else:
        for task in tasks:
            cell = _run_cell_task(task)
            cells.append(cell)
            if progress:
                progress(cell)
    return RunLedger(cells, cfg)


# --- CSV --------------------------------------------------------------------

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return "" if math.isnan(x) else repr(x)
    return str(x)


def write_results_csv(ledger: RunLedger, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULTS_HEADER)
        for c in ledger.cells:
            hp = c.best_params.as_dict() if c.best_params else {}
            w.writerow([
                c.run_id, c.algorithm, c.variate, c.sample_size, c.seed,
                _fmt(c.mape), _fmt(c.r2), _fmt(c.runtime_s),
            ] + [_fmt(hp.get(p)) for p in PARAM_NAMES] + [c.status])


def read_results_csv(path) -> RunLedger:
    cells = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RESULTS_HEADER:
            raise ConfigError(f"{path}: unexpected results header")
        for row in reader:
            def num(key):
                return float(row[key]) if row[key] != "" else math.nan
            hp = None
            if row["best_max_depth"] != "":
                hp = HyperParams(
                    max_depth=int(row["best_max_depth"]),
                    learning_rate=float(row["best_learning_rate"]),
                    n_estimators=int(row["best_n_estimators"]),
                    subsample=float(row["best_subsample"]),
                    colsample_bytree=float(row["best_colsample_bytree"]),
                    min_child_weight=float(row["best_min_child_weight"]),
                )
            rid = row["run_id"]
            tail = re.search(r"-r(\d+)$", rid)
            cells.append(CellResult(
                run_id=rid, algorithm=row["algorithm"], variate=row["variate"],
                sample_size=int(row["sample_size"]), seed=int(row["seed"]),
                repeat=int(tail.group(1)) if tail else 0,
                mape=num("mape"), r2=num("r2"), runtime_s=num("runtime_s"),
                best_params=hp, status=row["status"],
            ))
    return RunLedger(cells)


def write_histories_csv(ledger: RunLedger, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HISTORY_HEADER)
        for c in ledger.cells:
            if c.optimization is None:
                continue
            for t in c.optimization.history:
                hp = t.params.as_dict()
                w.writerow([c.run_id, c.algorithm, c.variate, c.sample_size, t.index,
                            _fmt(float(t.objective)), _fmt(float(t.elapsed))]
                           + [_fmt(hp[p]) for p in PARAM_NAMES])


# --- tables -----------------------------------------------------------------

@dataclass(frozen=True)
class SummaryRow:
    variate: str
    metric: str
    algorithm: str
    n: int
    min: float
    max: float
    mean: float
    sd: float


def summarize(ledger: RunLedger) -> List[SummaryRow]:
    """Per variate, metric and algorithm: min / max / mean / sample sd over sizes."""
    rows = []
    for variate in ledger.variates():
        for metric in METRICS:
            for algorithm in ledger.algorithms():
                vals = np.array([c.metric(metric) for c in ledger.select(variate, algorithm)])
                if vals.size == 0:
                    continue
                sd = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
                rows.append(SummaryRow(variate, metric, algorithm, int(vals.size),
                                       float(vals.min()), float(vals.max()),
                                       float(vals.mean()), sd))
    return rows


def summary_text(rows: Iterable[SummaryRow]) -> str:
    rows = list(rows)
    lines = []
    for variate in VARIATES:
        block = [r for r in rows if r.variate == variate]
        if not block:
            continue
        lines.append(f"[{variate}]")
        lines.append(f"{'metric':<8} {'algorithm':<14} {'n':>3} {'min':>12} {'max':>12} {'mean':>12} {'sd':>12}")
        for r in block:
            lines.append(
                f"{r.metric:<8} {DISPLAY.get(r.algorithm, r.algorithm):<14} {r.n:>3} "
                f"{r.min:>12.6g} {r.max:>12.6g} {r.mean:>12.6g} {r.sd:>12.6g}")
        lines.append("")
    return "\n".join(lines)


def summary_csv(rows: Iterable[SummaryRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["variate", "metric", "algorithm", "n", "min", "max", "mean", "sd"])
        for r in rows:
            w.writerow([r.variate, r.metric, r.algorithm, r.n,
                        _fmt(r.min), _fmt(r.max), _fmt(r.mean), _fmt(r.sd)])


@dataclass
class StatsEntry:
    variate: str
    metric: str
    algorithms: Tuple[str, ...]
    report: Optional[KruskalWallisReport] = None
    pairwise: Optional[PairwiseMatrix] = None
    error: str = ""


def run_stats(ledger: RunLedger, alpha: float = 0.05) -> List[StatsEntry]:
    """Kruskal-Wallis and Dunn-Bonferroni per (variate, metric); groups span sample sizes."""
    out = []
    for variate in ledger.variates():
        for metric in METRICS:
            algs = tuple(a for a in ledger.algorithms() if ledger.select(variate, a))
            entry = StatsEntry(variate, metric, algs)
            try:
                groups = [[c.metric(metric) for c in ledger.select(variate, a)] for a in algs]
                if len(groups) < 2 or any(len(g) < 2 for g in groups):
                    raise ValueError("need at least two algorithms with two records each")
                entry.report = kruskal_wallis(groups)
                entry.pairwise = dunn_bonferroni(groups, alpha,
                                                 names=[DISPLAY.get(a, a) for a in algs])
            except Exception as exc:  # noqa: BLE001 - keep other metrics going
                entry.error = str(exc)
            out.append(entry)
    return out


def stats_text(entries: Iterable[StatsEntry]) -> str:
    lines = []
    for e in entries:
        lines.append(f"[{e.variate} / {e.metric}]")
        if e.error:
            lines.append(f"error: {e.error}")
        else:
            r = e.report
            mr = ", ".join(f"{DISPLAY.get(a, a)}={m:.2f}" for a, m in zip(e.algorithms, r.mean_ranks))
            lines.append(f"H={r.H:.4f} df={r.df} p={r.p_value:.4g} tie_correction={r.tie_correction:.6f}")
            lines.append(f"mean ranks: {mr}")
            lines.append("mean-rank differences (row - column), * = Bonferroni-significant:")
            lines.append(e.pairwise.to_text().rstrip("\n"))
        lines.append("")
    return "\n".join(lines)


def write_outputs(ledger: RunLedger, out_dir, plots: bool = True) -> Dict[str, Path]:
    from .plots import emit_plots

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "results": out / "results.csv",
        "histories": out / "histories.csv",
        "summary": out / "summary.txt",
        "summary_csv": out / "summary.csv",
        "stats": out / "stats.txt",
    }
    write_results_csv(ledger, paths["results"])
    write_histories_csv(ledger, paths["histories"])
    rows = summarize(ledger) if ledger.records else []
    paths["summary"].write_text(summary_text(rows))
    summary_csv(rows, paths["summary_csv"])
    paths["stats"].write_text(stats_text(run_stats(ledger)))
    if ledger.config is not None:
        ledger.config.dump(out / "config.yaml")
    if plots and ledger.records:
        for p in emit_plots(ledger, out / "plots"):
            paths[p.stem] = p
    return paths
