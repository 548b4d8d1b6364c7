"""Repeated seeded trials, aggregation, Friedman ranking and persistence."""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, is_dataclass
from pathlib import Path

import numpy as np
from scipy.stats import rankdata

from gne.baselines import DeConfig, GaConfig, de_run, ga_run
from gne.benchmarks import ObjectiveSpec
from gne.optimizer import GneConfig, gne_run
from gne.trace import RunTrace

__all__ = [
    "ALGORITHMS",
    "CSV_COLUMNS",
    "ExperimentPlan",
    "ExperimentResult",
    "SUMMARY_SCHEMA",
    "condition_of",
    "friedman_ranks",
    "make_config",
    "read_csv",
    "run_experiment",
    "summarize",
    "summarize_csv",
    "write_csv",
    "write_json",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "algo", "function", "condition", "shift", "run_id", "seed",
    "iter", "best_f", "mean_f", "std_f", "evals",
)

ALGORITHMS = {
    "gne": (GneConfig, gne_run),
    "de": (DeConfig, de_run),
    "ga": (GaConfig, ga_run),
}

_STAT = {"type": "number"}
_CELL = {
    "type": "object",
    "required": ["mean", "std", "min", "median", "rank"],
    "properties": {
        "mean": _STAT, "std": {"type": "number", "minimum": 0}, "min": _STAT,
        "median": _STAT, "rank": {"type": ["number", "null"]},
        "true": {
            "type": "object",
            "required": ["mean", "std", "min", "median"],
            "properties": {"mean": _STAT, "std": _STAT, "min": _STAT, "median": _STAT},
        },
    },
}
SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["meta", "results"],
    "properties": {
        "meta": {
            "type": "object",
            "required": ["version", "runs_per_cell", "base_seed", "configs", "decisions"],
        },
        "results": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "additionalProperties": {"type": "object", "additionalProperties": _CELL},
            },
        },
        "friedman": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["mean_ranks", "statistic", "functions"],
            },
        },
    },
}

DECISIONS = {
    "adjacency_negative_cosine": "clip to 0",
    "adjacency_self_loops": True,
    "centroid_individual": "isolated node",
    "chebyshev_domain": "t = lambda - 1",
    "filter_domain": "centroid-centered population",
    "phi_policy": "gaussian around rank-weighted mean of filtered elites; "
                  "raw-elite resampling w.p. p_e; best reinjected",
    "sigma_schedule": "geometric in t over narrowest box width",
    "boundary": "clamp",
    "elite_ties": "lowest index",
    "seeds": "base_seed + run_id, shared across algorithms",
    "ranking_input": "per-cell mean best_f; ties get average rank",
    "std_divisor": "R - 1",
}


def make_config(algo: str, seed: int, overrides: dict | None = None):
    """Config object for ``algo`` with ``seed`` and optional field overrides."""
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {sorted(ALGORITHMS)}")
    cls = ALGORITHMS[algo][0]
    return cls(seed=seed, **(overrides or {}))


def condition_of(objective: ObjectiveSpec) -> tuple[str, float]:
    """``(noise mode, scalar shift)`` tags for an objective."""
    s = objective.shift
    shift = float(s[0]) if np.all(s == s[0]) else float("nan")
    return objective.noise, shift


def _condition_key(noise: str, shift: float) -> str:
    return noise if shift == 0 else f"{noise}|shift={shift:g}"


@dataclass
class ExperimentPlan:
    """Every ``(algorithm, objective)`` cell runs seeds ``base_seed .. base_seed + R - 1``."""

    algorithms: list[str]
    objectives: list[ObjectiveSpec]
    runs_per_cell: int = 30
    base_seed: int = 0
    overrides: dict = field(default_factory=dict)
    csv_path: str | None = None
    json_path: str | None = None
    workers: int = 1

    def __post_init__(self):
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell must be at least 1")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}")
        if not self.algorithms or not self.objectives:
            raise ValueError("plan needs at least one algorithm and one objective")

    def tasks(self):
        for algo in self.algorithms:
            for obj in self.objectives:
                for r in range(self.runs_per_cell):
                    yield algo, obj, r, self.base_seed + r


@dataclass
class ExperimentResult:
    traces: list[RunTrace]
    summary: dict
    failures: list[dict]

    @property
    def ok(self) -> bool:
        return not self.failures


def _run_task(task, overrides):
    algo, obj, run_id, seed = task
    config = make_config(algo, seed, overrides.get(algo))
    trace = ALGORITHMS[algo][1](config, obj)
    noise, shift = condition_of(obj)
    trace.meta.update(condition=noise, shift=shift, run_id=run_id)
    return trace


def _safe_task(args):
    task, overrides = args
    try:
        return _run_task(task, overrides), None
    except Exception as exc:  # recorded per cell; remaining cells continue
        algo, obj, run_id, seed = task
        noise, shift = condition_of(obj)
        return None, {
            "algo": algo, "function": obj.function_id, "condition": noise,
            "shift": shift, "run_id": run_id, "seed": seed, "error": repr(exc),
        }


def run_experiment(plan: ExperimentPlan) -> ExperimentResult:
    """Run every cell and seed, aggregate, and write any configured outputs."""
    jobs = [(task, plan.overrides) for task in plan.tasks()]
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            outcomes = list(pool.map(_safe_task, jobs, chunksize=4))
    else:
        outcomes = [_safe_task(job) for job in jobs]
    traces = [t for t, _ in outcomes if t is not None]
    failures = [f for _, f in outcomes if f is not None]
    for f in failures:
        log.error("run failed: %s", f)
    traces.sort(key=lambda t: (t.algo, t.function_id, t.meta["condition"], t.meta["shift"], t.meta["run_id"]))
    summary = summarize(_final_records(traces), meta=_plan_meta(plan))
    if plan.csv_path:
        write_csv(traces, plan.csv_path)
    if plan.json_path:
        write_json(summary, plan.json_path)
    return ExperimentResult(traces, summary, failures)


def _jsonable(value):
    if is_dataclass(value):
        value = asdict(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if callable(value):
        return getattr(value, "__name__", repr(value))
    return value


def _plan_meta(plan: ExperimentPlan) -> dict:
    from gne import __version__

    configs = {}
    for algo in plan.algorithms:
        cfg = make_config(algo, plan.base_seed, plan.overrides.get(algo))
        entry = _jsonable(cfg)
        entry.pop("seed", None)
        if isinstance(cfg, GneConfig):
            entry["filter"] = cfg.describe_filter()
        configs[algo] = entry
    objectives = [
        {
            "function": o.function_id, "dim": o.dim, "lb": o.lb.tolist(), "ub": o.ub.tolist(),
            "noise": o.noise, "shift": condition_of(o)[1], "noise_seed": o.noise_seed,
        }
        for o in plan.objectives
    ]
    return {
        "version": __version__,
        "runs_per_cell": plan.runs_per_cell,
        "base_seed": plan.base_seed,
        "configs": configs,
        "objectives": objectives,
        "decisions": DECISIONS,
    }


def _final_records(traces):
    return [
        {
            "algo": t.algo, "function": t.function_id, "condition": t.meta["condition"],
            "shift": t.meta["shift"], "best_f": t.best.f_best, "true_f": t.true_best,
        }
        for t in traces
    ]


def _stats(values) -> dict:
    v = np.asarray(values, dtype=float)
    std = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    return {"mean": float(np.mean(v)), "std": std, "min": float(np.min(v)), "median": float(np.median(v))}


def summarize(records, meta: dict | None = None) -> dict:
    """Aggregate final per-run records into the nested summary document.

    ``records`` are dicts with ``algo, function, condition, shift, best_f`` and
    optionally ``true_f``.
    """
    cells: dict = {}
    for rec in records:
        key = _condition_key(rec["condition"], rec["shift"])
        cell = cells.setdefault(key, {}).setdefault(rec["function"], {}).setdefault(rec["algo"], [])
        cell.append(rec)

    results: dict = {}
    friedman: dict = {}
    for cond, by_fn in cells.items():
        results[cond] = {}
        for fn, by_algo in by_fn.items():
            results[cond][fn] = {}
            for algo, recs in by_algo.items():
                entry = _stats([r["best_f"] for r in recs])
                entry["rank"] = None
                true = [r.get("true_f") for r in recs]
                if all(x is not None for x in true):
                    entry["true"] = _stats(true)
                results[cond][fn][algo] = entry
        algos = sorted({a for by_algo in by_fn.values() for a in by_algo})
        complete = [fn for fn, by_algo in by_fn.items() if set(by_algo) == set(algos)]
        if len(algos) >= 2 and complete:
            M = np.array([[results[cond][fn][a]["mean"] for a in algos] for fn in complete])
            mean_ranks, stat = friedman_ranks(M)
            ranks = rankdata(M, axis=1, method="average")
            for i, fn in enumerate(complete):
                for j, a in enumerate(algos):
                    results[cond][fn][a]["rank"] = float(ranks[i, j])
            friedman[cond] = {
                "algorithms": algos,
                "functions": complete,
                "mean_ranks": dict(zip(algos, map(float, mean_ranks))),
                "statistic": float(stat),
            }
    doc = {"meta": meta or {}, "results": results, "friedman": friedman}
    return doc


def friedman_ranks(results) -> tuple[np.ndarray, float]:
    """Mean Friedman ranks per algorithm and the Friedman chi-square statistic.

    Parameters
    ----------
    results : array_like, shape (n, m)
        Rows are problems, columns algorithms; smaller is better.

    Returns
    -------
    mean_ranks : ndarray, shape (m,)
        Average rank of each column, 1 being best; ties share the average rank.
    statistic : float
        ``12n / (m(m+1)) * (sum_j R_j^2 - m(m+1)^2 / 4)`` with ``R_j`` the mean ranks.
    """
    M = np.asarray(results, dtype=float)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 2:
        raise ValueError(f"need a (functions >= 1, algorithms >= 2) matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("results contain non-finite entries")
    n, m = M.shape
    mean_ranks = rankdata(M, axis=1, method="average").mean(axis=0)
    stat = 12.0 * n / (m * (m + 1)) * (np.sum(mean_ranks**2) - m * (m + 1) ** 2 / 4.0)
    if abs(stat) < 1e-12:
        stat = 0.0
    return mean_ranks, float(stat)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(traces, path) -> Path:
    """One row per iteration per run, columns :data:`CSV_COLUMNS`."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            for t in traces:
                head = (t.algo, t.function_id, t.meta.get("condition", "none"),
                        t.meta.get("shift", 0.0), t.meta.get("run_id", 0), t.seed)
                for row in t.rows:
                    w.writerow([_fmt(v) for v in head + tuple(row)])
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc
    return path


def write_json(summary: dict, path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            json.dump(_jsonable(summary), fh, indent=2, allow_nan=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write JSON to {path}: {exc}") from exc
    return path


def read_csv(path) -> list[dict]:
    """Parse a trace CSV back into typed row dicts."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        for r in reader:
            rows.append({
                "algo": r["algo"], "function": r["function"], "condition": r["condition"],
                "shift": float(r["shift"]), "run_id": int(r["run_id"]), "seed": int(r["seed"]),
                "iter": int(r["iter"]), "best_f": float(r["best_f"]), "mean_f": float(r["mean_f"]),
                "std_f": float(r["std_f"]), "evals": int(r["evals"]),
            })
    return rows


def summarize_csv(path, meta: dict | None = None) -> dict:
    """Summary recomputed from the final iteration of every run in a trace CSV."""
    last: dict = {}
    for r in read_csv(path):
        key = (r["algo"], r["function"], r["condition"], r["shift"], r["run_id"])
        if key not in last or r["iter"] > last[key]["iter"]:
            last[key] = r
    records = [last[k] for k in sorted(last, key=lambda k: (k[0], k[1], k[2], k[3], k[4]))]
    return summarize(records, meta)
