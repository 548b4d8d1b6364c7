"""Run records shared by every optimizer."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TRACE_FIELDS = ("iter", "best_f", "mean_f", "std_f", "evals")


@dataclass
class BestRecord:
    x_best: np.ndarray
    f_best: float
    eval_count: int = 0


@dataclass
class RunTrace:
    """Per-iteration history of one optimizer run.

    ``rows`` holds one ``(iter, best_f, mean_f, std_f, evals)`` tuple per
    iteration; iteration 0 is the initial population.
    """

    algo: str
    function_id: str
    seed: int
    best: BestRecord
    rows: list[tuple] = field(default_factory=list)
    true_best: float = float("nan")
    meta: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def record(self, it: int, fitness: np.ndarray, evals: int) -> None:
        self.rows.append(
            (it, float(self.best.f_best), float(np.mean(fitness)), float(np.std(fitness)), int(evals))
        )

    @property
    def best_f(self) -> np.ndarray:
        return np.array([r[1] for r in self.rows])

    @property
    def evals(self) -> np.ndarray:
        return np.array([r[4] for r in self.rows], dtype=int)

    @property
    def n_iters(self) -> int:
        return len(self.rows) - 1


def start_trace(algo, objective, seed, X, fitness, meta) -> RunTrace:
    """Trace seeded with the initial population's best individual."""
    i = int(np.argmin(fitness))
    best = BestRecord(X[i].copy(), float(fitness[i]), len(fitness))
    trace = RunTrace(algo, objective.function_id, int(seed), best, meta=meta)
    trace.record(0, fitness, best.eval_count)
    return trace


def update_best(best: BestRecord, X: np.ndarray, fitness: np.ndarray) -> bool:
    """Replace ``best`` with the generation's best iff it is strictly better."""
    best.eval_count += len(fitness)
    i = int(np.argmin(fitness))
    if fitness[i] < best.f_best:
        best.x_best = X[i].copy()
        best.f_best = float(fitness[i])
        return True
    return False
