"""Reference optimizers sharing the GNE trace format.

``de_run`` is classic DE/rand/1/bin; ``ga_run`` is a real-coded generational
GA with tournament selection, uniform crossover, Gaussian mutation and
single-individual elitism. Both clamp to the box and spend exactly
``pop_size`` evaluations per generation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from gne.benchmarks import ObjectiveSpec, true_value
from gne.optimizer import _evaluate, noise_stream
from gne.trace import RunTrace, start_trace, update_best

__all__ = [
    "DeConfig",
    "GaConfig",
    "de_crossover",
    "de_donors",
    "de_mutate",
    "de_run",
    "de_select",
    "ga_run",
]


@dataclass(frozen=True)
class DeConfig:
    pop_size: int = 30
    max_iters: int = 500
    scale_factor: float = 0.5
    crossover_rate: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 4:
            raise ValueError("DE needs pop_size >= 4")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.scale_factor > 0:
            raise ValueError("scale_factor must be positive")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must lie in [0, 1]")


@dataclass(frozen=True)
class GaConfig:
    pop_size: int = 30
    max_iters: int = 500
    tournament_size: int = 3
    crossover_prob: float = 0.9
    mutation_prob: float | None = None  # per gene; None means 1/dim
    mutation_sigma: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("GA needs pop_size >= 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.tournament_size < 2:
            raise ValueError("tournament_size must be at least 2")
        if not 0.0 <= self.crossover_prob <= 1.0:
            raise ValueError("crossover_prob must lie in [0, 1]")
        if self.mutation_prob is not None and not 0.0 <= self.mutation_prob <= 1.0:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if not self.mutation_sigma >= 0:
            raise ValueError("mutation_sigma must be nonnegative")


def de_donors(n: int, rng, targets=None) -> np.ndarray:
    """Donor indices ``(r1, r2, r3)`` for each target, mutually distinct and distinct from it.

    Returns an array of shape ``(len(targets), 3)``.
    """
    if n < 4:
        raise ValueError("DE needs at least 4 individuals")
    targets = np.arange(n) if targets is None else np.atleast_1d(targets)
    # sample 3 of the n-1 non-target slots without replacement, then skip the target
    keys = rng.random((len(targets), n - 1))
    picks = np.argsort(keys, axis=1)[:, :3]
    return picks + (picks >= targets[:, None])


def de_mutate(pop, i: int, alpha_s: float, rng) -> np.ndarray:
    """Mutant ``x_r1 + alpha_s * (x_r2 - x_r3)`` for target ``i``."""
    pop = np.asarray(pop, dtype=float)
    r1, r2, r3 = de_donors(len(pop), rng, [i])[0]
    return pop[r1] + alpha_s * (pop[r2] - pop[r3])


def de_crossover(target, mutant, p_cr: float, rng) -> np.ndarray:
    """Binomial crossover: take the mutant coordinate when ``rand <= p_cr`` or at ``j_r``."""
    target = np.asarray(target, dtype=float)
    mutant = np.asarray(mutant, dtype=float)
    if target.shape != mutant.shape or target.ndim != 1:
        raise ValueError("target and mutant must be vectors of equal length")
    d = target.shape[0]
    take = rng.random(d) <= p_cr
    take[rng.integers(0, d)] = True
    return np.where(take, mutant, target)


def de_select(target, trial, f_target: float, f_trial: float):
    """Keep the trial when it is no worse than the target."""
    if f_trial <= f_target:
        return trial, f_trial
    return target, f_target


def de_run(config: DeConfig, objective: ObjectiveSpec, on_generation=None) -> RunTrace:
    """DE/rand/1/bin with synchronous replacement.

    ``on_generation(t, X, fitness)``, if given, is called after every
    generation's selection (and once for ``t = 0``).
    """
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    noise_rng = noise_stream(objective, config.seed)
    lb, ub = objective.lb, objective.ub
    n, d = config.pop_size, objective.dim
    X = lb + rng.random((n, d)) * (ub - lb)
    fitness = _evaluate(objective, X, noise_rng)
    meta = {
        "variant": "rand/1/bin",
        "scale_factor": config.scale_factor,
        "crossover_rate": config.crossover_rate,
        "boundary": "clamp",
        "pop_size": n,
        "max_iters": config.max_iters,
    }
    trace = start_trace("de", objective, config.seed, X, fitness, meta)
    if on_generation is not None:
        on_generation(0, X, fitness)
    for t in range(1, config.max_iters + 1):
        donors = de_donors(n, rng)
        V = X[donors[:, 0]] + config.scale_factor * (X[donors[:, 1]] - X[donors[:, 2]])
        take = rng.random((n, d)) <= config.crossover_rate
        take[np.arange(n), rng.integers(0, d, size=n)] = True
        U = np.clip(np.where(take, V, X), lb, ub)
        f_trial = _evaluate(objective, U, noise_rng)
        keep = f_trial <= fitness
        X = np.where(keep[:, None], U, X)
        fitness = np.where(keep, f_trial, fitness)
        update_best(trace.best, U, f_trial)
        trace.record(t, fitness, trace.best.eval_count)
        if on_generation is not None:
            on_generation(t, X, fitness)
    trace.true_best = float(true_value(objective, trace.best.x_best))
    trace.wall_time = time.perf_counter() - start
    return trace


def _tournament(fitness, k, count, rng) -> np.ndarray:
    entrants = rng.integers(0, len(fitness), size=(count, k))
    winners = np.argmin(fitness[entrants], axis=1)
    return entrants[np.arange(count), winners]


def ga_run(config: GaConfig, objective: ObjectiveSpec) -> RunTrace:
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    noise_rng = noise_stream(objective, config.seed)
    lb, ub = objective.lb, objective.ub
    n, d = config.pop_size, objective.dim
    p_mut = 1.0 / d if config.mutation_prob is None else config.mutation_prob
    sigma = config.mutation_sigma * (ub - lb)
    X = lb + rng.random((n, d)) * (ub - lb)
    fitness = _evaluate(objective, X, noise_rng)
    meta = {
        "selection": f"tournament k={config.tournament_size}",
        "crossover": f"uniform p={config.crossover_prob}",
        "mutation": f"gaussian per-gene p={p_mut:.6g} sigma={config.mutation_sigma}*width",
        "elitism": 1,
        "boundary": "clamp",
        "pop_size": n,
        "max_iters": config.max_iters,
    }
    trace = start_trace("ga", objective, config.seed, X, fitness, meta)
    for t in range(1, config.max_iters + 1):
        elite = int(np.argmin(fitness))
        pa = X[_tournament(fitness, config.tournament_size, n, rng)]
        pb = X[_tournament(fitness, config.tournament_size, n, rng)]
        mate = rng.random(n) < config.crossover_prob
        mask = (rng.random((n, d)) < 0.5) & mate[:, None]
        children = np.where(mask, pb, pa)
        mutate = rng.random((n, d)) < p_mut
        children = children + mutate * sigma * rng.standard_normal((n, d))
        children = np.clip(children, lb, ub)
        children[0] = X[elite]
        X = children
        fitness = _evaluate(objective, X, noise_rng)
        update_best(trace.best, X, fitness)
        trace.record(t, fitness, trace.best.eval_count)
    trace.true_best = float(true_value(objective, trace.best.x_best))
    trace.wall_time = time.perf_counter() - start
    return trace
