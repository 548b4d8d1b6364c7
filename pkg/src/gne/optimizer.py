"""Graph Neural Evolution optimizer.

Each iteration builds a cosine-similarity graph over the current population,
filters the population in the Laplacian eigenbasis and resamples it with
annealed Gaussian noise. Samples are centred on a rank-weighted recombination
of the filtered elites, or with probability ``p_e`` on a raw elite of the last
evaluated generation. The best-so-far individual is always reinjected.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from gne import spectral
from gne.benchmarks import ObjectiveSpec, evaluate_batch, true_value
from gne.spectral import FilterSpec
from gne.trace import BestRecord, RunTrace, start_trace, update_best

__all__ = [
    "GneConfig",
    "GneState",
    "default_filter",
    "default_filter_schedule",
    "elite_center",
    "elite_count",
    "filter_for",
    "gne_run",
    "gne_step",
    "init_population",
    "phi_sample",
    "psi",
    "recombination_weights",
    "select_elites",
    "sigma_schedule",
    "spectral_update",
]

FilterSchedule = Callable[[int, int], FilterSpec]


def default_filter(beta: float) -> FilterSpec:
    """Blend of the all-pass filter and the low-pass ``(1 - lam/2)^2``.

    ``g(lam) = (1 - beta) + beta * (1 - lam/2)^2`` written as an order-3
    Chebyshev series in ``t = lam - 1``: ``(1 - lam/2)^2 = 3/8 - T1/2 + T2/8``.
    """
    return FilterSpec((1.0 - beta + 0.375 * beta, -0.5 * beta, 0.125 * beta, 0.0))


def default_filter_schedule(t: int, max_iters: int) -> FilterSpec:
    """Low-pass strength grows linearly from ~0 at ``t = 1`` to 1 at ``t = T``."""
    return default_filter(t / max_iters)


@dataclass(frozen=True)
class GneConfig:
    """Hyperparameters of a GNE run.

    ``filter`` is either a fixed :class:`FilterSpec` or a callable
    ``(t, T) -> FilterSpec`` giving the filter for iteration ``t``.
    ``sigma_initial`` and ``sigma_final`` are fractions of the narrowest
    box width.
    """

    pop_size: int = 30
    max_iters: int = 500
    filter: Union[FilterSpec, FilterSchedule] = default_filter_schedule
    elite_fraction: float = 0.3
    elite_resample_prob: float = 0.2
    sigma_initial: float = 0.3
    sigma_final: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("pop_size must be at least 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not 0.0 < self.elite_fraction <= 1.0:
            raise ValueError("elite_fraction must lie in (0, 1]")
        if not 0.0 <= self.elite_resample_prob <= 1.0:
            raise ValueError("elite_resample_prob must lie in [0, 1]")
        if not self.sigma_initial >= self.sigma_final > 0.0:
            raise ValueError("need sigma_initial >= sigma_final > 0")
        if not (isinstance(self.filter, FilterSpec) or callable(self.filter)):
            raise TypeError("filter must be a FilterSpec or a callable schedule")

    @property
    def n_elites(self) -> int:
        return elite_count(self.elite_fraction, self.pop_size)

    def describe_filter(self) -> Union[list, str]:
        if isinstance(self.filter, FilterSpec):
            return list(self.filter.cheb_coeffs)
        if self.filter is default_filter_schedule:
            return "default:(1-t/T)+(t/T)*(1-lam/2)^2"
        return getattr(self.filter, "__name__", "custom")


def filter_for(config: GneConfig, t: int) -> FilterSpec:
    if isinstance(config.filter, FilterSpec):
        return config.filter
    return config.filter(t, config.max_iters)


@dataclass
class GneState:
    """Mutable per-run state: generators and the best-so-far record."""

    rng: np.random.Generator
    noise_rng: np.random.Generator
    best: BestRecord = None
    meta: dict = field(default_factory=dict)


def init_population(config: GneConfig, objective: ObjectiveSpec, rng=None) -> np.ndarray:
    """Uniform draw in the box, ``(pop_size, dim)``; seeded by ``config.seed`` if no rng is given."""
    lb, ub = objective.lb, objective.ub
    if not np.all(lb < ub):
        raise ValueError("every coordinate needs lb < ub")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    return lb + rng.random((config.pop_size, objective.dim)) * (ub - lb)


def sigma_schedule(config: GneConfig, objective: ObjectiveSpec, t: int) -> float:
    """Geometric decay from ``w*sigma_initial`` at ``t=1`` to ``w*sigma_final`` at ``t=T``.

    ``w`` is the narrowest box width.
    """
    T = config.max_iters
    if not 1 <= t <= T:
        raise ValueError(f"iteration {t} outside 1..{T}")
    w = float(np.min(objective.width))
    if T == 1:
        return w * config.sigma_initial
    frac = (t - 1) / (T - 1)
    return w * config.sigma_initial * (config.sigma_final / config.sigma_initial) ** frac


def elite_count(rho: float, n: int) -> int:
    """``rho * n`` rounded half up, at least one."""
    return max(1, math.floor(rho * n + 0.5))


def select_elites(fitness, rho: float) -> np.ndarray:
    """Indices of the ``elite_count(rho, N)`` smallest fitness values; ties go to the lower index."""
    fitness = np.asarray(fitness, dtype=float)
    if not np.all(np.isfinite(fitness)):
        raise ValueError("fitness contains non-finite values")
    k = elite_count(rho, fitness.size)
    return np.argsort(fitness, kind="stable")[:k]


def psi(X: np.ndarray) -> np.ndarray:
    """Pre-filter encoder; the identity map."""
    return X


def spectral_update(X: np.ndarray, filt: FilterSpec) -> np.ndarray:
    """Filter the population's deviations from its centroid on its own cosine graph.

    Returns ``x0 + g(L) (X - x0)`` with ``x0`` the column mean, so a global
    translation of ``X`` translates the output identically.
    """
    A = spectral.cosine_adjacency(X)
    spec = spectral.graph_spectrum(A)
    x0 = X.mean(axis=0)
    return x0 + spectral.apply_filter(spec, filt, X - x0)


def recombination_weights(mu: int) -> np.ndarray:
    """Log-rank weights ``ln(mu + 1/2) - ln(k)``, ``k = 1..mu``, normalized to sum 1."""
    if mu < 1:
        raise ValueError("need at least one elite")
    w = math.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
    return w / w.sum()


def elite_center(filtered, elite_idx) -> np.ndarray:
    """Weighted mean of the filtered rows of the elites, best elite first."""
    filtered = np.asarray(filtered, dtype=float)
    elite_idx = np.asarray(elite_idx)
    return recombination_weights(len(elite_idx)) @ filtered[elite_idx]


def phi_sample(filtered, elites, best: BestRecord, sigma_t: float, p_e: float, rng,
               lb=None, ub=None, center=None) -> np.ndarray:
    """Post-filter sampler.

    Row ``i`` is redrawn as ``c_i + sigma_t * eps_i``. With probability
    ``p_e`` the centre ``c_i`` is a uniformly chosen raw elite; otherwise it
    is ``center`` when given (a recombined point broadcast to every row) or
    the filtered row itself. Row 0 then becomes ``best.x_best`` and every row
    is clamped to the box.

    Parameters
    ----------
    filtered : ndarray, shape (N, d)
        Output of the spectral update.
    elites : ndarray, shape (m, d)
        Elite rows of the last evaluated generation.
    best : BestRecord
        Best-so-far record; ``x_best`` is reinjected unchanged.
    sigma_t : float
        Absolute noise scale, must be positive.
    p_e : float
        Elite resampling probability.
    rng : numpy.random.Generator
    lb, ub : array_like, optional
        Box for clamping.
    center : array_like, shape (d,), optional
        Shared centre for non-elite rows.
    """
    filtered = np.asarray(filtered, dtype=float)
    if not np.all(np.isfinite(filtered)):
        raise spectral.NumericalError("filtered population is not finite")
    if sigma_t <= 0:
        raise ValueError("sigma_t must be positive")
    elites = np.atleast_2d(np.asarray(elites, dtype=float))
    if elites.shape[1] != filtered.shape[1]:
        raise ValueError("elites and population have different dimensions")
    n, d = filtered.shape
    base = filtered
    if center is not None:
        center = np.asarray(center, dtype=float)
        if center.shape != (d,):
            raise ValueError("center must be a single point of the population's dimension")
        base = np.broadcast_to(center, (n, d))
    use_elite = rng.random(n) < p_e
    pick = rng.integers(0, len(elites), size=n)
    eps = rng.standard_normal((n, d))
    out = np.where(use_elite[:, None], elites[pick], base) + sigma_t * eps
    out[0] = best.x_best
    if lb is not None:
        np.clip(out, lb, ub, out=out)
    return out


def gne_step(X, fitness, config: GneConfig, objective: ObjectiveSpec, t: int, state: GneState):
    """One GNE iteration; returns the evaluated new population, its fitness and the best record.

    ``state.best`` is updated in place when the new generation contains a
    strictly better individual.
    """
    filt = filter_for(config, t)
    X_hat = spectral_update(psi(X), filt)
    idx = select_elites(fitness, config.elite_fraction)
    sigma_t = sigma_schedule(config, objective, t)
    X_new = phi_sample(X_hat, X[idx], state.best, sigma_t, config.elite_resample_prob,
                       state.rng, objective.lb, objective.ub, center=elite_center(X_hat, idx))
    f_new = _evaluate(objective, X_new, state.noise_rng)
    update_best(state.best, X_new, f_new)
    return X_new, f_new, state.best


def _evaluate(objective, X, noise_rng):
    try:
        f = evaluate_batch(objective, X, noise_rng)
    except Exception as exc:
        raise RuntimeError(f"objective {objective.function_id} failed: {exc}") from exc
    if not np.all(np.isfinite(f)):
        raise RuntimeError(f"objective {objective.function_id} returned non-finite values")
    return f


def noise_stream(objective: ObjectiveSpec, seed: int) -> np.random.Generator:
    """Per-run noise generator keyed on the objective's noise seed and the run seed."""
    return np.random.default_rng([objective.noise_seed, int(seed) & 0xFFFFFFFFFFFFFFFF, 1])


def gne_run(config: GneConfig, objective: ObjectiveSpec, X0=None) -> RunTrace:
    """Full GNE run: initialize, evaluate, then ``max_iters`` filtered generations.

    ``X0`` overrides the random initial population (shape ``(pop_size, dim)``).
    """
    start = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    if X0 is None:
        X = init_population(config, objective, rng)
    else:
        X = np.array(X0, dtype=float)
        if X.shape != (config.pop_size, objective.dim):
            raise ValueError(f"X0 has shape {X.shape}, expected {(config.pop_size, objective.dim)}")
    state = GneState(rng, noise_stream(objective, config.seed))
    fitness = _evaluate(objective, X, state.noise_rng)
    meta = {
        "adjacency": "cosine of centroid differences, negatives clipped to 0, unit self-loops",
        "filter_domain": "centroid-centered population",
        "filter": config.describe_filter(),
        "phi": "gaussian around log-rank-weighted mean of filtered elites, raw elite w.p. p_e, best reinjected",
        "boundary": "clamp",
        "elite_fraction": config.elite_fraction,
        "elite_resample_prob": config.elite_resample_prob,
        "sigma_initial": config.sigma_initial,
        "sigma_final": config.sigma_final,
        "pop_size": config.pop_size,
        "max_iters": config.max_iters,
    }
    trace = start_trace("gne", objective, config.seed, X, fitness, meta)
    state.best = trace.best
    for t in range(1, config.max_iters + 1):
        X, fitness, _ = gne_step(X, fitness, config, objective, t, state)
        trace.record(t, fitness, state.best.eval_count)
    trace.true_best = float(true_value(objective, trace.best.x_best))
    trace.wall_time = time.perf_counter() - start
    return trace
