"""Benchmark objectives with box bounds, additive noise and optimum shifting.

Every function is written for a batch of points: ``x`` has shape ``(..., d)``
and the result has shape ``(...)``. All nine have a global minimum value of 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "FUNCTIONS",
    "NOISE_MODES",
    "ObjectiveSpec",
    "evaluate",
    "evaluate_batch",
    "make_objective",
    "optimizer_point",
    "registry",
    "true_value",
]

NOISE_MODES = ("none", "uniform01")

# argmax of x*sin(sqrt(x)) on [0, 500] and the maximum it attains
_SCHWEFEL226_X = 420.96874635998202731
_SCHWEFEL226_F = 418.98288727243370627


def sphere(x):
    return np.sum(x * x, axis=-1)


def schwefel12(x):
    return np.sum(np.cumsum(x, axis=-1) ** 2, axis=-1)


def schwefel222(x):
    a = np.abs(x)
    return np.sum(a, axis=-1) + np.prod(a, axis=-1)


def schwefel226(x):
    d = x.shape[-1]
    return _SCHWEFEL226_F * d - np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=-1)


def rosenbrock(x):
    head, tail = x[..., :-1], x[..., 1:]
    return np.sum(100.0 * (tail - head * head) ** 2 + (1.0 - head) ** 2, axis=-1)


def quartic(x):
    i = np.arange(1, x.shape[-1] + 1)
    return np.sum(i * x**4, axis=-1)


def rastrigin(x):
    return np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x) + 10.0, axis=-1)


def ackley(x, a=20.0, b=0.2, c=2.0 * np.pi):
    d = x.shape[-1]
    s1 = np.sqrt(np.sum(x * x, axis=-1) / d)
    s2 = np.sum(np.cos(c * x), axis=-1) / d
    return a + np.e - a * np.exp(-b * s1) - np.exp(s2)


def levy(x):
    w = 1.0 + (x - 1.0) / 4.0
    first = np.sin(np.pi * w[..., 0]) ** 2
    wi = w[..., :-1]
    middle = np.sum((wi - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * wi + 1.0) ** 2), axis=-1)
    wd = w[..., -1]
    last = (wd - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * wd) ** 2)
    return first + middle + last


# name -> (function, default half-width or (lb, ub), optimizer coordinate)
FUNCTIONS = {
    "sphere": (sphere, (-100.0, 100.0), 0.0),
    "schwefel12": (schwefel12, (-100.0, 100.0), 0.0),
    "schwefel222": (schwefel222, (-10.0, 10.0), 0.0),
    "schwefel226": (schwefel226, (-500.0, 500.0), _SCHWEFEL226_X),
    "rosenbrock": (rosenbrock, (-30.0, 30.0), 1.0),
    "quartic": (quartic, (-1.28, 1.28), 0.0),
    "rastrigin": (rastrigin, (-5.12, 5.12), 0.0),
    "ackley": (ackley, (-32.768, 32.768), 0.0),
    "levy": (levy, (-10.0, 10.0), 1.0),
}


@dataclass(frozen=True)
class ObjectiveSpec:
    """A benchmark instance: function, dimension, box, noise mode and shift.

    ``lb`` and ``ub`` are per-coordinate bounds; ``shift`` moves the global
    optimizer by ``+shift`` without changing the optimal value.
    """

    function_id: str
    dim: int
    lb: np.ndarray = field(repr=False)
    ub: np.ndarray = field(repr=False)
    noise: str = "none"
    shift: np.ndarray = field(default=None, repr=False)
    noise_seed: int = 0

    def __post_init__(self):
        if self.function_id not in FUNCTIONS:
            raise ValueError(f"unknown function {self.function_id!r}")
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        if self.noise not in NOISE_MODES:
            raise ValueError(f"noise must be one of {NOISE_MODES}, got {self.noise!r}")
        lb = np.broadcast_to(np.asarray(self.lb, dtype=float), (self.dim,)).copy()
        ub = np.broadcast_to(np.asarray(self.ub, dtype=float), (self.dim,)).copy()
        if not np.all(lb < ub):
            raise ValueError("every coordinate needs lb < ub")
        shift = 0.0 if self.shift is None else self.shift
        shift = np.broadcast_to(np.asarray(shift, dtype=float), (self.dim,)).copy()
        for arr in (lb, ub, shift):
            arr.setflags(write=False)
        object.__setattr__(self, "lb", lb)
        object.__setattr__(self, "ub", ub)
        object.__setattr__(self, "shift", shift)

    @property
    def width(self) -> np.ndarray:
        return self.ub - self.lb

    @property
    def noisy(self) -> bool:
        return self.noise != "none"

    @property
    def optimum_value(self) -> float:
        return 0.0

    def with_noise(self, noise: str) -> ObjectiveSpec:
        return replace(self, noise=noise)

    def with_shift(self, shift, move_bounds: bool = False) -> ObjectiveSpec:
        """Copy with the optimizer moved by ``shift``; optionally move the box too."""
        shift = np.broadcast_to(np.asarray(shift, dtype=float), (self.dim,))
        if move_bounds:
            return replace(self, shift=self.shift + shift, lb=self.lb + shift, ub=self.ub + shift)
        return replace(self, shift=self.shift + shift)


def make_objective(name: str, dim: int = 30, *, noise: str = "none", shift=0.0,
                   noise_seed: int = 0) -> ObjectiveSpec:
    """Objective ``name`` with its default box."""
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}; choose from {sorted(FUNCTIONS)}")
    lo, hi = FUNCTIONS[name][1]
    return ObjectiveSpec(name, dim, lo, hi, noise=noise, shift=shift, noise_seed=noise_seed)


def registry(dim: int = 30) -> list[ObjectiveSpec]:
    """The nine default objectives, noise-free and unshifted."""
    return [make_objective(name, dim) for name in FUNCTIONS]


def optimizer_point(spec: ObjectiveSpec) -> np.ndarray:
    """Location of the global minimum (including the shift)."""
    return np.full(spec.dim, FUNCTIONS[spec.function_id][2]) + spec.shift


def _check_points(spec: ObjectiveSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (spec.dim,):
        raise ValueError(f"expected points of dimension {spec.dim}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("objective input contains non-finite entries")
    return x


def true_value(spec: ObjectiveSpec, x):
    """Noise-free objective value(s) ``f(x - shift)``."""
    x = _check_points(spec, x)
    out = FUNCTIONS[spec.function_id][0](x - spec.shift)
    return float(out) if np.ndim(out) == 0 else out


def evaluate(spec: ObjectiveSpec, x, rng: np.random.Generator | None = None):
    """Objective value(s) at ``x``, plus fresh ``Uniform[0, 1)`` noise if enabled.

    Parameters
    ----------
    spec : ObjectiveSpec
    x : array_like, shape (d,) or (n, d)
    rng : numpy.random.Generator, optional
        Noise stream. Required when ``spec.noise`` is not ``"none"``; draws
        one variate per evaluated point, in row order.
    """
    f = true_value(spec, x)
    if not spec.noisy:
        return f
    if rng is None:
        raise ValueError("a noise generator is required for noisy objectives")
    eta = rng.random(np.shape(f))
    return f + eta if np.ndim(f) else float(f + eta)


def evaluate_batch(spec: ObjectiveSpec, X, rng=None) -> np.ndarray:
    """Evaluate every row of ``X``; always returns a 1-D array."""
    return np.atleast_1d(evaluate(spec, np.atleast_2d(X), rng))
