"""Graph Neural Evolution: population-as-graph spectral filtering for
continuous black-box optimization, with DE/GA baselines and a benchmark
harness."""

from gne.benchmarks import ObjectiveSpec, evaluate, registry, true_value
from gne.optimizer import GneConfig, gne_run
from gne.baselines import DeConfig, GaConfig, de_run, ga_run
from gne.trace import BestRecord, RunTrace

__version__ = "0.1.0"

__all__ = [
    "BestRecord",
    "DeConfig",
    "GaConfig",
    "GneConfig",
    "ObjectiveSpec",
    "RunTrace",
    "de_run",
    "evaluate",
    "ga_run",
    "gne_run",
    "registry",
    "true_value",
]
