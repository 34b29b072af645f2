"""Particle swarm optimization driven by chaotic maps and PRNG distributions."""

from ._backend import BACKEND
from .analysis import (
    autocorr_auc,
    autocorrelation,
    invariant_density,
    lyapunov_exponent,
)
from .functions import evaluate, list_suite, metadata
from .pso import SwarmConfig, distance_error, init_swarm, run_single, step_generation
from .sources import (
    DEFAULT_SOURCES,
    DistributionSpec,
    MapSpec,
    SequenceSource,
    make_source,
    map_derivative,
    map_step,
    next_value,
    source_for,
    spec_for,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DEFAULT_SOURCES",
    "DistributionSpec",
    "MapSpec",
    "SequenceSource",
    "SwarmConfig",
    "autocorr_auc",
    "autocorrelation",
    "distance_error",
    "evaluate",
    "init_swarm",
    "invariant_density",
    "list_suite",
    "lyapunov_exponent",
    "make_source",
    "map_derivative",
    "map_step",
    "metadata",
    "next_value",
    "run_single",
    "source_for",
    "spec_for",
    "step_generation",
]
