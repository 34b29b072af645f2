"""Global-best particle swarm optimization driven by a sequence source."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import functions
from .sources import SequenceSource, spec_for


@dataclass(frozen=True)
class SwarmConfig:
    w: float = 0.79
    c1: float = 1.49
    c2: float = 1.49
    swarm_size: int = 100
    generations: int = 200
    scalar_draws: bool = False  # one r1, r2 per particle instead of per coordinate

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ValueError("swarm_size must be at least 1")
        if self.generations < 0:
            raise ValueError("generations must be non-negative")
        for name in ("w", "c1", "c2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass
class SwarmState:
    x: np.ndarray
    v: np.ndarray
    p_local: np.ndarray
    f_local: np.ndarray
    p_global: np.ndarray
    f_global: float
    t: int = 0
    f_current: np.ndarray = field(default=None)


@dataclass(frozen=True)
class RunResult:
    function_id: int
    source_id: str
    run_index: int
    seed: int
    best_value: float
    distance_error: float
    status: str = "ok"


class ObjectiveError(RuntimeError):
    """Raised when the objective returns a non-finite value."""

    def __init__(self, function_id, x):
        self.function_id = function_id
        self.x = np.asarray(x, dtype=float)
        super().__init__(f"non-finite objective on function {function_id} at x={self.x.tolist()}")


def _box(fn):
    return np.asarray(fn.lower, dtype=float), np.asarray(fn.upper, dtype=float)


def _eval(fn, x):
    f = functions.evaluate(fn, x)
    if not math.isfinite(f):
        raise ObjectiveError(fn.id, x)
    return f


def init_swarm(config, function, source):
    """Positions drawn per coordinate from the source, zero velocities."""
    fn = functions.get(function)
    lo, hi = _box(fn)
    n, d = config.swarm_size, fn.dim
    x = np.empty((n, d))
    for i in range(n):
        for j in range(d):
            x[i, j] = min(max(lo[j] + (hi[j] - lo[j]) * source.next_value(), lo[j]), hi[j])
    f = np.array([_eval(fn, x[i]) for i in range(n)])
    best = int(np.argmin(f))
    return SwarmState(x, np.zeros((n, d)), x.copy(), f.copy(), x[best].copy(), float(f[best]),
                      0, f.copy())


def step_generation(state, config, function, source):
    """One synchronous generation: velocities, positions, then bests."""
    fn = functions.get(function)
    lo, hi = _box(fn)
    w, c1, c2 = config.w, config.c1, config.c2
    n, d = state.x.shape
    r1 = r2 = 0.0
    for i in range(n):
        if config.scalar_draws:
            r1 = source.next_value()
            r2 = source.next_value()
        for j in range(d):
            if not config.scalar_draws:
                r1 = source.next_value()
                r2 = source.next_value()
            xv = state.x[i, j]
            state.v[i, j] = (w * state.v[i, j] + c1 * r1 * (state.p_local[i, j] - xv)
                             + c2 * r2 * (state.p_global[j] - xv))
            state.x[i, j] = min(max(xv + state.v[i, j], lo[j]), hi[j])
        f = _eval(fn, state.x[i])
        state.f_current[i] = f
        if f < state.f_local[i]:
            state.f_local[i] = f
            state.p_local[i] = state.x[i]
    best = int(np.argmin(state.f_local))
    if state.f_local[best] < state.f_global:
        state.f_global = float(state.f_local[best])
        state.p_global = state.p_local[best].copy()
    state.t += 1
    return state


def distance_error(best_value, function):
    return abs(best_value - functions.get(function).f_star)


def position_error(best_x, function):
    """Euclidean distance to the nearest listed optimizer."""
    fn = functions.get(function)
    if not fn.known_optimizers:
        raise ValueError(f"{fn.name} has no listed optimizers")
    opts = np.asarray(fn.known_optimizers)
    return float(np.min(np.linalg.norm(opts - np.asarray(best_x), axis=1)))


def optimize(config, function, source, trace=None):
    """Run the compiled loop on an existing source; returns (best_value, best_x)."""
    fn = functions.get(function)
    lo, hi = _box(fn)
    status, best, x = source._core.run_pso(
        fn.family, fn.dim, lo, hi, config.w, config.c1, config.c2,
        config.swarm_size, config.generations, config.scalar_draws, trace)
    if status:
        raise ObjectiveError(fn.id, x)
    return best, x


def run_single(config, function, source_id, seed, run_index=0, error_metric="value", spec=None):
    """One seeded run from a fresh source."""
    fn = functions.get(function)
    src = SequenceSource(spec if spec is not None else spec_for(source_id), seed, source_id)
    best, x = optimize(config, fn, src)
    if error_metric == "value":
        err = distance_error(best, fn)
    elif error_metric == "position":
        err = position_error(x, fn)
    else:
        raise ValueError(f"unknown error metric: {error_metric}")
    return RunResult(fn.id, str(source_id), run_index, seed, best, err)
