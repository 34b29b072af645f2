"""The 27-entry benchmark suite, all exposed as minimization problems.

Niching problems 1-6 follow the CEC 2013 niching competition definitions
(Li, Engelbrecht, Epitropakis, "Benchmark Functions for CEC'2013 Special
Session and Competition on Niching Methods for Multimodal Function
Optimization", 2013). Maximization problems are negated once, here, so
``f_star`` is the post-negation optimum. The classical problems 7-27 use the
textbook definitions and bounds of Yao, Liu, Lin, "Evolutionary Programming
Made Faster", IEEE TEVC 3(2), 1999 (functions f1, f5, f9-f13).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._backend import core


@dataclass(frozen=True)
class BenchmarkFunction:
    id: int
    name: str
    dim: int
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    direction: str
    f_star: float
    family: int
    known_optimizers: tuple[tuple[float, ...], ...] | None = None

    @property
    def bounds(self):
        return list(zip(self.lower, self.upper))

    def __call__(self, x):
        return evaluate(self, x)


def _box(lo, hi, dim):
    return (float(lo),) * dim, (float(hi),) * dim


def _vincent_optima(dim):
    # sin(10 ln x) = 1 at ln x = (pi/2 + 2 pi k)/10; k = -2..3 fall in [0.25, 10]
    roots = [math.exp((math.pi / 2 + 2 * math.pi * k) / 10) for k in range(-2, 4)]
    grid = np.array(np.meshgrid(*[roots] * dim, indexing="ij")).reshape(dim, -1).T
    return tuple(tuple(float(v) for v in row) for row in grid)


def _build():
    out = []

    def add(name, dim, lo, hi, direction, f_star, family, optimizers=None):
        lower, upper = (lo, hi) if isinstance(lo, tuple) else _box(lo, hi, dim)
        out.append(BenchmarkFunction(len(out) + 1, name, dim, lower, upper, direction,
                                     f_star, family, optimizers))

    # CEC 2013 niching F1: max sin^6(5 pi x), five optima of height 1
    add("Equal Maxima", 1, 0.0, 1.0, "max", -1.0, 1,
        tuple((v,) for v in (0.1, 0.3, 0.5, 0.7, 0.9)))
    # CEC 2013 niching F3: published optimum 1.0 (attained to ~2e-7 near x=0.0797)
    add("Uneven Decreasing Maxima", 1, 0.0, 1.0, "max", -1.0, 2)
    # sum of squared residuals form; four roots with value 0
    add("Himmelblau", 2, -6.0, 6.0, "min", 0.0, 3,
        ((3.0, 2.0),
         (-2.8051180869527452, 3.131312518250573),
         (-3.779310253377747, -3.283185991286169),
         (3.5844283403304917, -1.8481265269644034)))
    # CEC 2013 niching F5: optimum 1.031628453489877 before negation
    add("Six-Hump Camel Back", 2, (-1.9, -1.1), (1.9, 1.1), "max", -1.031628453489877, 4,
        ((0.08984200651937332, -0.7126564084370965),
         (-0.08984201943108247, 0.7126563966263553)))
    # CEC 2013 niching F6: optimum 186.7309088310239 before negation, 18 global optima
    add("Shubert", 2, -10.0, 10.0, "max", -186.7309088310239, 5)
    # CEC 2013 niching F7: optimum 1.0 before negation, 6^D global optima
    add("Vincent", 2, 0.25, 10.0, "max", -1.0, 6, _vincent_optima(2))
    classical = [
        ("Rastrigin", -5.12, 5.12, 7, 0.0),
        ("Rosenbrock", -30.0, 30.0, 8, 1.0),
        ("Sphere", -100.0, 100.0, 9, 0.0),
        ("Ackley", -32.0, 32.0, 10, 0.0),
        ("Griewank", -600.0, 600.0, 11, 0.0),
        ("Penalized1", -50.0, 50.0, 12, -1.0),
        ("Penalized2", -50.0, 50.0, 13, 1.0),
    ]
    for name, lo, hi, fam, at in classical:
        for dim in (10, 20, 30):
            add(name, dim, lo, hi, "min", 0.0, fam, ((at,) * dim,))
    return tuple(out)


SUITE = _build()


def get(fid):
    if isinstance(fid, BenchmarkFunction):
        return fid
    try:
        fid = int(fid)
    except (TypeError, ValueError):
        raise KeyError(f"unknown function id: {fid}") from None
    if not 1 <= fid <= len(SUITE):
        raise KeyError(f"unknown function id: {fid}")
    return SUITE[fid - 1]


def with_bounds(fid, lo, hi):
    """Copy of a suite entry with a uniform box override."""
    fn = get(fid)
    lower, upper = _box(lo, hi, fn.dim)
    if not lo < hi:
        raise ValueError("lower bound must be below upper bound")
    return replace(fn, lower=lower, upper=upper)


def evaluate(fid, x):
    fn = get(fid)
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != fn.dim:
        raise ValueError(f"{fn.name} expects a vector of length {fn.dim}, got shape {x.shape}")
    return core.evaluate(fn.family, x)


def evaluate_many(fid, xs):
    fn = get(fid)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != fn.dim:
        raise ValueError(f"{fn.name} expects rows of length {fn.dim}")
    return core.evaluate_many(fn.family, xs)


def metadata(fid):
    fn = get(fid)
    return fn.name, fn.dim, fn.bounds, fn.direction, fn.f_star


def list_suite():
    return list(SUITE)
