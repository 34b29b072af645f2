"""Chaotic-map and PRNG-backed sequence sources emitting values in [0, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping

import numpy as np

from ._backend import core
from .seeding import analysis_seed

BURN_IN = 100


class MapFamily(str, Enum):
    LOGISTIC = "logistic"
    CHEBYSHEV = "chebyshev"
    WEIERSTRASS = "weierstrass"
    TENT = "tent"
    CUBIC = "cubic"
    BELLOWS = "bellows"


class DistFamily(str, Enum):
    BETA = "beta"
    NORMAL = "normal"
    UNIFORM = "uniform"


_MAP_CODE = {
    MapFamily.LOGISTIC: 0,
    MapFamily.CHEBYSHEV: 1,
    MapFamily.WEIERSTRASS: 2,
    MapFamily.TENT: 3,
    MapFamily.CUBIC: 4,
    MapFamily.BELLOWS: 5,
}

MAP_DEFAULTS = {
    MapFamily.LOGISTIC: {"r": 4.0},
    MapFamily.CHEBYSHEV: {"a": 6.0},
    MapFamily.WEIERSTRASS: {"a": 0.999, "b": 101, "N": 100},
    MapFamily.TENT: {"r": 2.0},
    MapFamily.CUBIC: {"r": 2.62},
    MapFamily.BELLOWS: {"r": 2.0},
}

# Seed interval, admissible raw domain, and states that pin the orbit.
_SEED_INTERVAL = {
    MapFamily.LOGISTIC: (0.0, 1.0),
    MapFamily.CHEBYSHEV: (-1.0, 1.0),
    MapFamily.WEIERSTRASS: (-1.0, 1.0),
    MapFamily.TENT: (0.0, 1.0),
    MapFamily.CUBIC: (-1.0, 1.0),
    MapFamily.BELLOWS: (0.0, 1.2),
}
_DEGENERATE = {
    MapFamily.LOGISTIC: (0.0, math.nan),
    MapFamily.CHEBYSHEV: (1.0, -1.0),
    MapFamily.WEIERSTRASS: (math.nan, math.nan),
    MapFamily.TENT: (0.0, math.nan),
    MapFamily.CUBIC: (0.0, math.nan),
    MapFamily.BELLOWS: (0.0, math.nan),
}

# Global orbit bounds for the default parameters: min/max over 100 seeds x
# 10^4 iterations after burn-in, see ``estimate_rescale``. Regenerated and
# checked by tests/test_sources.py.
FROZEN_RESCALE = {
    MapFamily.WEIERSTRASS: (-32.2611322071566, 34.1249574729421),
    MapFamily.CUBIC: (-1.0084384701837907, 1.0084384701652158),
    MapFamily.BELLOWS: (0.48216930823487236, 1.2745408188860226),
}
RESCALE_SEEDS = 100
RESCALE_ITERS = 10_000
RESCALE_MASTER = 0x5EED


def _freeze(params):
    return MappingProxyType(dict(params))


@dataclass(frozen=True)
class MapSpec:
    family: MapFamily
    params: Mapping[str, float] = field(default=None)
    rescale: tuple[float, float] | None = None

    def __post_init__(self):
        fam = MapFamily(self.family)
        object.__setattr__(self, "family", fam)
        merged = dict(MAP_DEFAULTS[fam])
        for key, value in dict(self.params or {}).items():
            if key not in merged:
                raise ValueError(f"{key}: unknown parameter for the {fam.value} map")
            merged[key] = value
        for key, value in merged.items():
            if not math.isfinite(float(value)):
                raise ValueError(f"{key} must be finite")
        if fam is MapFamily.WEIERSTRASS:
            b, n, a = merged["b"], merged["N"], merged["a"]
            if int(b) != b or b < 1:
                raise ValueError("b must be a positive integer")
            if int(n) != n or not 0 <= n <= 127:
                raise ValueError("N must be an integer in 0..127")
            if not 0.0 < a < 1.0:
                raise ValueError("a must lie in (0, 1)")
            merged["b"], merged["N"] = int(b), int(n)
        elif fam is MapFamily.CHEBYSHEV:
            if merged["a"] <= 0:
                raise ValueError("a must be positive")
        elif merged["r"] <= 0:
            raise ValueError("r must be positive")
        object.__setattr__(self, "params", _freeze(merged))
        if self.rescale is None:
            object.__setattr__(self, "rescale", _default_rescale(self))
        lo, hi = self.rescale
        if not lo < hi:
            raise ValueError("rescale lo must be below hi")
        object.__setattr__(self, "rescale", (float(lo), float(hi)))

    @property
    def is_default(self):
        return dict(self.params) == MAP_DEFAULTS[self.family]

    def kernel(self):
        return _kernel(self.family, tuple(sorted(self.params.items())))


@dataclass(frozen=True)
class DistributionSpec:
    family: DistFamily
    params: tuple[float, float]
    clamp: bool = True
    resample: bool = False

    def __post_init__(self):
        fam = DistFamily(self.family)
        object.__setattr__(self, "family", fam)
        p0, p1 = (float(v) for v in self.params)
        object.__setattr__(self, "params", (p0, p1))
        if not (math.isfinite(p0) and math.isfinite(p1)):
            raise ValueError("distribution parameters must be finite")
        if fam is DistFamily.BETA:
            if p0 <= 0:
                raise ValueError("alpha must be positive")
            if p1 <= 0:
                raise ValueError("beta must be positive")
        elif fam is DistFamily.NORMAL:
            if p1 <= 0:
                raise ValueError("sigma must be positive")
        elif not p0 < p1:
            raise ValueError("uniform lo must be below hi")


def map_spec(family, rescale=None, **params):
    return MapSpec(MapFamily(family), params, rescale)


def _weierstrass_tables(a, b, n):
    """Per-term a^i, derivative weights a^i b^i pi, and b^i mod 2^1088.

    Any double has K <= 1075 in the exact phase reduction, so the low 1088
    bits of b^i are all the kernel ever needs.
    """
    a_pow, dcoef, bmod = [], [], []
    mask = (1 << 1088) - 1
    for i in range(n + 1):
        bi = b**i
        ap = a**i
        a_pow.append(ap)
        dcoef.append(ap * (float(bi) * math.pi))
        bmod.append(bi & mask)
    return a_pow, dcoef, bmod


@lru_cache(maxsize=None)
def _kernel(family, items):
    params = dict(items)
    code = _MAP_CODE[family]
    if family is MapFamily.WEIERSTRASS:
        tables = _weierstrass_tables(params["a"], params["b"], params["N"])
        return core.MapKernel(code, 0.0, tables)
    key = "a" if family is MapFamily.CHEBYSHEV else "r"
    return core.MapKernel(code, float(params[key]))


def _domain(spec):
    p = spec.params
    fam = spec.family
    if fam in (MapFamily.LOGISTIC, MapFamily.TENT):
        return 0.0, max(1.0, p["r"] / 2.0)
    if fam is MapFamily.CHEBYSHEV:
        return -1.0, 1.0
    if fam is MapFamily.WEIERSTRASS:
        s = sum(p["a"] ** i for i in range(p["N"] + 1))
        return -s, s
    if fam is MapFamily.CUBIC:
        return -1.5, 1.5
    return -p["r"], p["r"]


def _default_rescale(spec):
    fam = spec.family
    if fam in (MapFamily.LOGISTIC, MapFamily.TENT):
        return (0.0, 1.0)
    if fam is MapFamily.CHEBYSHEV:
        return (-1.0, 1.0)
    if spec.is_default:
        return FROZEN_RESCALE[fam]
    return _estimated_rescale(fam, tuple(sorted(spec.params.items())))


@lru_cache(maxsize=None)
def _estimated_rescale(family, items):
    spec = MapSpec(family, dict(items), rescale=(0.0, 1.0))
    return estimate_rescale(spec)


def estimate_rescale(spec, n_seeds=RESCALE_SEEDS, iters=RESCALE_ITERS, master=RESCALE_MASTER):
    """Global (min, max) of raw orbits over ``n_seeds`` seeded starts."""
    lo, hi = math.inf, -math.inf
    for k in range(n_seeds):
        seed = analysis_seed(master, spec.family.value, "rescale", k)
        orbit = _map_core(spec, seed).raw_orbit(iters)
        lo = min(lo, float(orbit.min()))
        hi = max(hi, float(orbit.max()))
    return lo, hi


def _map_core(spec, seed):
    fam = spec.family
    slo, shi = _SEED_INTERVAL[fam]
    dlo, dhi = _domain(spec)
    bad1, bad2 = _DEGENERATE[fam]
    conj = fam is MapFamily.TENT and spec.params["r"] == 2.0
    rlo, rhi = spec.rescale
    return core.MapSource(spec.kernel(), seed, slo, shi, dlo, dhi, rlo, rhi,
                          bad1, bad2, conj, BURN_IN)


BETA_TABLE_NODES = 4096
TAIL_CELLS = 64
TAIL_STEPS_PER_OCTAVE = 4


def _tail_table(a, b, top, depth):
    """ln F^-1 on log-spaced tail nodes u = top 2^(-k/4), k = 0..depth.

    Returned slopes are d ln q / dk, ready for cubic Hermite cells of unit
    width in k.
    """
    from scipy import special, stats

    k = np.arange(depth + 1)
    u = top * np.exp2(-k / TAIL_STEPS_PER_OCTAVE)
    q = special.betaincinv(a, b, u)
    tiny = q < 1e-300
    q = np.maximum(q, 5e-324)
    # elasticity d ln q / d ln u = u / (q f(q)); 1/a in the power-law limit
    rho = np.where(tiny, 1.0 / a, np.exp(np.log(u) - np.log(q) - stats.beta.logpdf(q, a, b)))
    L = np.log(q)
    dL = -math.log(2.0) / TAIL_STEPS_PER_OCTAVE * rho
    for arr in (L, dL):
        arr.setflags(write=False)
    return L, dL


@lru_cache(maxsize=None)
def beta_table(alpha, beta, nodes=BETA_TABLE_NODES):
    """Inverse-CDF table for Beta(alpha, beta) draws.

    Interior cells j/N .. (j+1)/N are cubic Hermite in u with nodes
    q_j = F^-1(j/N) and cell-scaled slopes 1/(N f(q_j)). The outer
    ``TAIL_CELLS`` cells on each side, where q is too curved for a cubic in u,
    use log-spaced tables in ln q down to the smallest nonzero uniform
    (2^-53), past which a power law takes over. Returns
    (q, dq, lower_tail, upper_tail, s_last, tail_scale) where each tail is
    (L, dL), the upper tail tabulates ln(1 - q) against 1 - u, and
    tail_scale = N / TAIL_CELLS maps u to the tail coordinate s in (0, 1].
    """
    from scipy import special, stats

    u = np.arange(nodes + 1) / nodes
    q = special.betaincinv(alpha, beta, u)
    q[0], q[-1] = 0.0, 1.0
    dq = np.zeros_like(q)
    dq[1:-1] = 1.0 / (nodes * stats.beta.pdf(q[1:-1], alpha, beta))
    q.setflags(write=False)
    dq.setflags(write=False)
    top = TAIL_CELLS / nodes
    depth = TAIL_STEPS_PER_OCTAVE * (53 + int(math.log2(top)))
    lower = _tail_table(alpha, beta, top, depth)
    upper = _tail_table(beta, alpha, top, depth)
    s_last = 2.0 ** (-depth / TAIL_STEPS_PER_OCTAVE)
    return q, dq, lower, upper, s_last, nodes / TAIL_CELLS


def _beta_mode(alpha, beta):
    if alpha == 1.0 and beta == 1.0:
        return 0
    if alpha == 0.5 and beta == 0.5:
        return 1
    if alpha == 1.0:
        return 2
    if beta == 1.0:
        return 3
    return 4


def _dist_core(spec, seed):
    p0, p1 = spec.params
    if spec.family is DistFamily.UNIFORM:
        return core.DistSource(10, p0, p1, seed, spec.clamp, False)
    if spec.family is DistFamily.NORMAL:
        return core.DistSource(12, p0, p1, seed, spec.clamp, spec.resample)
    mode = _beta_mode(p0, p1)
    table = beta_table(p0, p1) if mode == 4 else None
    return core.DistSource(11, p0, p1, seed, spec.clamp, False, mode, table)


class SequenceSource:
    """Seeded stream of values in [0, 1]; single owner, not thread-safe."""

    def __init__(self, spec, seed, source_id=None):
        if not 0 <= int(seed) < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.spec = spec
        self.seed = int(seed)
        self.id = source_id
        if isinstance(spec, MapSpec):
            self._core = _map_core(spec, self.seed)
        elif isinstance(spec, DistributionSpec):
            self._core = _dist_core(spec, self.seed)
        else:
            raise TypeError("spec must be a MapSpec or DistributionSpec")

    @property
    def is_map(self):
        return isinstance(self.spec, MapSpec)

    @property
    def draws(self):
        return self._core.draws

    @property
    def state(self):
        if not self.is_map:
            raise AttributeError("only map sources expose an orbit state")
        return self._core.state

    @state.setter
    def state(self, z):
        if not self.is_map:
            raise AttributeError("only map sources expose an orbit state")
        self._core.state = z

    def next_value(self):
        return self._core.next_value()

    def take(self, n):
        return self._core.fill(int(n))

    def raw_orbit(self, n):
        if not self.is_map:
            raise TypeError("raw orbits exist for map sources only")
        return self._core.raw_orbit(int(n))


def make_source(spec, seed, source_id=None):
    return SequenceSource(spec, seed, source_id)


def map_step(spec, z):
    return spec.kernel().step(float(z))


def map_derivative(spec, z):
    """Return (f'(z), flagged); flagged points are non-differentiable."""
    return spec.kernel().derivative(float(z))


def next_value(source):
    return source.next_value()


DEFAULT_SOURCES = (
    "logistic",
    "chebyshev",
    "weierstrass",
    "tent",
    "cubic",
    "bellows",
    "beta_0.5_0.5",
    "normal_0.5_0.1",
    "beta_13_13",
    "uniform_0_1",
    "beta_1_1",
    "beta_1_5",
)


# Sources grouped by the shape of their density on [0, 1].
DENSITY_GROUPS = {
    "bathtub": ("logistic", "beta_0.5_0.5", "chebyshev"),
    "bell": ("normal_0.5_0.1", "beta_13_13", "weierstrass"),
    "flat": ("tent", "uniform_0_1", "beta_1_1"),
    "mixed": ("beta_1_5", "cubic", "bellows"),
}


def density_group(source_id):
    for name, members in DENSITY_GROUPS.items():
        if source_id in members:
            return name
    return None


def _num(text, sid):
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"unknown source id: {sid}") from None


def spec_for(source_id):
    """Resolve a string id such as ``cubic`` or ``beta_13_13`` to a spec."""
    sid = str(source_id).strip()
    if sid in MapFamily._value2member_map_:
        return MapSpec(MapFamily(sid))
    parts = sid.split("_")
    if len(parts) == 3 and parts[0] in DistFamily._value2member_map_:
        p0, p1 = _num(parts[1], sid), _num(parts[2], sid)
        return DistributionSpec(DistFamily(parts[0]), (p0, p1))
    raise ValueError(f"unknown source id: {sid}")


def source_for(source_id, seed):
    return SequenceSource(spec_for(source_id), seed, source_id)
