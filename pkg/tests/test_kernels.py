import math
import random

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chaospso import functions, pso, sources
from chaospso.sources import DEFAULT_SOURCES, SequenceSource, spec_for


def test_mt_matches_stdlib(compiled):
    for seed in (0, 1, 12345, 2**32 - 1, 2**32, 2**64 - 1):
        d = compiled.DistSource(10, 0.0, 1.0, seed)
        r = random.Random(seed)
        assert [d.next_value() for _ in range(2000)] == [r.random() for _ in range(2000)]


def test_splitmix_reference_values(compiled, pure):
    # published splitmix64 outputs for state 0
    x = 0
    outs = []
    for _ in range(3):
        o, x = pure.splitmix64(x)
        outs.append(o)
    assert outs == [0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4, 0x06C45D188009454F]
    assert compiled.splitmix64(12345) == pure.splitmix64(12345)


@pytest.mark.parametrize("sid", DEFAULT_SOURCES)
def test_streams_identical_across_backends(sid, compiled, pure, with_core):
    n = 200 if sid == "weierstrass" else 3000
    with_core(compiled)
    a = SequenceSource(spec_for(sid), 424242, sid).take(n)
    with_core(pure)
    b = SequenceSource(spec_for(sid), 424242, sid).take(n)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("fid", [1, 2, 3, 4, 5, 6, 7, 10, 13, 16, 19, 22, 25])
def test_objectives_identical_across_backends(fid, compiled, pure):
    fn = functions.get(fid)
    rng = np.random.default_rng(fid)
    lo, hi = np.array(fn.lower), np.array(fn.upper)
    xs = lo + (hi - lo) * rng.random((200, fn.dim))
    a = compiled.evaluate_many(fn.family, np.ascontiguousarray(xs))
    b = pure.evaluate_many(fn.family, xs)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("sid,fid", [("uniform_0_1", 13), ("logistic", 25), ("beta_13_13", 5),
                                     ("normal_0.5_0.1", 2), ("tent", 19)])
def test_pso_identical_across_backends(sid, fid, compiled, pure, with_core):
    cfg = pso.SwarmConfig(swarm_size=8, generations=10)
    out = []
    for mod in (compiled, pure):
        with_core(mod)
        src = SequenceSource(spec_for(sid), 99, sid)
        trace = np.zeros(cfg.generations + 1)
        best, x = pso.optimize(cfg, fid, src, trace)
        out.append((best, x.tolist(), trace.tolist(), src.draws))
    assert out[0] == out[1]


def _weierstrass_oracle(z, deriv=False):
    # phases reach b^100 ~ 1e200, so the working precision must exceed that
    mpmath.mp.dps = 320
    a, b, n = mpmath.mpf(0.999), 101, 100
    zz = mpmath.mpf(z)
    if deriv:
        return -mpmath.fsum(a**i * b**i * mpmath.pi * mpmath.sin(b**i * mpmath.pi * zz) for i in range(n + 1))
    return mpmath.fsum(a**i * mpmath.cos(b**i * mpmath.pi * zz) for i in range(n + 1))


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-30.0, max_value=30.0, allow_nan=False))
def test_weierstrass_exact_phase_against_mpmath(z):
    # oracle: 320-digit evaluation of the sum on the same double input; the
    # coefficients a^i are rounded to double in the kernel, hence the
    # 1e-12 absolute tolerance against a sum of magnitude <= 96
    spec = spec_for("weierstrass")
    got = sources.map_step(spec, z)
    assert abs(got - float(_weierstrass_oracle(z))) < 1e-12


@settings(max_examples=20, deadline=None)
@given(st.floats(min_value=-30.0, max_value=30.0, allow_nan=False).filter(lambda v: abs(v) > 1e-3))
def test_weierstrass_derivative_against_mpmath(z):
    spec = spec_for("weierstrass")
    d, flagged = sources.map_derivative(spec, z)
    ref = float(_weierstrass_oracle(z, deriv=True))
    assert not flagged
    assert math.isclose(d, ref, rel_tol=1e-9, abs_tol=1e-9 * 0.999**100 * 101.0**100)


def test_weierstrass_tiny_and_zero_states(compiled, pure):
    tables = sources._weierstrass_tables(0.999, 101, 100)
    k1 = compiled.MapKernel(2, 0.0, tables)
    k2 = pure.MapKernel(2, 0.0, tables)
    for z in (0.0, -0.0, 1e-30, -3e-200, 5e-324, 2.0**-74, 2.0**-76, 1e17, -2.5e18):
        assert k1.step(z) == k2.step(z)
        assert k1.derivative(z) == k2.derivative(z)
    assert k1.step(0.0) == pytest.approx(sum(0.999**i for i in range(101)))


@pytest.mark.parametrize("z", [3.954421894030391e-90, -1e-30, 2.0**-76, 5e-324, 1e-200, 7.3e-25])
def test_weierstrass_tiny_states_against_mpmath(z):
    got = sources.map_step(spec_for("weierstrass"), z)
    assert abs(got - float(_weierstrass_oracle(z))) < 1e-12
