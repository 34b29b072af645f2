import math

import numpy as np
import pytest

from chaospso import functions
from chaospso.functions import SUITE, evaluate, evaluate_many, get, list_suite, metadata, with_bounds


def test_suite_shape():
    suite = list_suite()
    assert len(suite) == 27
    assert [f.id for f in suite] == list(range(1, 28))
    assert [get(i).dim for i in (7, 8, 9)] == [10, 20, 30]
    assert [(get(i).name, get(i).dim) for i in (22, 23, 24)] == [("Penalized1", 10), ("Penalized1", 20),
                                                                ("Penalized1", 30)]


def test_metadata_examples():
    name, dim, bounds, direction, f_star = metadata(13)
    assert (name, dim, direction, f_star) == ("Sphere", 10, "min", 0.0)
    assert bounds == [(-100.0, 100.0)] * 10
    name, dim, bounds, direction, f_star = metadata(4)
    assert (name, dim, direction) == ("Six-Hump Camel Back", 2, "max")
    assert f_star == pytest.approx(-1.031628453489877, abs=1e-12)
    with pytest.raises(KeyError):
        metadata(28)
    with pytest.raises(KeyError):
        metadata("x")


@pytest.mark.parametrize("fid,x,expected", [
    (13, np.zeros(10), 0.0),
    (10, np.ones(10), 0.0),
    (3, np.array([3.0, 2.0]), 0.0),
    (7, np.zeros(10), 0.0),
])
def test_evaluate_examples(fid, x, expected):
    assert evaluate(fid, x) == expected


def test_ackley_origin():
    assert abs(evaluate(16, np.zeros(10))) < 1e-12


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="length 10"):
        evaluate(13, np.zeros(9))
    with pytest.raises(ValueError):
        evaluate_many(13, np.zeros((4, 3)))


def _reference(fn, x):
    """Plain textbook formulas, independent of the kernels."""
    name, d = fn.name, len(x)
    if name == "Equal Maxima":
        return -math.sin(5 * math.pi * x[0]) ** 6
    if name == "Uneven Decreasing Maxima":
        v = x[0]
        return -math.exp(-2 * math.log(2) * ((v - 0.08) / 0.854) ** 2) * math.sin(5 * math.pi * (v ** 0.75 - 0.05)) ** 6
    if name == "Himmelblau":
        a, b = x
        return (a * a + b - 11) ** 2 + (a + b * b - 7) ** 2
    if name == "Six-Hump Camel Back":
        a, b = x
        return (4 - 2.1 * a * a + a ** 4 / 3) * a * a + a * b + (4 * b * b - 4) * b * b
    if name == "Shubert":
        # the maximization form is -prod(...); negated once for minimization
        out = 1.0
        for v in x:
            out *= sum(j * math.cos((j + 1) * v + j) for j in range(1, 6))
        return out
    if name == "Vincent":
        return -sum(math.sin(10 * math.log(v)) for v in x) / d
    if name == "Rastrigin":
        return sum(v * v - 10 * math.cos(2 * math.pi * v) + 10 for v in x)
    if name == "Rosenbrock":
        return sum(100 * (x[i + 1] - x[i] ** 2) ** 2 + (x[i] - 1) ** 2 for i in range(d - 1))
    if name == "Sphere":
        return sum(v * v for v in x)
    if name == "Ackley":
        return (-20 * math.exp(-0.2 * math.sqrt(sum(v * v for v in x) / d))
                - math.exp(sum(math.cos(2 * math.pi * v) for v in x) / d) + 20 + math.e)
    if name == "Griewank":
        return (sum(v * v for v in x) / 4000
                - math.prod(math.cos(v / math.sqrt(i + 1)) for i, v in enumerate(x)) + 1)

    def u(v, a, k, m):
        return k * (v - a) ** m if v > a else (k * (-v - a) ** m if v < -a else 0.0)

    if name == "Penalized1":
        y = [1 + (v + 1) / 4 for v in x]
        s = 10 * math.sin(math.pi * y[0]) ** 2
        s += sum((y[i] - 1) ** 2 * (1 + 10 * math.sin(math.pi * y[i + 1]) ** 2) for i in range(d - 1))
        s += (y[-1] - 1) ** 2
        return math.pi / d * s + sum(u(v, 10, 100, 4) for v in x)
    if name == "Penalized2":
        s = math.sin(3 * math.pi * x[0]) ** 2
        s += sum((x[i] - 1) ** 2 * (1 + math.sin(3 * math.pi * x[i + 1]) ** 2) for i in range(d - 1))
        s += (x[-1] - 1) ** 2 * (1 + math.sin(2 * math.pi * x[-1]) ** 2)
        return 0.1 * s + sum(u(v, 5, 100, 4) for v in x)
    raise AssertionError(name)


@pytest.mark.parametrize("fid", range(1, 28))
def test_against_textbook_formulas(fid):
    fn = get(fid)
    rng = np.random.default_rng(fid)
    lo, hi = np.array(fn.lower), np.array(fn.upper)
    # widen the box for the penalized functions so the penalty terms fire
    if fn.name.startswith("Penalized"):
        lo, hi = lo * 1.3, hi * 1.3
    xs = lo + (hi - lo) * rng.random((100, fn.dim))
    got = evaluate_many(fn, xs)
    ref = np.array([_reference(fn, row.tolist()) for row in xs])
    assert np.allclose(got, ref, rtol=1e-11, atol=1e-11)


@pytest.mark.parametrize("fid", [f.id for f in SUITE if f.known_optimizers])
def test_listed_optimizers_attain_f_star(fid):
    fn = get(fid)
    for x in fn.known_optimizers:
        assert evaluate(fn, np.array(x)) == pytest.approx(fn.f_star, abs=1e-9)


def test_vincent_has_thirty_six_optima():
    assert len(get(6).known_optimizers) == 36


@pytest.mark.parametrize("fid", [2, 5])
def test_optimum_without_listed_positions(fid):
    # dense grid plus local polish reaches the published optimum
    from scipy import optimize

    fn = get(fid)
    lo, hi = np.array(fn.lower), np.array(fn.upper)
    grid = np.stack(np.meshgrid(*[np.linspace(a, b, 801) for a, b in zip(lo, hi)]), -1).reshape(-1, fn.dim)
    start = grid[np.argmin(evaluate_many(fn, grid))]
    res = optimize.minimize(lambda x: evaluate(fn, np.clip(x, lo, hi)), start, method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-14})
    assert res.fun == pytest.approx(fn.f_star, abs=1e-6)


@pytest.mark.parametrize("fid", range(1, 28))
def test_lower_bound_on_random_points(fid):
    fn = get(fid)
    rng = np.random.default_rng(1000 + fid)
    lo, hi = np.array(fn.lower), np.array(fn.upper)
    xs = lo + (hi - lo) * rng.random((100_000, fn.dim))
    vals = evaluate_many(fn, xs)
    assert np.all(np.isfinite(vals))
    assert vals.min() >= fn.f_star - 1e-9


@pytest.mark.parametrize("fid", [7, 8, 9, 13, 14, 15])
def test_separability(fid):
    fn = get(fid)
    rng = np.random.default_rng(fid)
    lo, hi = fn.lower[0], fn.upper[0]
    for _ in range(50):
        x = lo + (hi - lo) * rng.random(fn.dim)
        parts = 0.0
        for i, v in enumerate(x):
            e = np.zeros(fn.dim)
            e[i] = v
            parts += evaluate(fn, e) - evaluate(fn, np.zeros(fn.dim)) * (fn.dim - 1) / fn.dim
        assert evaluate(fn, x) == pytest.approx(parts, abs=1e-9)


def test_with_bounds_override():
    fn = with_bounds(7, -2.0, 2.0)
    assert fn.lower == (-2.0,) * 10 and fn.upper == (2.0,) * 10
    assert get(7).lower == (-5.12,) * 10
    with pytest.raises(ValueError):
        with_bounds(7, 1.0, -1.0)


def test_bounds_finite_and_ordered():
    for fn in SUITE:
        assert all(math.isfinite(v) for v in fn.lower + fn.upper)
        assert all(a < b for a, b in fn.bounds)
        assert fn.direction in ("min", "max")


def test_callable_entry():
    assert get(13)(np.zeros(10)) == 0.0
    assert functions.evaluate(get(13), [0.0] * 10) == 0.0
