"""Pure-Python mirror of the compiled kernels.

Same API, same operation order, same libm calls. Used when the extension is
not built or when ``CHAOSPSO_PURE=1``; slow, but bit-identical.
"""

import math
import random

import numpy as np

BACKEND = "pure"

LOGISTIC, CHEBYSHEV, WEIERSTRASS, TENT, CUBIC, BELLOWS = range(6)
UNIFORM, BETA, NORMAL = 10, 11, 12
BETA_UNIFORM, BETA_ARCSINE, BETA_A1, BETA_B1, BETA_TABLE = range(5)

HALF_PI = math.pi / 2.0
TWO_OVER_PI = 2.0 / math.pi
TWO_PI = 2.0 * math.pi
THREE_PI = 3.0 * math.pi
FIVE_PI = 5.0 * math.pi
LN2 = math.log(2.0)
INV_2_53 = 1.0 / 9007199254740992.0
MASK64 = (1 << 64) - 1
TURN_SCALE = 3.4061215800865545e-19  # 2*pi / 2**64


def splitmix64(state):
    """Return (output, new_state) for one splitmix64 step."""
    x = (state + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31), x


# ---------------------------------------------------------------- Weierstrass

def _kcos(x):
    z = x * x
    w = z * z
    r = (z * (4.16666666666666019037e-02 + z * (-1.38888888888741095749e-03 + z * 2.48015872894767294178e-05))
         + w * w * (-2.75573143513906633035e-07 + z * (2.08757232129817482790e-09 + z * -1.13596475577881948265e-11)))
    hz = 0.5 * z
    w = 1.0 - hz
    return w + (((1.0 - w) - hz) + (z * r))


def _ksin(x):
    z = x * x
    w = z * z
    r = (8.33333333332248946124e-03 + z * (-1.98412698298579493134e-04 + z * 2.75573137070700676789e-06)
         + z * w * (-2.50507602534068634195e-08 + z * 1.58969099521155010221e-10))
    v = z * x
    return x + v * (-1.66666666666666324348e-01 + z * r)


def _turn(f):
    k = ((f + (1 << 61)) & MASK64) >> 62
    g = (f - (k << 62)) & MASK64
    if g >= 1 << 63:
        g -= 1 << 64
    phi = float(g) * TURN_SCALE
    s = _ksin(phi)
    c = _kcos(phi)
    q = k & 3
    if q == 0:
        return c, s
    if q == 1:
        return -s, c
    if q == 2:
        return -c, -s
    return s, -c


def _wz_phases(tables, z):
    a_pow, dcoef, bmod = tables
    nt = len(a_pow)
    az = abs(z)
    if az == 0.0:
        return [1.0] * nt, [0.0] * nt
    m, e = math.frexp(az)
    mant = int(m * (1 << 53))
    e -= 53
    if mant and e < -1074:
        mant >>= (-1074 - e)
        e = -1074
    big = 1 - e
    if big <= 0:
        cs, sn = [1.0] * nt, [0.0] * nt
    else:
        mod = (1 << big) - 1
        cs, sn = [], []
        for i in range(nt):
            res = (bmod[i] * mant) & mod
            frac = res >> (big - 64) if big >= 64 else res << (64 - big)
            c, s = _turn(frac)
            cs.append(c)
            sn.append(s)
    if z < 0.0:
        sn = [-s for s in sn]
    return cs, sn


def _wz_eval(tables, z, want_deriv=False):
    cs, sn = _wz_phases(tables, z)
    a_pow, dcoef = tables[0], tables[1]
    acc = 0.0
    for i in range(len(a_pow)):
        acc += a_pow[i] * cs[i]
    if not want_deriv:
        return acc, None
    d = 0.0
    for i in range(len(a_pow)):
        d += dcoef[i] * sn[i]
    return acc, -d


# ---------------------------------------------------------------- maps

class MapKernel:
    """Raw recurrence f and its derivative for one parameterised map."""

    def __init__(self, kind, param, tables=None):
        self.kind = kind
        self.param = float(param)
        self.tables = tables
        if kind == WEIERSTRASS and len(tables[0]) > 128:
            raise ValueError("at most 128 Weierstrass terms are supported")

    def step(self, z):
        p = self.param
        k = self.kind
        if k == LOGISTIC:
            return p * z * (1.0 - z)
        if k == CHEBYSHEV:
            return math.cos(p * math.acos(z))
        if k == WEIERSTRASS:
            return _wz_eval(self.tables, z)[0]
        if k == TENT:
            if z < 1.0 - z:
                return p * z
            return p * (1.0 - z)
        if k == CUBIC:
            return p * z * (1.0 - z * z)
        z2 = z * z
        z6 = z2 * z2 * z2
        return p * z / (1.0 + z6)

    def derivative(self, z):
        """Return (f'(z), flagged) where flagged marks a non-differentiable point."""
        p = self.param
        k = self.kind
        if k == LOGISTIC:
            return p * (1.0 - 2.0 * z), False
        if k == CHEBYSHEV:
            if z <= -1.0 or z >= 1.0:
                return p * p, True
            return p * math.sin(p * math.acos(z)) / math.sqrt(1.0 - z * z), False
        if k == WEIERSTRASS:
            return _wz_eval(self.tables, z, True)[1], False
        if k == TENT:
            if z == 0.5:
                return p, True
            return (p if z < 0.5 else -p), False
        if k == CUBIC:
            return p * (1.0 - 3.0 * z * z), False
        z2 = z * z
        z6 = z2 * z2 * z2
        den = 1.0 + z6
        return p * (1.0 - 5.0 * z6) / (den * den), False


def _clamp01(x):
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


class Source:
    draws = 0

    def fill(self, n):
        return np.array([self._next() for _ in range(n)], dtype=np.float64)

    def next_value(self):
        return self._next()

    def run_pso(self, family, dim, lo, hi, w, c1, c2, swarm, generations,
                scalar_draws=False, trace=None):
        return _run_pso(self, family, dim, lo, hi, w, c1, c2, swarm, generations,
                        scalar_draws, trace)


class MapSource(Source):
    def __init__(self, kernel, seed, seed_lo, seed_hi, dom_lo, dom_hi, rlo, rhi,
                 bad1, bad2, conj, burn_in):
        self.kernel = kernel
        self.sm = seed & MASK64
        self.seed_lo = seed_lo
        self.seed_w = seed_hi - seed_lo
        self.dom_lo, self.dom_hi = dom_lo, dom_hi
        self.rlo = rlo
        self.rw = rhi - rlo
        self.bad1, self.bad2 = bad1, bad2
        self.conj = bool(conj)
        self.draws = 0
        self.z = self._fresh()
        for _ in range(burn_in):
            self._advance()

    def _fresh(self):
        while True:
            out, self.sm = splitmix64(self.sm)
            u = (float(out >> 11) + 0.5) * INV_2_53
            z = self.seed_lo + self.seed_w * u
            if z == self.bad1 or z == self.bad2:
                continue
            if self.kernel.step(z) == z:
                continue
            return z

    def _raw_step(self, z):
        if self.conj:
            s = math.sin(HALF_PI * z)
            y = s * s
            y = 4.0 * y * (1.0 - y)
            return TWO_OVER_PI * math.asin(math.sqrt(y))
        return self.kernel.step(z)

    def _advance(self):
        # a degenerate state is emitted once, then replaced by a fresh seed
        if self.z == self.bad1 or self.z == self.bad2:
            self.z = self._fresh()
            return
        zn = self._raw_step(self.z)
        if not math.isfinite(zn) or zn < self.dom_lo or zn > self.dom_hi or zn == self.z:
            zn = self._fresh()
        self.z = zn

    def _next(self):
        self._advance()
        self.draws += 1
        return _clamp01((self.z - self.rlo) / self.rw)

    @property
    def state(self):
        return self.z

    @state.setter
    def state(self, value):
        self.z = float(value)

    def raw_orbit(self, n):
        out = np.empty(n, dtype=np.float64)
        for i in range(n):
            self._advance()
            out[i] = self.z
        return out

    def lyapunov_sum(self, n):
        s = c = 0.0
        used = 0
        for _ in range(n):
            d, flag = self.kernel.derivative(self.z)
            if not flag and d != 0.0:
                v = math.log(abs(d))
                t = s + v
                if abs(s) >= abs(v):
                    c += (s - t) + v
                else:
                    c += (v - t) + s
                s = t
                used += 1
            self._advance()
        return s + c, used


class DistSource(Source):
    def __init__(self, family, p0, p1, seed, clamp=True, resample=False, mode=0, table=None):
        self._rng = random.Random(seed & MASK64)
        self.family = family
        self.p0, self.p1 = float(p0), float(p1)
        self.mode = mode
        self.clamp = clamp
        self.resample = resample
        self.spare = None
        self.draws = 0
        if family == BETA:
            self.inv0 = 1.0 / self.p0
            self.inv1 = 1.0 / self.p1
            if mode == BETA_TABLE:
                self.q = [float(v) for v in table[0]]
                self.dq = [float(v) for v in table[1]]
                self.nq = len(self.q) - 1
                self.lo_tail = [[float(v) for v in arr] for arr in table[2]]
                self.hi_tail = [[float(v) for v in arr] for arr in table[3]]
                self.s_last = float(table[4])
                self.tail_scale = float(table[5])
                self.tail_cells = int(round(self.nq / self.tail_scale))

    def uniform53(self):
        return self._rng.random()

    def beta_icdf(self, u):
        m = self.mode
        if m == BETA_UNIFORM:
            return u
        if m == BETA_ARCSINE:
            s = math.sin(HALF_PI * u)
            return s * s
        if m == BETA_A1:
            return 1.0 - math.pow(1.0 - u, self.inv1)
        if m == BETA_B1:
            return math.pow(u, self.inv0)
        n = self.nq
        s = u * n
        j = int(s)
        if j < self.tail_cells:
            return self._tail(self.lo_tail, u * self.tail_scale, self.inv0)
        if j >= n - self.tail_cells:
            return 1.0 - self._tail(self.hi_tail, (1.0 - u) * self.tail_scale, self.inv1)
        t = s - j
        t2 = t * t
        t3 = t2 * t
        q, dq = self.q, self.dq
        return ((2.0 * t3 - 3.0 * t2 + 1.0) * q[j] + (t3 - 2.0 * t2 + t) * dq[j]
                + (3.0 * t2 - 2.0 * t3) * q[j + 1] + (t3 - t2) * dq[j + 1])

    def _tail(self, tail, s, inv):
        # s in (0, 1] is the scaled tail coordinate; node k sits at s = 2^(-k/4)
        if s <= 0.0:
            return 0.0
        L, dL = tail
        depth = len(L) - 1
        v = -4.0 * math.log2(s)
        k = int(v)
        if k >= depth:
            return math.exp(L[depth]) * math.pow(s / self.s_last, inv)
        t = v - k
        t2 = t * t
        t3 = t2 * t
        return math.exp((2.0 * t3 - 3.0 * t2 + 1.0) * L[k] + (t3 - 2.0 * t2 + t) * dL[k]
                        + (3.0 * t2 - 2.0 * t3) * L[k + 1] + (t3 - t2) * dL[k + 1])

    def _normal(self):
        if self.spare is not None:
            x, self.spare = self.spare, None
            return x
        u1 = self._rng.random()
        u2 = self._rng.random()
        r = math.sqrt(-2.0 * math.log(1.0 - u1))
        self.spare = self.p0 + self.p1 * r * math.sin(TWO_PI * u2)
        return self.p0 + self.p1 * r * math.cos(TWO_PI * u2)

    def _next(self):
        self.draws += 1
        if self.family == UNIFORM:
            x = self.p0 + (self.p1 - self.p0) * self._rng.random()
        elif self.family == BETA:
            x = self.beta_icdf(self._rng.random())
        else:
            x = self._normal()
            if self.resample:
                while x < 0.0 or x > 1.0:
                    x = self._normal()
        return _clamp01(x)


# ---------------------------------------------------------------- objectives

F_EQUAL, F_UNEVEN, F_HIMMELBLAU, F_SIXHUMP, F_SHUBERT, F_VINCENT = range(1, 7)
F_RASTRIGIN, F_ROSENBROCK, F_SPHERE, F_ACKLEY, F_GRIEWANK, F_PEN1, F_PEN2 = range(7, 14)


def _pen_u(x, a):
    if x > a:
        t = x - a
    elif x < -a:
        t = -x - a
    else:
        return 0.0
    t2 = t * t
    return 100.0 * (t2 * t2)


def _objective(fam, x):
    n = len(x)
    s = s2 = 0.0
    p = 1.0
    if fam == F_SPHERE:
        for v in x:
            s += v * v
        return s
    if fam == F_RASTRIGIN:
        for v in x:
            s += v * v - 10.0 * math.cos(TWO_PI * v) + 10.0
        return s
    if fam == F_ROSENBROCK:
        for i in range(n - 1):
            a = x[i + 1] - x[i] * x[i]
            b = x[i] - 1.0
            s += 100.0 * a * a + b * b
        return s
    if fam == F_ACKLEY:
        for v in x:
            s += v * v
            s2 += math.cos(TWO_PI * v)
        return -20.0 * math.exp(-0.2 * math.sqrt(s / n)) - math.exp(s2 / n) + 20.0 + math.e
    if fam == F_GRIEWANK:
        for i, v in enumerate(x):
            s += v * v
            p *= math.cos(v / math.sqrt(i + 1.0))
        return s / 4000.0 - p + 1.0
    if fam == F_PEN1:
        y = 1.0 + (x[0] + 1.0) / 4.0
        t = math.sin(math.pi * y)
        s = 10.0 * t * t
        for i in range(n - 1):
            yn = 1.0 + (x[i + 1] + 1.0) / 4.0
            t = math.sin(math.pi * yn)
            a = y - 1.0
            s += a * a * (1.0 + 10.0 * t * t)
            y = yn
        a = y - 1.0
        s += a * a
        for v in x:
            s2 += _pen_u(v, 10.0)
        return math.pi / n * s + s2
    if fam == F_PEN2:
        t = math.sin(THREE_PI * x[0])
        s = t * t
        for i in range(n - 1):
            t = math.sin(THREE_PI * x[i + 1])
            a = x[i] - 1.0
            s += a * a * (1.0 + t * t)
        a = x[n - 1] - 1.0
        t = math.sin(TWO_PI * x[n - 1])
        s += a * a * (1.0 + t * t)
        for v in x:
            s2 += _pen_u(v, 5.0)
        return 0.1 * s + s2
    if fam == F_EQUAL:
        t = math.sin(FIVE_PI * x[0])
        t = t * t
        return -(t * t * t)
    if fam == F_UNEVEN:
        a = (x[0] - 0.08) / 0.854
        b = math.exp(-2.0 * LN2 * a * a)
        t = math.sin(FIVE_PI * (math.pow(x[0], 0.75) - 0.05))
        t = t * t
        return -(b * (t * t * t))
    if fam == F_HIMMELBLAU:
        a = x[0] * x[0] + x[1] - 11.0
        b = x[0] + x[1] * x[1] - 7.0
        return a * a + b * b
    if fam == F_SIXHUMP:
        x2 = x[0] * x[0]
        y2 = x[1] * x[1]
        return (4.0 - 2.1 * x2 + x2 * x2 / 3.0) * x2 + x[0] * x[1] + (4.0 * y2 - 4.0) * y2
    if fam == F_SHUBERT:
        for v in x:
            s = 0.0
            for j in range(1, 6):
                s += j * math.cos((j + 1.0) * v + j)
            p *= s
        return p
    if fam == F_VINCENT:
        for v in x:
            s += math.sin(10.0 * math.log(v))
        return -(s / n)
    return math.nan


def evaluate(family, x):
    return _objective(family, [float(v) for v in x])


def evaluate_many(family, xs):
    return np.array([_objective(family, [float(v) for v in row]) for row in xs], dtype=np.float64)


# ---------------------------------------------------------------- PSO

def _run_pso(src, fam, D, lo, hi, w, c1, c2, I, G, scalar_draws, trace):
    lo = [float(v) for v in lo]
    hi = [float(v) for v in hi]
    nxt = src._next
    x = [[0.0] * D for _ in range(I)]
    v = [[0.0] * D for _ in range(I)]
    fl = [0.0] * I
    for i in range(I):
        xi = x[i]
        for d in range(D):
            xv = lo[d] + (hi[d] - lo[d]) * nxt()
            if xv < lo[d]:
                xv = lo[d]
            elif xv > hi[d]:
                xv = hi[d]
            xi[d] = xv
        f = _objective(fam, xi)
        if not math.isfinite(f):
            return 1, math.nan, np.array(xi)
        fl[i] = f
    pl = [list(xi) for xi in x]
    best = 0
    for i in range(1, I):
        if fl[i] < fl[best]:
            best = i
    fg = fl[best]
    pg = list(pl[best])
    if trace is not None:
        trace[0] = fg
    r1 = r2 = 0.0
    for t in range(G):
        for i in range(I):
            xi, vi, pli = x[i], v[i], pl[i]
            if scalar_draws:
                r1 = nxt()
                r2 = nxt()
            for d in range(D):
                if not scalar_draws:
                    r1 = nxt()
                    r2 = nxt()
                xv = xi[d]
                vi[d] = w * vi[d] + c1 * r1 * (pli[d] - xv) + c2 * r2 * (pg[d] - xv)
                xv = xv + vi[d]
                if xv < lo[d]:
                    xv = lo[d]
                elif xv > hi[d]:
                    xv = hi[d]
                xi[d] = xv
            f = _objective(fam, xi)
            if not math.isfinite(f):
                return 1, math.nan, np.array(xi)
            if f < fl[i]:
                fl[i] = f
                pl[i] = list(xi)
        best = 0
        for i in range(1, I):
            if fl[i] < fl[best]:
                best = i
        if fl[best] < fg:
            fg = fl[best]
            pg = list(pl[best])
        if trace is not None:
            trace[t + 1] = fg
    return 0, fg, np.array(pg)
