# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: map iteration, MT19937, inverse-CDF draws, benchmark
objectives and the PSO generation loop.

Every routine here has a line-for-line twin in ``_pure.py``; both use the
platform libm for transcendental functions and the same operation order, so
the two backends produce bit-identical streams.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, asin, acos, sqrt, log, log2, exp, pow, fabs, isfinite, M_PI, M_E, NAN
from libc.stdint cimport uint64_t, uint32_t, int64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memcpy

cnp.import_array()

cdef extern from "_wphase.h":
    ctypedef struct wz_params:
        int nt
        double a_pow[128]
        double dcoef[128]
        uint64_t bw[128][17]
    double wz_eval(const wz_params *p, double z, double *deriv) nogil

BACKEND = "compiled"

# map families
DEF LOGISTIC = 0
DEF CHEBYSHEV = 1
DEF WEIERSTRASS = 2
DEF TENT = 3
DEF CUBIC = 4
DEF BELLOWS = 5
# distribution families
DEF UNIFORM = 10
DEF BETA = 11
DEF NORMAL = 12
# beta sampling modes
DEF BETA_UNIFORM = 0
DEF BETA_ARCSINE = 1
DEF BETA_A1 = 2
DEF BETA_B1 = 3
DEF BETA_TABLE = 4

cdef double HALF_PI = M_PI / 2.0
cdef double TWO_OVER_PI = 2.0 / M_PI
cdef double TWO_PI = 2.0 * M_PI
cdef double THREE_PI = 3.0 * M_PI
cdef double FIVE_PI = 5.0 * M_PI
cdef double LN2 = log(2.0)
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t splitmix_next(uint64_t *x) noexcept nogil:
    x[0] += <uint64_t>0x9E3779B97F4A7C15ULL
    cdef uint64_t z = x[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBULL
    return z ^ (z >> 31)


def splitmix64(uint64_t state):
    """Return (output, new_state) for one splitmix64 step."""
    cdef uint64_t x = state
    cdef uint64_t out = splitmix_next(&x)
    return out, x


# ---------------------------------------------------------------- maps

cdef struct mapk:
    int kind
    double p0
    wz_params *wz


cdef inline double map_f(const mapk *m, double z) noexcept nogil:
    cdef double z2, z6
    if m.kind == LOGISTIC:
        return m.p0 * z * (1.0 - z)
    elif m.kind == CHEBYSHEV:
        return cos(m.p0 * acos(z))
    elif m.kind == WEIERSTRASS:
        return wz_eval(m.wz, z, NULL)
    elif m.kind == TENT:
        if z < 1.0 - z:
            return m.p0 * z
        return m.p0 * (1.0 - z)
    elif m.kind == CUBIC:
        return m.p0 * z * (1.0 - z * z)
    else:
        z2 = z * z
        z6 = z2 * z2 * z2
        return m.p0 * z / (1.0 + z6)


cdef inline double map_df(const mapk *m, double z, int *flag) noexcept nogil:
    cdef double z2, z6, d, den
    flag[0] = 0
    if m.kind == LOGISTIC:
        return m.p0 * (1.0 - 2.0 * z)
    elif m.kind == CHEBYSHEV:
        if z <= -1.0 or z >= 1.0:
            flag[0] = 1
            return m.p0 * m.p0
        return m.p0 * sin(m.p0 * acos(z)) / sqrt(1.0 - z * z)
    elif m.kind == WEIERSTRASS:
        wz_eval(m.wz, z, &d)
        return d
    elif m.kind == TENT:
        if z == 0.5:
            flag[0] = 1
            return m.p0
        if z < 0.5:
            return m.p0
        return -m.p0
    elif m.kind == CUBIC:
        return m.p0 * (1.0 - 3.0 * z * z)
    else:
        z2 = z * z
        z6 = z2 * z2 * z2
        den = 1.0 + z6
        return m.p0 * (1.0 - 5.0 * z6) / (den * den)


cdef class MapKernel:
    """Raw recurrence f and its derivative for one parameterised map."""
    cdef mapk m
    cdef wz_params *wz
    cdef readonly int kind
    cdef readonly double param

    def __cinit__(self, int kind, double param, tables=None):
        self.kind = kind
        self.param = param
        self.m.kind = kind
        self.m.p0 = param
        self.m.wz = NULL
        self.wz = NULL
        if kind == WEIERSTRASS:
            a_pow, dcoef, bmod = tables
            n = len(a_pow)
            if n > 128:
                raise ValueError("at most 128 Weierstrass terms are supported")
            self.wz = <wz_params *>malloc(sizeof(wz_params))
            if self.wz == NULL:
                raise MemoryError()
            self.wz.nt = n
            for i in range(n):
                self.wz.a_pow[i] = a_pow[i]
                self.wz.dcoef[i] = dcoef[i]
                for j in range(17):
                    self.wz.bw[i][j] = (bmod[i] >> (64 * j)) & 0xFFFFFFFFFFFFFFFF
            self.m.wz = self.wz

    def __dealloc__(self):
        if self.wz != NULL:
            free(self.wz)

    def step(self, double z):
        return map_f(&self.m, z)

    def derivative(self, double z):
        """Return (f'(z), flagged) where flagged marks a non-differentiable point."""
        cdef int flag
        cdef double d = map_df(&self.m, z, &flag)
        return d, bool(flag)


# ---------------------------------------------------------------- MT19937

cdef struct mtstate:
    uint32_t mt[624]
    int mti


cdef void mt_init_genrand(mtstate *s, uint32_t seed) noexcept nogil:
    cdef int i
    s.mt[0] = seed
    for i in range(1, 624):
        s.mt[i] = <uint32_t>(1812433253U * (s.mt[i - 1] ^ (s.mt[i - 1] >> 30)) + <uint32_t>i)
    s.mti = 624


cdef void mt_init_by_array(mtstate *s, uint32_t *key, int klen) noexcept nogil:
    cdef int i = 1, j = 0, k
    mt_init_genrand(s, 19650218U)
    k = 624 if 624 > klen else klen
    while k > 0:
        s.mt[i] = <uint32_t>((s.mt[i] ^ ((s.mt[i - 1] ^ (s.mt[i - 1] >> 30)) * 1664525U)) + key[j] + <uint32_t>j)
        i += 1
        j += 1
        if i >= 624:
            s.mt[0] = s.mt[623]
            i = 1
        if j >= klen:
            j = 0
        k -= 1
    k = 623
    while k > 0:
        s.mt[i] = <uint32_t>((s.mt[i] ^ ((s.mt[i - 1] ^ (s.mt[i - 1] >> 30)) * 1566083941U)) - <uint32_t>i)
        i += 1
        if i >= 624:
            s.mt[0] = s.mt[623]
            i = 1
        k -= 1
    s.mt[0] = 0x80000000U


cdef inline uint32_t mt_next(mtstate *s) noexcept nogil:
    cdef int kk
    cdef uint32_t y
    if s.mti >= 624:
        for kk in range(624 - 397):
            y = (s.mt[kk] & 0x80000000U) | (s.mt[kk + 1] & 0x7fffffffU)
            s.mt[kk] = s.mt[kk + 397] ^ (y >> 1) ^ (0x9908b0dfU if (y & 1U) else 0U)
        for kk in range(624 - 397, 623):
            y = (s.mt[kk] & 0x80000000U) | (s.mt[kk + 1] & 0x7fffffffU)
            s.mt[kk] = s.mt[kk + (397 - 624)] ^ (y >> 1) ^ (0x9908b0dfU if (y & 1U) else 0U)
        y = (s.mt[623] & 0x80000000U) | (s.mt[0] & 0x7fffffffU)
        s.mt[623] = s.mt[396] ^ (y >> 1) ^ (0x9908b0dfU if (y & 1U) else 0U)
        s.mti = 0
    y = s.mt[s.mti]
    s.mti += 1
    y ^= (y >> 11)
    y ^= (y << 7) & 0x9d2c5680U
    y ^= (y << 15) & 0xefc60000U
    y ^= (y >> 18)
    return y


cdef inline double mt_res53(mtstate *s) noexcept nogil:
    cdef uint32_t a = mt_next(s) >> 5
    cdef uint32_t b = mt_next(s) >> 6
    return (a * 67108864.0 + b) * INV_2_53


cdef inline double clamp01(double x) noexcept nogil:
    if x < 0.0:
        return 0.0
    if x > 1.0:
        return 1.0
    return x


# ---------------------------------------------------------------- sources

cdef class Source:
    """Base stream; subclasses implement ``_next``."""
    cdef readonly uint64_t draws

    cdef double _next(self) noexcept nogil:
        return 0.0

    def next_value(self):
        return self._next()

    def fill(self, Py_ssize_t n):
        cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
        cdef double *p = <double *>out.data
        cdef Py_ssize_t i
        with nogil:
            for i in range(n):
                p[i] = self._next()
        return out

    def run_pso(self, int family, int dim, double[::1] lo, double[::1] hi,
                double w, double c1, double c2, int swarm, int generations,
                bint scalar_draws=False, double[::1] trace=None):
        """Global-best PSO; returns (status, best_value, best_x).

        status is 0 on success, otherwise 1 and best_x holds the position
        whose objective was not finite.
        """
        return _run_pso(self, family, dim, lo, hi, w, c1, c2, swarm, generations,
                        scalar_draws, trace)


cdef class MapSource(Source):
    cdef mapk m
    cdef MapKernel kernel
    cdef readonly double z
    cdef uint64_t sm
    cdef double seed_lo, seed_w, dom_lo, dom_hi, rlo, rw, bad1, bad2
    cdef bint conj

    def __cinit__(self, MapKernel kernel, uint64_t seed, double seed_lo, double seed_hi,
                  double dom_lo, double dom_hi, double rlo, double rhi,
                  double bad1, double bad2, bint conj, int burn_in):
        self.kernel = kernel
        self.m = kernel.m
        self.sm = seed
        self.seed_lo = seed_lo
        self.seed_w = seed_hi - seed_lo
        self.dom_lo = dom_lo
        self.dom_hi = dom_hi
        self.rlo = rlo
        self.rw = rhi - rlo
        self.bad1 = bad1
        self.bad2 = bad2
        self.conj = conj
        self.draws = 0
        self.z = self._fresh()
        for _ in range(burn_in):
            self._advance()

    cdef inline double _fresh(self) noexcept nogil:
        cdef double u, z
        while True:
            u = (<double>(splitmix_next(&self.sm) >> 11) + 0.5) * INV_2_53
            z = self.seed_lo + self.seed_w * u
            if z == self.bad1 or z == self.bad2:
                continue
            if map_f(&self.m, z) == z:
                continue
            return z

    cdef inline double _raw_step(self, double z) noexcept nogil:
        cdef double s, y
        if self.conj:
            s = sin(HALF_PI * z)
            y = s * s
            y = 4.0 * y * (1.0 - y)
            return TWO_OVER_PI * asin(sqrt(y))
        return map_f(&self.m, z)

    cdef inline void _advance(self) noexcept nogil:
        cdef double zn
        # a degenerate state is emitted once, then replaced by a fresh seed
        if self.z == self.bad1 or self.z == self.bad2:
            self.z = self._fresh()
            return
        zn = self._raw_step(self.z)
        if not isfinite(zn) or zn < self.dom_lo or zn > self.dom_hi or zn == self.z:
            zn = self._fresh()
        self.z = zn

    cdef double _next(self) noexcept nogil:
        self._advance()
        self.draws += 1
        return clamp01((self.z - self.rlo) / self.rw)

    @property
    def state(self):
        return self.z

    @state.setter
    def state(self, double value):
        self.z = value

    def raw_orbit(self, Py_ssize_t n):
        """Advance n steps and return the raw (un-rescaled) states."""
        cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
        cdef double *p = <double *>out.data
        cdef Py_ssize_t i
        with nogil:
            for i in range(n):
                self._advance()
                p[i] = self.z
        return out

    def lyapunov_sum(self, Py_ssize_t n):
        """Sum ln|f'(z_k)| over the next n raw states (compensated).

        Returns (sum, used) where flagged or critical points are skipped.
        """
        cdef double s = 0.0, c = 0.0, t, v, d
        cdef int flag
        cdef Py_ssize_t i, used = 0
        with nogil:
            for i in range(n):
                d = map_df(&self.m, self.z, &flag)
                if not flag and d != 0.0:
                    v = log(fabs(d))
                    t = s + v
                    if fabs(s) >= fabs(v):
                        c += (s - t) + v
                    else:
                        c += (v - t) + s
                    s = t
                    used += 1
                self._advance()
        return s + c, used


cdef class DistSource(Source):
    cdef mtstate st
    cdef int family, mode
    cdef double p0, p1, inv0, inv1
    cdef bint clamp, resample, has_spare
    cdef double spare
    cdef double *q
    cdef double *dq
    cdef int nq
    cdef const double *tails[4]
    cdef int depth, tail_cells
    cdef double s_last, tail_scale
    cdef object _keep

    def __cinit__(self, int family, double p0, double p1, uint64_t seed, bint clamp=True,
                  bint resample=False, int mode=0, table=None):
        cdef uint32_t key[2]
        cdef int klen = 1
        key[0] = <uint32_t>(seed & 0xffffffffU)
        key[1] = <uint32_t>(seed >> 32)
        if key[1] != 0:
            klen = 2
        mt_init_by_array(&self.st, key, klen)
        self.family = family
        self.p0 = p0
        self.p1 = p1
        self.mode = mode
        self.clamp = clamp
        self.resample = resample
        self.has_spare = False
        self.spare = 0.0
        self.draws = 0
        self.q = NULL
        self.dq = NULL
        self.nq = 0
        if family == BETA:
            self.inv0 = 1.0 / p0
            self.inv1 = 1.0 / p1
            if mode == BETA_TABLE:
                qa = np.ascontiguousarray(table[0], dtype=np.float64)
                da = np.ascontiguousarray(table[1], dtype=np.float64)
                ts = [np.ascontiguousarray(arr, dtype=np.float64)
                      for tail in (table[2], table[3]) for arr in tail]
                self._keep = (qa, da, ts)
                self.q = <double *>cnp.PyArray_DATA(qa)
                self.dq = <double *>cnp.PyArray_DATA(da)
                self.nq = qa.shape[0] - 1
                for i in range(4):
                    self.tails[i] = <const double *>cnp.PyArray_DATA(ts[i])
                self.depth = ts[0].shape[0] - 1
                self.s_last = table[4]
                self.tail_scale = table[5]
                self.tail_cells = <int>round(self.nq / self.tail_scale)

    def uniform53(self):
        """Raw MT19937 53-bit uniform (does not count as a draw)."""
        return mt_res53(&self.st)

    cdef inline double _tail(self, int side, double s, double inv) noexcept nogil:
        # s in (0, 1] is the scaled tail coordinate; node k sits at s = 2^(-k/4)
        cdef const double *L = self.tails[2 * side]
        cdef const double *dL = self.tails[2 * side + 1]
        cdef double v, t, t2, t3
        cdef int k
        if s <= 0.0:
            return 0.0
        v = -4.0 * log2(s)
        k = <int>v
        if k >= self.depth:
            return exp(L[self.depth]) * pow(s / self.s_last, inv)
        t = v - k
        t2 = t * t
        t3 = t2 * t
        return exp((2.0 * t3 - 3.0 * t2 + 1.0) * L[k] + (t3 - 2.0 * t2 + t) * dL[k]
                   + (3.0 * t2 - 2.0 * t3) * L[k + 1] + (t3 - t2) * dL[k + 1])

    cdef inline double _beta(self, double u) noexcept nogil:
        cdef double s, t, t2, t3
        cdef int j
        if self.mode == BETA_UNIFORM:
            return u
        elif self.mode == BETA_ARCSINE:
            s = sin(HALF_PI * u)
            return s * s
        elif self.mode == BETA_A1:
            return 1.0 - pow(1.0 - u, self.inv1)
        elif self.mode == BETA_B1:
            return pow(u, self.inv0)
        s = u * self.nq
        j = <int>s
        if j < self.tail_cells:
            return self._tail(0, u * self.tail_scale, self.inv0)
        if j >= self.nq - self.tail_cells:
            return 1.0 - self._tail(1, (1.0 - u) * self.tail_scale, self.inv1)
        t = s - j
        t2 = t * t
        t3 = t2 * t
        return ((2.0 * t3 - 3.0 * t2 + 1.0) * self.q[j] + (t3 - 2.0 * t2 + t) * self.dq[j]
                + (3.0 * t2 - 2.0 * t3) * self.q[j + 1] + (t3 - t2) * self.dq[j + 1])

    cdef inline double _normal(self) noexcept nogil:
        cdef double u1, u2, r
        if self.has_spare:
            self.has_spare = False
            return self.spare
        u1 = mt_res53(&self.st)
        u2 = mt_res53(&self.st)
        r = sqrt(-2.0 * log(1.0 - u1))
        self.spare = self.p0 + self.p1 * r * sin(TWO_PI * u2)
        self.has_spare = True
        return self.p0 + self.p1 * r * cos(TWO_PI * u2)

    cdef double _next(self) noexcept nogil:
        cdef double x
        self.draws += 1
        if self.family == UNIFORM:
            x = self.p0 + (self.p1 - self.p0) * mt_res53(&self.st)
        elif self.family == BETA:
            x = self._beta(mt_res53(&self.st))
        else:
            x = self._normal()
            if self.resample:
                while x < 0.0 or x > 1.0:
                    x = self._normal()
        return clamp01(x)

    def beta_icdf(self, double u):
        return self._beta(u)


# ---------------------------------------------------------------- objectives

DEF F_EQUAL = 1
DEF F_UNEVEN = 2
DEF F_HIMMELBLAU = 3
DEF F_SIXHUMP = 4
DEF F_SHUBERT = 5
DEF F_VINCENT = 6
DEF F_RASTRIGIN = 7
DEF F_ROSENBROCK = 8
DEF F_SPHERE = 9
DEF F_ACKLEY = 10
DEF F_GRIEWANK = 11
DEF F_PEN1 = 12
DEF F_PEN2 = 13


cdef inline double pen_u(double x, double a) noexcept nogil:
    cdef double t, t2
    if x > a:
        t = x - a
    elif x < -a:
        t = -x - a
    else:
        return 0.0
    t2 = t * t
    return 100.0 * (t2 * t2)


cdef double objective(int fam, const double *x, int n) noexcept nogil:
    cdef double s = 0.0, s2 = 0.0, p = 1.0, a, b, t, y, yn, x2, y2
    cdef int i, j
    if fam == F_SPHERE:
        for i in range(n):
            s += x[i] * x[i]
        return s
    elif fam == F_RASTRIGIN:
        for i in range(n):
            s += x[i] * x[i] - 10.0 * cos(TWO_PI * x[i]) + 10.0
        return s
    elif fam == F_ROSENBROCK:
        for i in range(n - 1):
            a = x[i + 1] - x[i] * x[i]
            b = x[i] - 1.0
            s += 100.0 * a * a + b * b
        return s
    elif fam == F_ACKLEY:
        for i in range(n):
            s += x[i] * x[i]
            s2 += cos(TWO_PI * x[i])
        return -20.0 * exp(-0.2 * sqrt(s / n)) - exp(s2 / n) + 20.0 + M_E
    elif fam == F_GRIEWANK:
        for i in range(n):
            s += x[i] * x[i]
            p *= cos(x[i] / sqrt(i + 1.0))
        return s / 4000.0 - p + 1.0
    elif fam == F_PEN1:
        y = 1.0 + (x[0] + 1.0) / 4.0
        t = sin(M_PI * y)
        s = 10.0 * t * t
        for i in range(n - 1):
            yn = 1.0 + (x[i + 1] + 1.0) / 4.0
            t = sin(M_PI * yn)
            a = y - 1.0
            s += a * a * (1.0 + 10.0 * t * t)
            y = yn
        a = y - 1.0
        s += a * a
        for i in range(n):
            s2 += pen_u(x[i], 10.0)
        return M_PI / n * s + s2
    elif fam == F_PEN2:
        t = sin(THREE_PI * x[0])
        s = t * t
        for i in range(n - 1):
            t = sin(THREE_PI * x[i + 1])
            a = x[i] - 1.0
            s += a * a * (1.0 + t * t)
        a = x[n - 1] - 1.0
        t = sin(TWO_PI * x[n - 1])
        s += a * a * (1.0 + t * t)
        for i in range(n):
            s2 += pen_u(x[i], 5.0)
        return 0.1 * s + s2
    elif fam == F_EQUAL:
        t = sin(FIVE_PI * x[0])
        t = t * t
        return -(t * t * t)
    elif fam == F_UNEVEN:
        a = (x[0] - 0.08) / 0.854
        b = exp(-2.0 * LN2 * a * a)
        t = sin(FIVE_PI * (pow(x[0], 0.75) - 0.05))
        t = t * t
        return -(b * (t * t * t))
    elif fam == F_HIMMELBLAU:
        a = x[0] * x[0] + x[1] - 11.0
        b = x[0] + x[1] * x[1] - 7.0
        return a * a + b * b
    elif fam == F_SIXHUMP:
        x2 = x[0] * x[0]
        y2 = x[1] * x[1]
        return (4.0 - 2.1 * x2 + x2 * x2 / 3.0) * x2 + x[0] * x[1] + (4.0 * y2 - 4.0) * y2
    elif fam == F_SHUBERT:
        for i in range(n):
            s = 0.0
            for j in range(1, 6):
                s += j * cos((j + 1.0) * x[i] + j)
            p *= s
        return p
    elif fam == F_VINCENT:
        for i in range(n):
            s += sin(10.0 * log(x[i]))
        return -(s / n)
    return NAN


def evaluate(int family, double[::1] x):
    return objective(family, &x[0], x.shape[0])


def evaluate_many(int family, double[:, ::1] xs):
    cdef Py_ssize_t i, m = xs.shape[0]
    cdef int n = xs.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m, dtype=np.float64)
    cdef double *p = <double *>out.data
    with nogil:
        for i in range(m):
            p[i] = objective(family, &xs[i, 0], n)
    return out


# ---------------------------------------------------------------- PSO

cdef object _run_pso(Source src, int fam, int D, double[::1] lo, double[::1] hi,
                     double w, double c1, double c2, int I, int G,
                     bint scalar_draws, double[::1] trace):
    cdef double *x = <double *>malloc(I * D * sizeof(double))
    cdef double *v = <double *>malloc(I * D * sizeof(double))
    cdef double *pl = <double *>malloc(I * D * sizeof(double))
    cdef double *fl = <double *>malloc(I * sizeof(double))
    cdef double *pg = <double *>malloc(D * sizeof(double))
    cdef double fg, f, r1 = 0.0, r2 = 0.0, xv
    cdef int i, d, t, best, status = 0, bad = -1
    cdef bint has_trace = trace is not None
    if x == NULL or v == NULL or pl == NULL or fl == NULL or pg == NULL:
        free(x); free(v); free(pl); free(fl); free(pg)
        raise MemoryError()
    try:
        with nogil:
            for i in range(I):
                for d in range(D):
                    xv = lo[d] + (hi[d] - lo[d]) * src._next()
                    if xv < lo[d]:
                        xv = lo[d]
                    elif xv > hi[d]:
                        xv = hi[d]
                    x[i * D + d] = xv
                    v[i * D + d] = 0.0
                    pl[i * D + d] = xv
                f = objective(fam, &x[i * D], D)
                if not isfinite(f):
                    status = 1
                    bad = i
                    break
                fl[i] = f
            if status == 0:
                best = 0
                for i in range(1, I):
                    if fl[i] < fl[best]:
                        best = i
                fg = fl[best]
                memcpy(pg, &pl[best * D], D * sizeof(double))
                if has_trace:
                    trace[0] = fg
                for t in range(G):
                    for i in range(I):
                        if scalar_draws:
                            r1 = src._next()
                            r2 = src._next()
                        for d in range(D):
                            if not scalar_draws:
                                r1 = src._next()
                                r2 = src._next()
                            xv = x[i * D + d]
                            v[i * D + d] = (w * v[i * D + d] + c1 * r1 * (pl[i * D + d] - xv)
                                            + c2 * r2 * (pg[d] - xv))
                            xv = xv + v[i * D + d]
                            if xv < lo[d]:
                                xv = lo[d]
                            elif xv > hi[d]:
                                xv = hi[d]
                            x[i * D + d] = xv
                        f = objective(fam, &x[i * D], D)
                        if not isfinite(f):
                            status = 1
                            bad = i
                            break
                        if f < fl[i]:
                            fl[i] = f
                            memcpy(&pl[i * D], &x[i * D], D * sizeof(double))
                    if status:
                        break
                    best = 0
                    for i in range(1, I):
                        if fl[i] < fl[best]:
                            best = i
                    if fl[best] < fg:
                        fg = fl[best]
                        memcpy(pg, &pl[best * D], D * sizeof(double))
                    if has_trace:
                        trace[t + 1] = fg
        if status:
            return 1, float("nan"), np.array([x[bad * D + d] for d in range(D)])
        return 0, fg, np.array([pg[d] for d in range(D)])
    finally:
        free(x); free(v); free(pl); free(fl); free(pg)
