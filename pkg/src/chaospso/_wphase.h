/*
 * Weierstrass map kernel: z' = sum_i a^i cos(pi b^i z), i = 0..N.
 *
 * The phase pi b^i z is reduced exactly.  For a double z = M 2^E and an
 * integer b, (b^i z / 2) mod 1 equals ((b^i mod 2^K) M mod 2^K) / 2^K with
 * K = 1 - E, so the fraction of a turn is an integer residue and needs no
 * floating-point argument reduction.  cos/sin of the residual angle use
 * fdlibm-style minimax kernels built from + and * only, so every value is
 * reproducible bit-for-bit by the pure-Python mirror in _pure.py.
 *
 * Compile with -ffp-contract=off: fused multiply-adds would change results.
 */
#ifndef CHAOSPSO_WPHASE_H
#define CHAOSPSO_WPHASE_H

#include <math.h>
#include <stdint.h>
#include <string.h>

#define WZ_MAXT 128
#define WZ_WORDS 17             /* K <= 1075 for any double, 17 * 64 >= 1075 */

typedef struct {
    int nt;                     /* number of terms, N + 1 */
    double a_pow[WZ_MAXT];      /* a^i */
    double dcoef[WZ_MAXT];      /* a^i * b^i * pi, derivative weights */
    uint64_t bw[WZ_MAXT][WZ_WORDS]; /* b^i mod 2^1088, little-endian words */
} wz_params;

/* 2*pi / 2^64 */
#define WZ_TURN_SCALE 3.4061215800865545e-19

static inline double wz_kcos(double x)
{
    const double C1 = 4.16666666666666019037e-02;
    const double C2 = -1.38888888888741095749e-03;
    const double C3 = 2.48015872894767294178e-05;
    const double C4 = -2.75573143513906633035e-07;
    const double C5 = 2.08757232129817482790e-09;
    const double C6 = -1.13596475577881948265e-11;
    double z = x * x;
    double w = z * z;
    double r = z * (C1 + z * (C2 + z * C3)) + w * w * (C4 + z * (C5 + z * C6));
    double hz = 0.5 * z;
    w = 1.0 - hz;
    return w + (((1.0 - w) - hz) + (z * r));
}

static inline double wz_ksin(double x)
{
    const double S1 = -1.66666666666666324348e-01;
    const double S2 = 8.33333333332248946124e-03;
    const double S3 = -1.98412698298579493134e-04;
    const double S4 = 2.75573137070700676789e-06;
    const double S5 = -2.50507602534068634195e-08;
    const double S6 = 1.58969099521155010221e-10;
    double z = x * x;
    double w = z * z;
    double r = S2 + z * (S3 + z * S4) + z * w * (S5 + z * S6);
    double v = z * x;
    return x + v * (S1 + z * r);
}

static inline uint64_t wz_d2u(double d) { uint64_t u; memcpy(&u, &d, 8); return u; }
static inline double wz_u2d(uint64_t u) { double d; memcpy(&d, &u, 8); return d; }

/*
 * cos and sin of 2*pi*F/2^64 for a 64-bit turn fraction F.  Branch-free so
 * the per-term loop vectorizes.
 */
static inline void wz_turn(uint64_t F, double *c_out, double *s_out)
{
    uint64_t k = (F + (1ULL << 61)) >> 62;
    int64_t g = (int64_t)(F - (k << 62));
    double phi = (double)g * WZ_TURN_SCALE;
    double s = wz_ksin(phi);
    double c = wz_kcos(phi);
    uint64_t sb = wz_d2u(s), cb = wz_d2u(c);
    uint64_t odd = 0 - (k & 1);
    /* quadrant k: cos -> c, -s, -c, s ; sin -> s, c, -s, -c */
    uint64_t cr = ((sb & odd) | (cb & ~odd)) ^ (((k + 1) & 2) << 62);
    uint64_t sr = ((cb & odd) | (sb & ~odd)) ^ ((k & 2) << 62);
    *c_out = wz_u2d(cr);
    *s_out = wz_u2d(sr);
}

/*
 * Fill cs[i] = cos(pi b^i z), sn[i] = sin(pi b^i z).
 */
static inline void wz_phases(const wz_params *p, double z, double *cs, double *sn)
{
    int nt = p->nt;
    double az = fabs(z);
    uint64_t bits = wz_d2u(az);
    int ex = (int)(bits >> 52);
    uint64_t m;
    int E;
    if (az == 0.0) {
        for (int i = 0; i < nt; i++) { cs[i] = 1.0; sn[i] = 0.0; }
        return;
    }
    if (ex == 0) {
        m = bits & ((1ULL << 52) - 1);
        E = -1074;
    } else {
        m = (bits & ((1ULL << 52) - 1)) | (1ULL << 52);
        E = ex - 1075;
    }
    int K = 1 - E;
    if (K <= 0) {
        for (int i = 0; i < nt; i++) { cs[i] = 1.0; sn[i] = 0.0; }
    } else if (K <= 64) {
        int sh = 64 - K;
        for (int i = 0; i < nt; i++) {
            uint64_t F = (p->bw[i][0] * m) << sh;
            wz_turn(F, &cs[i], &sn[i]);
        }
    } else if (K <= 128) {
        for (int i = 0; i < nt; i++) {
            unsigned __int128 B = ((unsigned __int128)p->bw[i][1] << 64) | p->bw[i][0];
            unsigned __int128 P = B * (unsigned __int128)m;
            uint64_t F = (uint64_t)((P << (128 - K)) >> 64);
            wz_turn(F, &cs[i], &sn[i]);
        }
    } else {
        /* |z| < 2^-75: multiword product, bits K-64 .. K-1 */
        int q = (K - 64) >> 6, r = (K - 64) & 63;
        for (int i = 0; i < nt; i++) {
            uint64_t w[WZ_WORDS + 1];
            uint64_t carry = 0;
            for (int j = 0; j < WZ_WORDS; j++) {
                unsigned __int128 t = (unsigned __int128)p->bw[i][j] * m + carry;
                w[j] = (uint64_t)t;
                carry = (uint64_t)(t >> 64);
            }
            w[WZ_WORDS] = carry;
            uint64_t F = w[q] >> r;
            if (r) F |= w[q + 1] << (64 - r);
            wz_turn(F, &cs[i], &sn[i]);
        }
    }
    if (z < 0.0) {
        for (int i = 0; i < nt; i++) sn[i] = -sn[i];
    }
}

/* Next state; if deriv is non-NULL also stores the derivative at z. */
static inline double wz_eval(const wz_params *p, double z, double *deriv)
{
    double cs[WZ_MAXT], sn[WZ_MAXT];
    wz_phases(p, z, cs, sn);
    double acc = 0.0;
    for (int i = 0; i < p->nt; i++) acc += p->a_pow[i] * cs[i];
    if (deriv) {
        double d = 0.0;
        for (int i = 0; i < p->nt; i++) d += p->dcoef[i] * sn[i];
        *deriv = -d;
    }
    return acc;
}

#endif
