"""Statistical characterization of sequence sources."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sources import DistributionSpec, MapSpec, SequenceSource, spec_for
from .seeding import analysis_seed

DEFAULT_BINS = 100
DEFAULT_T = 400
DEFAULT_LMAX = 10
ANALYSIS_MASTER = 2024


@dataclass(frozen=True)
class DensityHistogram:
    bin_edges: np.ndarray
    density: np.ndarray
    samples: int

    @property
    def widths(self):
        return np.diff(self.bin_edges)

    def total_mass(self):
        return math.fsum(self.density * self.widths)


@dataclass(frozen=True)
class AutocorrReport:
    lags: np.ndarray
    r: np.ndarray
    T: int
    auc_raw: float | None = None
    auc_normalized: float | None = None


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    inits: int
    iters: int


def _resolve(spec):
    if isinstance(spec, MapSpec):
        return spec.family.value, spec
    if isinstance(spec, DistributionSpec):
        p0, p1 = spec.params
        return f"{spec.family.value}_{p0:g}_{p1:g}", spec
    return str(spec), spec_for(spec)


def _seeded(spec, purpose, n_inits, master):
    sid, spec = _resolve(spec)
    for k in range(n_inits):
        yield SequenceSource(spec, analysis_seed(master, sid, purpose, k), sid)


def invariant_density(spec, n_inits, iters, bins=DEFAULT_BINS, master=ANALYSIS_MASTER):
    """Histogram density of emitted values over ``n_inits`` seeded orbits."""
    if n_inits < 1 or iters < 1 or bins < 2:
        raise ValueError("need n_inits >= 1, iters >= 1 and bins >= 2")
    edges = np.linspace(0.0, 1.0, bins + 1)
    counts = np.zeros(bins, dtype=np.int64)
    for src in _seeded(spec, "density", n_inits, master):
        counts += np.histogram(src.take(iters), bins=edges)[0]
    n = int(counts.sum())
    density = counts / (n * np.diff(edges))
    return DensityHistogram(edges, density, n)


def lyapunov_exponent(spec, n_inits, iters, master=ANALYSIS_MASTER):
    """Mean of per-orbit averages of ln|f'(z)| along raw orbits.

    Non-differentiable points (and exact critical points) are skipped.
    """
    sid, spec = _resolve(spec)
    if not isinstance(spec, MapSpec):
        raise ValueError("Lyapunov defined for maps only")
    if n_inits < 1 or iters < 1:
        raise ValueError("need n_inits >= 1 and iters >= 1")
    per_orbit = []
    for src in _seeded(spec, "lyapunov", n_inits, master):
        total, used = src._core.lyapunov_sum(iters)
        if used:
            per_orbit.append(total / used)
    return LyapunovEstimate(math.fsum(per_orbit) / len(per_orbit), n_inits, iters)


def _autocorr_rows(x, lmax):
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    T = x.shape[1]
    if T <= lmax or lmax < 1:
        raise ValueError("sequence length must exceed lmax >= 1")
    d = x - x.mean(axis=1, keepdims=True)
    num = np.empty((x.shape[0], lmax))
    for lag in range(1, lmax + 1):
        # pairs z(t+1), z(t+lag) for t = 0..T-lag
        num[:, lag - 1] = np.einsum("ij,ij->i", d[:, : T - lag + 1], d[:, lag - 1 :])
    den = num[:, :1].copy()
    if np.any(den == 0.0):
        raise ValueError("autocorrelation undefined for a constant sequence")
    return num / den


def autocorrelation(values, lmax=DEFAULT_LMAX):
    """Lag autocorrelation r(1..lmax) of one sequence; r(1) == 1."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError("expected a one-dimensional sequence")
    r = _autocorr_rows(v, lmax)[0]
    return AutocorrReport(np.arange(1, lmax + 1), r, v.shape[0])


def _area(r, signed):
    total = 0.0
    for a, b in zip(r[:-1], r[1:]):
        if signed:
            total += 0.5 * (a + b)
        elif a * b >= 0.0:
            total += 0.5 * (abs(a) + abs(b))
        else:
            # the segment crosses zero at fraction c of the unit step
            c = abs(a) / (abs(a) + abs(b))
            total += 0.5 * (abs(a) * c + abs(b) * (1.0 - c))
    return total


def auc(r, signed=False):
    """Area between r(lag) and the zero line over lags 1..10.

    The default counts every lobe positively; ``signed=True`` gives the plain
    trapezoid sum.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape[0] < DEFAULT_LMAX:
        raise ValueError("AUC needs lags 1..10")
    return float(_area(r[:DEFAULT_LMAX].tolist(), signed))


def autocorr_auc(report, prng_reference_auc, signed=False):
    """Return (auc_raw, auc_normalized) for a report covering lags 1..10."""
    lags = np.asarray(report.lags)
    if lags.shape[0] < DEFAULT_LMAX or not np.array_equal(lags[:DEFAULT_LMAX], np.arange(1, DEFAULT_LMAX + 1)):
        raise ValueError("AUC needs lags 1..10")
    raw = auc(report.r, signed)
    return raw, raw / float(prng_reference_auc)


def mean_autocorrelation(spec, n_inits, T=DEFAULT_T, lmax=DEFAULT_LMAX, master=ANALYSIS_MASTER):
    """Average r(lag) over ``n_inits`` seeded sequences of length T."""
    acc = np.zeros(lmax)
    batch = []
    for src in _seeded(spec, "autocorr", n_inits, master):
        batch.append(src.take(T))
        if len(batch) == 1000:
            acc += _autocorr_rows(np.array(batch), lmax).sum(axis=0)
            batch = []
    if batch:
        acc += _autocorr_rows(np.array(batch), lmax).sum(axis=0)
    r = acc / n_inits
    return AutocorrReport(np.arange(1, lmax + 1), r, T)


def characterize(source_ids, n_inits, T=DEFAULT_T, lyap_iters=DEFAULT_T,
                 reference="uniform_0_1", master=ANALYSIS_MASTER, signed=False):
    """Per source: mean r, Lyapunov exponent (maps only) and AUC.

    AUCs are normalized by the AUC of ``reference`` under the same protocol.
    Returns ({id: AutocorrReport}, {id: lambda or None}).
    """
    ref = mean_autocorrelation(reference, n_inits, T, master=master)
    ref_auc = auc(ref.r, signed)
    reports, lambdas = {}, {}
    for sid in source_ids:
        rep = ref if sid == reference else mean_autocorrelation(sid, n_inits, T, master=master)
        raw, norm = autocorr_auc(rep, ref_auc, signed)
        reports[sid] = AutocorrReport(rep.lags, rep.r, rep.T, raw, norm)
        spec = spec_for(sid)
        lambdas[sid] = lyapunov_exponent(spec, n_inits, lyap_iters, master).value if isinstance(spec, MapSpec) else None
    return reports, lambdas
