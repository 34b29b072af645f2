"""Configuration, resumable PSO experiment runs and CSV exports."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import analysis, functions, rating, stats
from .pso import ObjectiveError, SwarmConfig, optimize, distance_error, position_error
from .seeding import derive_seed
from .sources import FROZEN_RESCALE, DEFAULT_SOURCES, DistributionSpec, MapSpec, SequenceSource, spec_for

log = logging.getLogger(__name__)

RUNS_FILE = "runs.csv"
RUN_COLUMNS = ["function_id", "source_id", "run_index", "seed", "best_value", "distance_error", "status"]
STATE_FILE = "run_config.json"
DEFAULT_MASTER_SEED = 20190101

PRESETS = {
    "paper": {"runs_per_pair": 4000, "density_inits": 10000, "analysis_inits": 10000},
    "desk": {"runs_per_pair": 200, "density_inits": 1000, "analysis_inits": 1000},
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    sources: tuple[str, ...] = DEFAULT_SOURCES
    functions: tuple[int, ...] = tuple(range(1, 28))
    runs_per_pair: int = 4000
    swarm: SwarmConfig = field(default_factory=SwarmConfig)
    master_seed: int = DEFAULT_MASTER_SEED
    alpha: float = 0.05
    elo_k: float = rating.ELO_K
    draw_eps: float = rating.DRAW_EPS
    draw_mode: str = "absolute"
    glicko_tau: float = rating.GLICKO_TAU
    block_size: int = rating.BLOCK_SIZE
    workers: int = 1
    output_dir: str = "results"
    error_metric: str = "value"
    normal_resample: bool = False
    density_inits: int = 10000
    analysis_inits: int = 10000
    sequence_length: int = analysis.DEFAULT_T
    bounds: tuple[tuple[int, float, float], ...] = ()

    def validate(self):
        if not self.sources:
            raise ConfigError("sources must not be empty")
        if not self.functions:
            raise ConfigError("functions must not be empty")
        if len(set(self.sources)) != len(self.sources):
            raise ConfigError("sources contain duplicates")
        if len(set(self.functions)) != len(self.functions):
            raise ConfigError("functions contain duplicates")
        for sid in self.sources:
            try:
                spec_for(sid)
            except ValueError:
                raise ConfigError(f"unknown source id: {sid}") from None
        for fid in self.functions:
            if not 1 <= fid <= len(functions.SUITE):
                raise ConfigError(f"unknown function id: {fid}")
        if self.runs_per_pair < 1:
            raise ConfigError("runs_per_pair must be positive")
        if self.block_size < 1 or self.runs_per_pair % self.block_size:
            raise ConfigError(f"runs_per_pair={self.runs_per_pair} is not divisible by block_size={self.block_size}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if self.draw_mode not in ("absolute", "relative"):
            raise ConfigError(f"unknown draw_mode: {self.draw_mode}")
        if self.error_metric not in ("value", "position"):
            raise ConfigError(f"unknown error_metric: {self.error_metric}")
        if self.glicko_tau <= 0 or self.draw_eps < 0 or self.elo_k <= 0:
            raise ConfigError("rating parameters must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if not 0 <= self.master_seed < 1 << 64:
            raise ConfigError("master_seed must be an unsigned 64-bit integer")
        if self.density_inits < 1 or self.analysis_inits < 1 or self.sequence_length <= analysis.DEFAULT_LMAX:
            raise ConfigError("analysis sizes are too small")
        for fid, lo, hi in self.bounds:
            if fid not in self.functions or not lo < hi:
                raise ConfigError(f"bad bounds override for function {fid}")
        return self

    def spec(self, source_id):
        spec = spec_for(source_id)
        if isinstance(spec, DistributionSpec) and spec.family.value == "normal" and self.normal_resample:
            spec = replace(spec, resample=True)
        return spec

    def function(self, fid):
        for f, lo, hi in self.bounds:
            if f == fid:
                return functions.with_bounds(fid, lo, hi)
        return functions.get(fid)

    def identity(self):
        """Settings that determine the outputs (excludes workers and paths)."""
        d = asdict(self)
        d.pop("workers")
        d.pop("output_dir")
        return d

    def digest(self):
        blob = json.dumps(self.identity(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()

    def run_digest(self):
        d = self.identity()
        for key in ("alpha", "elo_k", "draw_eps", "draw_mode", "glicko_tau", "block_size",
                    "density_inits", "analysis_inits", "sequence_length"):
            d.pop(key)
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


# ---------------------------------------------------------------- config IO

_SWARM_KEYS = {"w": float, "c1": float, "c2": float, "swarm_size": int, "generations": int,
               "scalar_draws": "bool"}
_KEYS = {
    "runs_per_pair": int, "master_seed": int, "alpha": float, "elo_k": float,
    "draw_eps": float, "draw_mode": str, "glicko_tau": float, "block_size": int,
    "workers": int, "output_dir": str, "error_metric": str, "normal_resample": "bool",
    "density_inits": int, "analysis_inits": int, "sequence_length": int,
}


def _parse_bool(text, key):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def _parse_int(text, key):
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _convert(kind, text, key):
    if kind == "bool":
        return _parse_bool(text, key)
    if kind is int:
        return _parse_int(text, key)
    if kind is float:
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    return text.strip()


def _parse_functions(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            a, b = part.split("-", 1)
            out.extend(range(_parse_int(a, "functions"), _parse_int(b, "functions") + 1))
        else:
            out.append(_parse_int(part, "functions"))
    return tuple(out)


def _parse_sources(text):
    if text.strip() == "all":
        return DEFAULT_SOURCES
    return tuple(s.strip() for s in text.split(",") if s.strip())


def apply_settings(cfg, settings):
    """Apply string key=value settings on top of ``cfg``."""
    top, swarm, bounds = {}, {}, dict((f, (lo, hi)) for f, lo, hi in cfg.bounds)
    for key, text in settings.items():
        if key == "sources":
            top["sources"] = _parse_sources(text)
        elif key == "functions":
            top["functions"] = _parse_functions(text)
        elif key in _SWARM_KEYS:
            swarm[key] = _convert(_SWARM_KEYS[key], text, key)
        elif key in _KEYS:
            top[key] = _convert(_KEYS[key], text, key)
        elif key.startswith("bounds."):
            fid = _parse_int(key.split(".", 1)[1], key)
            try:
                lo, hi = (float(v) for v in text.split(","))
            except ValueError:
                raise ConfigError(f"{key}: expected 'lo,hi'") from None
            bounds[fid] = (lo, hi)
        else:
            raise ConfigError(f"unknown config key: {key}")
    try:
        sw = replace(cfg.swarm, **swarm)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    top["bounds"] = tuple(sorted((f, lo, hi) for f, (lo, hi) in bounds.items()))
    return replace(cfg, swarm=sw, **top)


def parse_config_text(text):
    settings = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected key=value")
        key, value = line.split("=", 1)
        settings[key.strip()] = value.strip()
    return settings


def load_config(path=None, preset=None, overrides=None):
    """Defaults, then preset, then file, then explicit overrides."""
    cfg = ExperimentConfig()
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset: {preset}")
        cfg = replace(cfg, **PRESETS[preset])
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        cfg = apply_settings(cfg, parse_config_text(text))
    if overrides:
        cfg = apply_settings(cfg, {k: str(v) for k, v in overrides.items()})
    return cfg.validate()


# ---------------------------------------------------------------- runs

def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def _run_block(task):
    cfg, sid, fid = task
    fn = cfg.function(fid)
    spec = cfg.spec(sid)
    rows = []
    for k in range(cfg.runs_per_pair):
        seed = derive_seed(cfg.master_seed, sid, fid, k)
        src = SequenceSource(spec, seed, sid)
        try:
            best, x = optimize(cfg.swarm, fn, src)
            err = distance_error(best, fn) if cfg.error_metric == "value" else position_error(x, fn)
            rows.append((fid, sid, k, seed, float(best), float(err), "ok"))
        except ObjectiveError as exc:
            log.warning("%s", exc)
            rows.append((fid, sid, k, seed, math.nan, math.nan, "aborted"))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def blocks(cfg):
    """Canonical (source, function) block order."""
    return [(s, f) for s in cfg.sources for f in cfg.functions]


def _complete_prefix(path, cfg):
    """Byte offset after the header and the longest run of complete blocks."""
    order = blocks(cfg)
    header = ",".join(RUN_COLUMNS) + "\n"
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(header.encode()):
        return 0, 0
    pos = len(header)
    done = 0
    for sid, fid in order:
        ok = True
        start = pos
        for k in range(cfg.runs_per_pair):
            end = data.find(b"\n", pos)
            if end < 0:
                ok = False
                break
            parts = data[pos:end].decode().split(",")
            if len(parts) != len(RUN_COLUMNS) or parts[0] != str(fid) or parts[1] != sid or parts[2] != str(k):
                ok = False
                break
            pos = end + 1
        if not ok:
            pos = start
            break
        done += 1
    return pos, done


def run_experiment(cfg, out_dir=None, progress=None):
    """Execute (or resume) all runs; returns the path of runs.csv."""
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / RUNS_FILE
    state = out / STATE_FILE
    ident = {"run_digest": cfg.run_digest()}
    if path.exists() and state.exists():
        if json.loads(state.read_text()) != ident:
            raise ConfigError(f"{out} holds runs of a different configuration")
    elif path.exists():
        raise ConfigError(f"{path} exists without {STATE_FILE}")
    state.write_text(json.dumps(ident, sort_keys=True) + "\n")
    order = blocks(cfg)
    done = 0
    if path.exists():
        offset, done = _complete_prefix(path, cfg)
        with open(path, "r+b") as fh:
            fh.truncate(offset)
    if done == 0:
        with open(path, "w") as fh:
            fh.write(",".join(RUN_COLUMNS) + "\n")
    todo = [(cfg, s, f) for s, f in order[done:]]
    if not todo:
        return path
    with open(path, "a") as fh:
        if cfg.workers == 1:
            results = map(_run_block, todo)
            pool = None
        else:
            pool = ProcessPoolExecutor(max_workers=cfg.workers)
            results = pool.map(_run_block, todo)
        try:
            for i, text in enumerate(results):
                fh.write(text)
                fh.flush()
                if progress:
                    progress(done + i + 1, len(order))
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)
    return path


def load_runs(path):
    """Read runs.csv into {(source_id, function_id): errors in run order} plus aborted count."""
    samples, aborted = {}, 0
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if row["status"] != "ok":
                aborted += 1
                continue
            key = (row["source_id"], int(row["function_id"]))
            samples.setdefault(key, []).append((int(row["run_index"]), float(row["distance_error"])))
    out = {k: np.array([e for _, e in sorted(v)]) for k, v in samples.items()}
    return out, aborted


# ---------------------------------------------------------------- summaries

@dataclass(frozen=True)
class BoxplotSummary:
    source_id: str
    function_id: int
    q1: float
    median: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: tuple[float, ...]
    mean: float


def _median(x):
    n = len(x)
    mid = n // 2
    return float(x[mid]) if n % 2 else (float(x[mid - 1]) + float(x[mid])) / 2.0


def summarize_boxplot(samples, source_id, function_id):
    """Tukey hinges and 1.5 IQR whiskers."""
    x = np.sort(np.asarray(samples[(source_id, function_id)], dtype=float))
    n = x.size
    if n < 5:
        raise ValueError("a boxplot needs at least 5 data points")
    q1 = _median(x[: (n + 1) // 2])
    q3 = _median(x[n // 2:])
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    outliers = tuple(float(v) for v in x[(x < lo_fence) | (x > hi_fence)])
    return BoxplotSummary(source_id, function_id, q1, _median(x), q3, float(inside.min()),
                          float(inside.max()), outliers, math.fsum(x) / n)


# ---------------------------------------------------------------- exports

def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else _fmt(v) for v in row])


def export_suite(cfg, out):
    rows = []
    for fid in cfg.functions:
        fn = cfg.function(fid)
        lo = fn.lower[0] if len(set(fn.lower)) == 1 else ";".join(repr(v) for v in fn.lower)
        hi = fn.upper[0] if len(set(fn.upper)) == 1 else ";".join(repr(v) for v in fn.upper)
        rows.append((fn.id, fn.name, fn.dim, lo, hi, fn.direction, fn.f_star))
    _write_csv(out / "suite.csv", ["id", "name", "D", "lo", "hi", "direction", "f_star"], rows)


def export_analysis(cfg, out):
    sources = list(cfg.sources)
    rows = []
    for sid in sources:
        h = analysis.invariant_density(sid, cfg.density_inits, cfg.sequence_length, master=cfg.master_seed)
        for lo, hi, d in zip(h.bin_edges[:-1], h.bin_edges[1:], h.density):
            rows.append((sid, float(lo), float(hi), float(d)))
    _write_csv(out / "density.csv", ["source_id", "bin_lo", "bin_hi", "density"], rows)
    reports, lambdas = analysis.characterize(sources, cfg.analysis_inits, cfg.sequence_length,
                                             cfg.sequence_length, master=cfg.master_seed)
    _write_csv(out / "autocorr.csv", ["source_id", "lag", "r"],
               [(sid, int(lag), float(r)) for sid in sources for lag, r in zip(reports[sid].lags, reports[sid].r)])
    _write_csv(out / "map_stats.csv", ["source_id", "lambda", "auc_raw", "auc_normalized"],
               [(sid, lambdas[sid], reports[sid].auc_raw, reports[sid].auc_normalized) for sid in sources])


def _is_map(sid):
    return isinstance(spec_for(sid), MapSpec)


def export_compare(cfg, out, samples):
    sources, fids = list(cfg.sources), list(cfg.functions)
    cells = stats.comparison_matrix(samples, sources, fids, cfg.alpha)
    matrix, heat = [], []
    for row in sources:
        for col in sources:
            if row == col:
                continue
            for t in stats.Test:
                c = cells[(row, col)].counts[t]
                matrix.append((row, col, t.value, c.plus, c.minus, c.tie))
                heat.append((row, col, t.value, c.tie / len(fids)))
    _write_csv(out / "matrix.csv", ["row_source", "col_source", "test", "plus", "minus", "tie"], matrix)
    _write_csv(out / "heatmap.csv", ["row_source", "col_source", "test", "tie_fraction"], heat)
    agg = stats.aggregates(cells, sources, _is_map)
    rows = []
    for sid in sources:
        for group in ("opposite", "same"):
            for t in stats.Test:
                c = agg.get((sid, group, t))
                if c is not None:
                    rows.append((sid, group, t.value, c.plus, c.minus, c.tie))
    _write_csv(out / "aggregates.csv", ["source_id", "group", "test", "plus", "minus", "tie"], rows)


def export_boxplots(cfg, out, samples):
    rows = []
    for sid in cfg.sources:
        for fid in cfg.functions:
            b = summarize_boxplot(samples, sid, fid)
            rows.append((sid, fid, b.q1, b.median, b.q3, b.whisker_lo, b.whisker_hi, b.mean,
                         ";".join(repr(v) for v in b.outliers)))
    _write_csv(out / "boxplots.csv", ["source_id", "function_id", "q1", "median", "q3",
                                      "whisker_lo", "whisker_hi", "mean", "outliers"], rows)


def export_ratings(cfg, out, samples):
    res = rating.run_tournament(samples, list(cfg.sources), list(cfg.functions), cfg.block_size,
                                cfg.draw_eps, cfg.elo_k, cfg.glicko_tau, cfg.draw_mode)
    rows = []
    for sid in cfg.sources:
        s = res.final[sid]
        rows.append((sid, s.elo, *res.elo_ci[sid], s.glicko_r, s.glicko_rd, s.glicko_sigma, *res.glicko_ci[sid]))
    _write_csv(out / "ratings.csv", ["source_id", "elo", "elo_ci_lo", "elo_ci_hi", "glicko_r", "glicko_rd",
                                     "glicko_sigma", "glicko_ci_lo", "glicko_ci_hi"], rows)
    _write_csv(out / "games.csv", ["player_a", "player_b", "function_id", "block_index", "outcome"],
               [(g.player_a, g.player_b, g.function_id, g.block_index, g.outcome.value) for g in res.games])
    return res


def write_manifest(cfg, out, files, errors):
    from . import __version__

    entries = {}
    for name in sorted(files):
        p = out / name
        if p.exists():
            entries[name] = hashlib.sha256(p.read_bytes()).hexdigest()
    manifest = {
        "code_version": __version__,
        "config": cfg.identity(),
        "config_hash": cfg.digest(),
        "master_seed": cfg.master_seed,
        "rescale_bounds": {fam.value: list(b) for fam, b in FROZEN_RESCALE.items()},
        "files": entries,
        "errors": errors,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


STAGES = ("suite", "analysis", "compare", "boxplots", "ratings")
STAGE_FILES = {
    "suite": ["suite.csv"],
    "analysis": ["density.csv", "autocorr.csv", "map_stats.csv"],
    "compare": ["matrix.csv", "heatmap.csv", "aggregates.csv"],
    "boxplots": ["boxplots.csv"],
    "ratings": ["ratings.csv", "games.csv"],
}


def export_all(cfg, out_dir=None, stages=STAGES):
    """Write the requested exports; one failing export does not stop the others.

    Returns {stage: error message} for the stages that failed.
    """
    out = Path(out_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    samples = None
    needs_runs = any(s in stages for s in ("compare", "boxplots", "ratings"))
    errors = {}
    if needs_runs:
        path = out / RUNS_FILE
        if path.exists():
            state = out / STATE_FILE
            if not state.exists() or json.loads(state.read_text()) != {"run_digest": cfg.run_digest()}:
                raise ConfigError(f"{path} was produced by a different configuration")
            samples, aborted = load_runs(path)
            if aborted:
                log.warning("%d aborted runs excluded", aborted)
        else:
            for s in ("compare", "boxplots", "ratings"):
                if s in stages:
                    errors[s] = f"{path} not found"
    for stage in stages:
        if stage in errors:
            continue
        try:
            if stage == "suite":
                export_suite(cfg, out)
            elif stage == "analysis":
                export_analysis(cfg, out)
            elif stage == "compare":
                export_compare(cfg, out, samples)
            elif stage == "boxplots":
                export_boxplots(cfg, out, samples)
            elif stage == "ratings":
                export_ratings(cfg, out, samples)
        except (ValueError, KeyError) as exc:
            log.error("%s export failed: %s", stage, exc)
            errors[stage] = str(exc)
    if set(stages) == set(STAGES):
        files = [f for s in STAGES for f in STAGE_FILES[s]]
        write_manifest(cfg, out, files, errors)
    return errors


def run_full(cfg, out_dir=None, progress=None):
    run_experiment(cfg, out_dir, progress)
    return export_all(cfg, out_dir)
