"""Experiment orchestration: per-series analysis, length and Hurst scans,
surrogate comparisons.  Every report serializes to deterministic JSON."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .allometry import FitError, tree_eta
from .ingest import PriceSeries, random_subseries
from .spanning import TREE_KINDS, spanning_tree
from .stats import RegressionReport, ols
from .synth import FbmSpec, SurrogateKind, gen_brownian, gen_fbm, make_surrogate
from .visibility import build_visibility_graph

log = logging.getLogger(__name__)

DEFAULT_RANST_COUNT = 100
DEFAULT_REALIZATIONS = 100
DEFAULT_HURSTS = tuple(round(0.05 * k, 2) for k in range(1, 20))
DEFAULT_HURST_LENGTH = 5000
# synthetic random walks are analysed as arithmetic paths with price-slope weights
SYNTHETIC_WEIGHT_MODE = "linear"


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 63-bit seed for a sub-stream (e.g. the RanST draws of a realization)."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1, np.uint64)[0] >> 1)


def default_length_grid(full_length: int, points: int = 12, start: int = 1000) -> list[int]:
    """Geometric grid from ``start`` to ``full_length``."""
    if full_length <= start:
        raise ValueError(f"series of length {full_length} is too short for a length scan")
    grid = np.unique(np.round(np.geomspace(start, full_length, points)).astype(int))
    return grid.tolist()


def _map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _mean_std(values: Sequence[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std(ddof=1)) if arr.size > 1 else 0.0


@dataclass(frozen=True)
class TreeFit:
    kind: str
    eta: float | None
    stderr: float | None
    error: str | None = None


def fit_tree(g, kind: str, rng_seed: int = 0) -> TreeFit:
    try:
        res = tree_eta(spanning_tree(g, kind, rng_seed))
    except FitError as exc:
        return TreeFit(kind, None, None, str(exc))
    return TreeFit(kind, res.eta, res.eta_stderr)


def realization_etas(s: PriceSeries, weight_mode: str, ranst_seed: int) -> dict[str, float | None]:
    """One graph, one tree of each kind; failed fits map to ``None``."""
    g = build_visibility_graph(s, weight_mode)
    return {kind: fit_tree(g, kind, ranst_seed).eta for kind in TREE_KINDS}


@dataclass
class IndexReport:
    label: str
    length: int
    eta_maxst: float | None
    eta_maxst_stderr: float | None
    eta_minst: float | None
    eta_minst_stderr: float | None
    eta_ranst_mean: float | None
    eta_ranst_std: float | None
    ranst_count: int
    ranst_failed: int
    failures: dict[str, str] = field(default_factory=dict)

    def row(self) -> dict:
        return asdict(self)


def analyze_index(s: PriceSeries, ranst_count: int = DEFAULT_RANST_COUNT, seed: int = 0,
                  weight_mode: str = "signed") -> IndexReport:
    """MaxST and MinST exponents with their fit errors, plus RanST mean and std.

    RanST ``k`` uses seed ``seed + k``.  Failed fits are reported, never hidden.
    """
    if ranst_count < 1:
        raise ValueError("ranst_count must be >= 1")
    g = build_visibility_graph(s, weight_mode)
    fmax, fmin = fit_tree(g, "MaxST"), fit_tree(g, "MinST")
    ran = [fit_tree(g, "RanST", seed + k) for k in range(ranst_count)]
    ok = [f.eta for f in ran if f.eta is not None]
    failures = {f.kind: f.error for f in (fmax, fmin) if f.error}
    if len(ok) < ranst_count:
        failures["RanST"] = next(f.error for f in ran if f.error)
    mean, std = _mean_std(ok)
    return IndexReport(
        label=s.label, length=len(s),
        eta_maxst=fmax.eta, eta_maxst_stderr=fmax.stderr,
        eta_minst=fmin.eta, eta_minst_stderr=fmin.stderr,
        eta_ranst_mean=mean, eta_ranst_std=std,
        ranst_count=ranst_count, ranst_failed=ranst_count - len(ok), failures=failures)


@dataclass
class ScanReport:
    kind: str
    config: dict
    results: list[dict]
    regressions: list[dict]
    ordering: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "config": self.config,
               "results": self.results, "regressions": self.regressions}
        if self.ordering:
            out["ordering"] = self.ordering
        return out

    def regression(self, tree: str, transform: str = "identity") -> RegressionReport:
        for reg in self.regressions:
            if reg["tree"] == tree and reg["transform"] == transform:
                fields = {k: v for k, v in reg.items() if k not in ("tree", "x")}
                return RegressionReport(**fields)
        raise KeyError(f"no {transform} regression for {tree}")

    def point(self, label) -> dict:
        for row in self.results:
            if row["label"] == label:
                return row
        raise KeyError(label)


def _aggregate(label, x, etas: list[dict[str, float | None]]) -> dict:
    row = {"label": label, "x": x, "realizations": len(etas)}
    for kind in TREE_KINDS:
        vals = [e[kind] for e in etas if e[kind] is not None]
        mean, std = _mean_std(vals)
        row[kind] = {"mean": mean, "std": std,
                     "stderr": None if std is None else std / math.sqrt(len(vals)),
                     "min": min(vals, default=None), "max": max(vals, default=None),
                     "n": len(vals), "failed": len(etas) - len(vals)}
    return row


def _regress(rows: list[dict], transforms: dict[str, Sequence[str]], x_name: str) -> list[dict]:
    out = []
    for kind in TREE_KINDS:
        pts = [(r["x"], r[kind]["mean"]) for r in rows if r[kind]["mean"] is not None]
        if len(pts) < 3:
            log.warning("skipping %s regression: only %d scan points", kind, len(pts))
            continue
        xs, ys = zip(*pts)
        for transform in transforms[kind]:
            reg = ols(xs, ys, transform)
            out.append({"tree": kind, "x": x_name, **reg.to_dict()})
    return out


@dataclass(frozen=True)
class _SubseriesJob:
    source: PriceSeries
    length: int
    seed: int

    def __call__(self) -> dict:
        s = random_subseries(self.source, self.length, self.seed)
        return realization_etas(s, "signed", derive_seed(self.seed, 1))


@dataclass(frozen=True)
class _BrownianJob:
    length: int
    seed: int

    def __call__(self) -> dict:
        return realization_etas(gen_brownian(self.length, self.seed), SYNTHETIC_WEIGHT_MODE,
                                derive_seed(self.seed, 1))


@dataclass(frozen=True)
class _FbmJob:
    hurst: float
    length: int
    seed: int

    def __call__(self) -> dict:
        s = gen_fbm(FbmSpec(self.hurst, self.length, self.seed))
        return realization_etas(s, SYNTHETIC_WEIGHT_MODE, derive_seed(self.seed, 1))


@dataclass(frozen=True)
class _SurrogateJob:
    source: PriceSeries
    kind: str
    seed: int

    def __call__(self) -> dict:
        if self.kind == "Bm":
            s, mode = gen_brownian(len(self.source), self.seed), SYNTHETIC_WEIGHT_MODE
        else:
            s, mode = make_surrogate(self.source, SurrogateKind(self.kind), self.seed), "signed"
        return realization_etas(s, mode, derive_seed(self.seed, 1))


def _run(job) -> dict:
    return job()


def length_scan(source: PriceSeries | None, lengths: Sequence[int],
                realizations: int = DEFAULT_REALIZATIONS, seed: int = 0,
                workers: int = 1) -> ScanReport:
    """Mean exponents against series length.

    With a ``source`` series each realization is a random contiguous window of
    it; with ``source=None`` each is a fresh Brownian path.  Realization ``r``
    of grid point ``i`` uses seed ``seed + i * realizations + r``.
    """
    lengths = [int(x) for x in lengths]
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    if any(x < 100 for x in lengths):
        raise ValueError("every scan length must be >= 100")
    if source is not None and max(lengths) > len(source):
        raise ValueError(f"length {max(lengths)} exceeds source length {len(source)}")
    jobs = []
    for i, length in enumerate(lengths):
        for r in range(realizations):
            rs = seed + i * realizations + r
            jobs.append(_BrownianJob(length, rs) if source is None
                        else _SubseriesJob(source, length, rs))
    etas = _map(_run, jobs, workers)
    rows = [_aggregate(length, length, etas[i * realizations:(i + 1) * realizations])
            for i, length in enumerate(lengths)]
    both = ("identity", "log-x")
    regressions = _regress(rows, {k: both for k in TREE_KINDS}, "L")
    config = {"mode": "bm" if source is None else "index",
              "source": None if source is None else source.label,
              "source_length": None if source is None else len(source),
              "lengths": lengths, "realizations": realizations, "seed": seed,
              "weight_mode": SYNTHETIC_WEIGHT_MODE if source is None else "signed"}
    return ScanReport("length-scan", config, rows, regressions)


def hurst_scan(hursts: Sequence[float] = DEFAULT_HURSTS, length: int = DEFAULT_HURST_LENGTH,
               realizations: int = DEFAULT_REALIZATIONS, seed: int = 0,
               workers: int = 1) -> ScanReport:
    """Mean exponents of fractional Brownian paths against the Hurst index."""
    hursts = [float(h) for h in hursts]
    if any(not 0.0 < h < 1.0 for h in hursts):
        raise ValueError("every Hurst index must lie strictly inside (0, 1)")
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    jobs = [_FbmJob(h, length, seed + i * realizations + r)
            for i, h in enumerate(hursts) for r in range(realizations)]
    etas = _map(_run, jobs, workers)
    rows = [_aggregate(h, h, etas[i * realizations:(i + 1) * realizations])
            for i, h in enumerate(hursts)]
    regressions = _regress(rows, {k: ("identity",) for k in TREE_KINDS}, "H")
    config = {"hursts": hursts, "length": length, "realizations": realizations, "seed": seed,
              "weight_mode": SYNTHETIC_WEIGHT_MODE, "generator": "circulant-embedding fGn"}
    return ScanReport("hurst-scan", config, rows, regressions)


SURROGATE_GROUPS = ("Surr1", "Surr2", "Surr3", "Bm")


def _gap(rows: dict, lo: str, hi: str, kind: str) -> dict:
    a, b = rows[lo][kind], rows[hi][kind]
    se = math.hypot(a["stderr"] or 0.0, b["stderr"] or 0.0)
    diff = b["mean"] - a["mean"]
    return {"tree": kind, "lower": lo, "upper": hi, "difference": diff,
            "combined_stderr": se, "z": diff / se if se > 0 else math.copysign(math.inf, diff),
            "holds": diff > 0}


def surrogate_compare(s: PriceSeries, realizations: int = DEFAULT_REALIZATIONS, seed: int = 0,
                      ranst_count: int | None = None, workers: int = 1) -> ScanReport:
    """Exponents of the original series against Surr1/2/3 surrogates and Brownian paths.

    Group ``g`` (in the order Surr1, Surr2, Surr3, Bm) realization ``r`` uses
    seed ``seed + g * realizations + r``.  The Bm group is a level-form random
    walk of the same length.
    """
    if realizations < 2:
        raise ValueError("realizations must be >= 2")
    original = analyze_index(s, ranst_count or realizations, seed)
    jobs = [_SurrogateJob(s, group, seed + g * realizations + r)
            for g, group in enumerate(SURROGATE_GROUPS) for r in range(realizations)]
    etas = _map(_run, jobs, workers)
    rows = [{"label": "original", "x": None, "realizations": 1,
             "MaxST": {"mean": original.eta_maxst, "std": None,
                       "stderr": original.eta_maxst_stderr, "n": 1, "failed": 0},
             "MinST": {"mean": original.eta_minst, "std": None,
                       "stderr": original.eta_minst_stderr, "n": 1, "failed": 0},
             "RanST": {"mean": original.eta_ranst_mean, "std": original.eta_ranst_std,
                       "stderr": None if original.eta_ranst_std is None
                       else original.eta_ranst_std / math.sqrt(original.ranst_count - original.ranst_failed),
                       "n": original.ranst_count - original.ranst_failed,
                       "failed": original.ranst_failed}}]
    for g, group in enumerate(SURROGATE_GROUPS):
        rows.append(_aggregate(group, None, etas[g * realizations:(g + 1) * realizations]))
    by_label = {row["label"]: row for row in rows}
    ordering = [_gap(by_label, lo, hi, kind)
                for kind in ("MaxST", "MinST")
                for lo, hi in (("Bm", "Surr1"), ("Bm", "Surr2"), ("Surr1", "Surr3"), ("Surr2", "Surr3"))]
    config = {"source": s.label, "length": len(s), "realizations": realizations, "seed": seed,
              "ranst_count": original.ranst_count, "surrogate_weight_mode": "signed",
              "bm_weight_mode": SYNTHETIC_WEIGHT_MODE}
    return ScanReport("surrogate-compare", config, rows, [], ordering)


def ordering_holds(report: ScanReport, min_z: float = 2.0) -> bool:
    """True when every Bm < Surr1, Surr2 < Surr3 gap exceeds ``min_z`` combined standard errors."""
    return all(gap["z"] > min_z for gap in report.ordering)


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return None if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def report_json(report: dict) -> str:
    return json.dumps(_clean(report), indent=2, allow_nan=False) + "\n"


def write_report(report: dict, path) -> None:
    Path(path).write_text(report_json(report), encoding="utf-8")
