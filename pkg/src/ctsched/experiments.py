"""Experiment harness: interruption grids, noisy trials, baseline comparison.

Reproduces the evaluation protocol at configurable scale: a grid of
interruption times on ``[2, 2**20]`` (1000 points, 1000 trials per point by
default), predictions corrupted by the configured noise model, and per-point
mean acceleration ratios compared against the no-prediction baseline
schedule ``(2**i)``.

Randomness is keyed per grid point by the bit pattern of the interruption
time, so results for one point never depend on which other points are in the
grid, and points can be evaluated in parallel in any order.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import combinations_with_replacement
from pathlib import Path

import numpy as np

from . import kernels
from .core import (
    ContractSchedule,
    ResourceLimitError,
    cr_br,
    largest_completed,
)
from .noise import RngStream, TimeNoiseModel, float_key, sample_deltas
from .predict_query import robust_base, round_half_up

__all__ = [
    "ExperimentConfig",
    "SummaryRow",
    "ExperimentResult",
    "baseline_ratio",
    "run_time_experiment",
    "run_query_experiment",
    "run_experiment",
    "compare_to_baseline",
    "lower_bound_search",
    "emit_results",
    "read_results",
    "summary_path",
]

# Substream domain tags: keep the two settings' draws disjoint by design.
_TIME_TAG = 1
_QUERY_TAG = 2

_SETTINGS = ("time", "query")
_SPACINGS = ("linear", "log")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one experiment run; defaults match the reference
    protocol (r=4, grid [2, 2**20] x 1000 points, 1000 trials, H=0.1)."""

    setting: str = "time"
    r: float = 4.0
    t_min: float = 2.0
    t_max: float = float(2**20)
    points: int = 1000
    spacing: str = "linear"
    trials: int = 1000
    p_values: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3)
    h: float = 0.1
    noise_kind: str = "truncated-normal"
    sigma: float | None = None
    n_queries: int = 100
    seed: int = 0
    jobs: int = 1
    baseline_base: float = 2.0

    def validate(self) -> None:
        if self.setting not in _SETTINGS:
            raise ValueError(f"setting must be one of {_SETTINGS}")
        if self.spacing not in _SPACINGS:
            raise ValueError(f"spacing must be one of {_SPACINGS}")
        if self.points < 2:
            raise ValueError("grid needs at least 2 points")
        if self.trials < 1:
            raise ValueError("need at least 1 trial")
        if self.jobs < 1:
            raise ValueError("jobs must be at least 1")
        if not 1.0 <= self.t_min < self.t_max:
            raise ValueError("need 1 <= t_min < t_max")
        if self.r < 4.0:
            raise ValueError("robustness target r must be at least 4")
        if not 0.0 <= self.h <= 1.0:
            raise ValueError("H must lie in [0, 1]")
        if not self.p_values:
            raise ValueError("need at least one p value")
        if self.setting == "time":
            if self.h >= 1.0:
                raise ValueError("time-prediction noise needs H < 1")
            for p in self.p_values:
                if not 0.0 <= p < 1.0:
                    raise ValueError(f"buffer p must lie in [0, 1) (got {p!r})")
                floor = self.t_min * (1.0 - self.h) * (1.0 - p)
                if floor < 1.0:
                    raise ValueError(
                        f"t_min={self.t_min!r}, H={self.h!r}, p={p!r} can push the "
                        f"buffered target below 1 (worst case {floor!r})"
                    )
        else:
            if self.n_queries < 1:
                raise ValueError("need at least one query")
            for p in self.p_values:
                if not 0.0 <= p <= 0.5:
                    raise ValueError(f"decode buffer p must lie in [0, 1/2] (got {p!r})")

    def grid(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.t_min, self.t_max, self.points)
        return np.linspace(self.t_min, self.t_max, self.points)

    def noise_model(self) -> TimeNoiseModel:
        return TimeNoiseModel(kind=self.noise_kind, H=self.h, sigma=self.sigma)


@dataclass(frozen=True)
class SummaryRow:
    """Per-buffer summary: the mean-ratio series and its baseline comparison."""

    p: float
    mean_by_t: tuple[float, ...]
    overall_mean: float
    improvement_pct: float
    strong_improvement_pct: float


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    grid: tuple[float, ...]
    baseline: tuple[float, ...]
    rows: list[SummaryRow] = field(default_factory=list)


_BASELINES: dict[float, ContractSchedule] = {}


def baseline_ratio(t: float, base: float = 2.0) -> float:
    """Acceleration ratio of the no-prediction schedule ``(base**i)`` at ``t``."""
    sched = _BASELINES.get(base)
    if sched is None:
        sched = _BASELINES.setdefault(base, ContractSchedule.geometric(base))
    return t / largest_completed(sched, t)


def _time_point(t: float, cfg: ExperimentConfig) -> tuple[list[float], float]:
    gen = RngStream(cfg.seed).at(_TIME_TAG, float_key(t)).generator()
    deltas = sample_deltas(cfg.noise_model(), gen, cfg.trials)
    taus = t * (1.0 + deltas)
    b = cr_br(cfg.r).b_r
    means = [
        float(np.mean(kernels.time_trial_ratios(t, taus, p, b)))
        for p in cfg.p_values
    ]
    return means, baseline_ratio(t, cfg.baseline_base)


def _query_point(t: float, cfg: ExperimentConfig) -> tuple[list[float], float]:
    gen = RngStream(cfg.seed).at(_QUERY_TAG, float_key(t)).generator()
    n = cfg.n_queries
    etas = gen.random(cfg.trials) * cfg.h
    kmax = int(math.floor(cfg.h * n))
    if kmax > 0:
        flip_u = gen.random((cfg.trials, kmax))
    else:
        flip_u = np.empty((cfg.trials, 0))
    means = []
    for p in cfg.p_values:
        d, _ = robust_base(cfg.r, n, p)
        pn = round_half_up(p * n)
        means.append(
            float(np.mean(kernels.query_trial_ratios(t, n, d, pn, etas, flip_u)))
        )
    return means, baseline_ratio(t, cfg.baseline_base)


def _point_call(args: tuple[ExperimentConfig, float]) -> tuple[list[float], float]:
    cfg, t = args
    fn = _time_point if cfg.setting == "time" else _query_point
    return fn(t, cfg)


def _run(cfg: ExperimentConfig) -> ExperimentResult:
    cfg.validate()
    ts = [float(t) for t in cfg.grid()]
    if cfg.jobs > 1:
        chunk = max(1, len(ts) // (cfg.jobs * 8))
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            points = list(
                pool.map(_point_call, [(cfg, t) for t in ts], chunksize=chunk)
            )
    else:
        points = [_point_call((cfg, t)) for t in ts]
    baseline = np.array([b for _, b in points])
    rows = []
    for pi, p in enumerate(cfg.p_values):
        series = np.array([means[pi] for means, _ in points])
        imp, strong = compare_to_baseline(series, baseline)
        rows.append(
            SummaryRow(
                p=p,
                mean_by_t=tuple(series.tolist()),
                overall_mean=float(series.mean()),
                improvement_pct=imp,
                strong_improvement_pct=strong,
            )
        )
    return ExperimentResult(
        config=cfg, grid=tuple(ts), baseline=tuple(baseline.tolist()), rows=rows
    )


def run_time_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Mean ratios of buffered schedules built from noisy time predictions.

    Per trial the schedule is constructed from the sampled prediction (with
    each configured buffer p) and evaluated at the true interruption.
    """
    if cfg.setting != "time":
        cfg = replace(cfg, setting="time")
    return _run(cfg)


def run_query_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Mean ratios of the buffered-decode family under corrupted answer bits.

    Per trial: encode the best member's index, flip a ``floor(eta*n)``-bit
    subset with eta uniform on [0, H], decode with buffer p, and evaluate the
    chosen member at the true interruption.
    """
    if cfg.setting != "query":
        cfg = replace(cfg, setting="query")
    return _run(cfg)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    return run_time_experiment(cfg) if cfg.setting == "time" else run_query_experiment(cfg)


def compare_to_baseline(
    series: np.ndarray, baseline: np.ndarray
) -> tuple[float, float]:
    """Percentages of grid points improving on the baseline.

    Improvement counts strictly smaller mean ratios; strong improvement
    counts ratios smaller by at least 20%.
    """
    series = np.asarray(series, dtype=float)
    baseline = np.asarray(baseline, dtype=float)
    if series.shape != baseline.shape:
        raise ValueError(
            f"misaligned grids: series has {series.shape}, baseline {baseline.shape}"
        )
    improvement = 100.0 * float(np.mean(series < baseline))
    strong = 100.0 * float(np.mean(series <= 0.8 * baseline))
    return improvement, strong


def _family_worst_ratio(sigmas: np.ndarray, base: float, prefix: np.ndarray) -> float:
    """Worst error-free ratio of a shared-base family under best-member choice.

    ``prefix[j]`` is the j-th geometric prefix sum; interruptions sweep just
    below every member's completions.
    """
    completions = np.outer(sigmas, prefix).ravel()
    ts = completions * (1.0 - 1e-9)
    tol = ts * 1e-12
    counts = np.empty((sigmas.shape[0], ts.shape[0]), dtype=np.int64)
    for i, s in enumerate(sigmas):
        counts[i] = np.searchsorted(prefix, (ts + tol) / s, side="right")
    lengths = np.where(counts >= 1, sigmas[:, None] * base**counts, 1.0)
    return float(np.max(ts / lengths.max(axis=0)))


def lower_bound_search(
    n: int,
    r: float = 4.0,
    resolution: int = 200,
    max_contracts: int = 30,
    family_cap: int = 250_000,
) -> float:
    """Search shared-base geometric families for the least achievable
    error-free consistency under best-member selection.

    Families are ``2**n`` schedules with a common base from ``[c_r, b_r]``
    and per-member scale offsets ``base**(k/resolution)`` (first member
    pinned to scale 1; global rescaling cannot change the worst ratio).
    A grid search, so the returned minimum is a corroboration of the
    achievable floor, not a proof.
    """
    if n < 0 or n > 2:
        raise ValueError("search supports n in {0, 1, 2}")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    params = cr_br(r)
    members = 2**n
    n_families = math.comb(resolution + members - 2, members - 1) if members > 1 else 1
    if n_families > family_cap:
        raise ResourceLimitError(
            f"{n_families} families exceed the cap {family_cap}; lower the resolution"
        )
    if params.b_r - params.c_r < 1e-12:
        bases = [params.b_r]
    else:
        bases = np.linspace(params.c_r, params.b_r, min(9, resolution)).tolist()
    offsets = [k / resolution for k in range(resolution)]
    best = math.inf
    for a in bases:
        prefix = np.cumsum(a ** np.arange(1, max_contracts + 1, dtype=float))
        if members == 1:
            combos = [()]
        else:
            combos = combinations_with_replacement(offsets, members - 1)
        for rest in combos:
            sigmas = np.array([1.0] + [a**o for o in rest])
            val = _family_worst_ratio(sigmas, a, prefix)
            if val < best:
                best = val
    return best


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def summary_path(path: Path | str) -> Path:
    path = Path(path)
    stem = path.stem if path.suffix else path.name
    return path.with_name(f"{stem}.summary.csv")


def _detail_noise_kind(cfg: ExperimentConfig) -> str:
    return cfg.noise_kind if cfg.setting == "time" else "bitflip"


def emit_results(
    result: ExperimentResult, fmt: str = "csv", path: Path | str = "results.csv"
) -> list[Path]:
    """Persist a run. ``csv`` writes the per-(p, T) detail plus a sibling
    summary file; ``plotdata`` writes one grid-aligned column per p value.
    Floats carry 17 significant digits so re-reading is exact."""
    path = Path(path)
    cfg = result.config
    written: list[Path] = []
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(
                    ["setting", "r", "p", "H", "noise_kind", "T",
                     "mean_ratio", "baseline_ratio"]
                )
                for row in result.rows:
                    for t, mean, base in zip(
                        result.grid, row.mean_by_t, result.baseline
                    ):
                        w.writerow(
                            [cfg.setting, _fmt(cfg.r), _fmt(row.p), _fmt(cfg.h),
                             _detail_noise_kind(cfg), _fmt(t), _fmt(mean), _fmt(base)]
                        )
            written.append(path)
            spath = summary_path(path)
            with open(spath, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(
                    ["setting", "p", "overall_mean", "improvement_pct",
                     "strong_improvement_pct"]
                )
                for row in result.rows:
                    w.writerow(
                        [cfg.setting, _fmt(row.p), _fmt(row.overall_mean),
                         _fmt(row.improvement_pct), _fmt(row.strong_improvement_pct)]
                    )
            written.append(spath)
        elif fmt == "plotdata":
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(
                    ["T", "baseline"] + [f"p={row.p:g}" for row in result.rows]
                )
                for i, t in enumerate(result.grid):
                    w.writerow(
                        [_fmt(t), _fmt(result.baseline[i])]
                        + [_fmt(row.mean_by_t[i]) for row in result.rows]
                    )
            written.append(path)
        else:
            raise ValueError(f"unknown format {fmt!r} (csv or plotdata)")
    except OSError as exc:
        raise OSError(f"while writing {path}: {exc}") from exc
    return written


def read_results(path: Path | str) -> dict:
    """Read a detail CSV back into arrays (exact round-trip of emit_results)."""
    path = Path(path)
    by_p: dict[float, list[float]] = {}
    grid: list[float] = []
    baseline: list[float] = []
    first_p: float | None = None
    try:
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                p = float(rec["p"])
                if first_p is None:
                    first_p = p
                if p == first_p:
                    grid.append(float(rec["T"]))
                    baseline.append(float(rec["baseline_ratio"]))
                by_p.setdefault(p, []).append(float(rec["mean_ratio"]))
    except OSError as exc:
        raise OSError(f"while reading {path}: {exc}") from exc
    return {
        "grid": np.array(grid),
        "baseline": np.array(baseline),
        "mean_by_p": {p: np.array(v) for p, v in by_p.items()},
    }
