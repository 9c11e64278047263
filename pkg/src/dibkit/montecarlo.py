"""Finite-sample simulation, distribution summaries, and the bootstrap.

Replicates are addressed, not streamed: replicate ``r`` of a plan always
consumes the same counter positions of the plan's seed, so a run partitioned
over any number of workers reproduces the single-worker output bit for bit.
All estimators in a plan are evaluated on the same simulated mean pairs,
making per-replicate comparisons across estimators meaningful.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import numpy as np
from scipy.special import ndtri
from scipy.stats import gaussian_kde

from . import streams
from .estimators import EstimatorConfig, conflict_correction, estimator_id
from .summaries import BinomialRaw

__all__ = [
    "SimPlan",
    "EmpiricalDist",
    "BootstrapInterval",
    "simulate",
    "ks_distance",
    "bootstrap_ci",
]

_BOOT_BLOCK = 1 << 16  # fixed bootstrap block size; independent of worker count


@dataclass(frozen=True)
class SimPlan:
    """Fully deterministic simulation recipe: results depend only on these fields."""

    n: int
    m: int
    theta: float
    delta: float
    replicates: int
    seed: int
    estimators: tuple[EstimatorConfig, ...]

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.n < 1 or self.m < 1:
            raise ValueError("sample sizes must be >= 1")


_QUANTILE_PROBS = (0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99)


@dataclass(frozen=True)
class EmpiricalDist:
    """Sorted draws of the scaled estimation error plus standard summaries."""

    draws: np.ndarray
    mean: float
    variance: float
    quantiles: dict[float, float]
    n_failed: int = 0
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_draws(cls, values: np.ndarray, n_failed: int = 0) -> "EmpiricalDist":
        srt = np.sort(np.asarray(values, dtype=float))
        qs = {p: float(np.quantile(srt, p)) for p in _QUANTILE_PROBS}
        return cls(
            draws=srt,
            mean=float(np.mean(srt)),
            variance=float(np.var(srt, ddof=1)) if srt.size > 1 else 0.0,
            quantiles=qs,
            n_failed=n_failed,
        )

    def log_density(self, grid: np.ndarray | None = None, points: int = 256):
        """Gaussian-kernel log density (Silverman bandwidth) on a fixed grid."""
        if grid is None:
            lo, hi = self.draws[0], self.draws[-1]
            pad = 0.05 * (hi - lo + 1e-12)
            grid = np.linspace(lo - pad, hi + pad, points)
        kde = gaussian_kde(self.draws, bw_method="silverman")
        with np.errstate(divide="ignore"):
            return grid, np.log(kde(grid))


def _simulate_block(plan: SimPlan, start: int, count: int) -> dict[str, np.ndarray]:
    u = streams.addressed_uniforms(plan.seed, 0, 2 * start, 2 * count).reshape(count, 2)
    theta_hat = plan.theta + ndtri(u[:, 0]) / math.sqrt(plan.n)
    beta_hat = plan.theta + plan.delta + ndtri(u[:, 1]) / math.sqrt(plan.m)
    delta_hat = beta_hat - theta_hat
    root_n = math.sqrt(plan.n)
    out: dict[str, np.ndarray] = {}
    for cfg in plan.estimators:
        q = conflict_correction(cfg, delta_hat, plan.n, plan.m, delta_true=plan.delta)
        out[estimator_id(cfg)] = root_n * (theta_hat + q - plan.theta)
    return out


def simulate(plan: SimPlan, workers: int = 1) -> dict[str, EmpiricalDist]:
    """Run the plan and summarize scaled errors per estimator.

    Identical output for any ``workers`` value: blocks draw at fixed counter
    offsets and are merged in index order.  Replicates where an estimator
    produces a non-finite value are dropped from that estimator's summary and
    counted in ``n_failed``.
    """
    blocks = streams.partition_blocks(plan.replicates, workers)
    if workers == 1 or len(blocks) == 1:
        results = [_simulate_block(plan, s, c) for s, c in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _simulate_block(plan, *b), blocks))
    merged: dict[str, EmpiricalDist] = {}
    for cfg in plan.estimators:
        key = estimator_id(cfg)
        vals = np.concatenate([r[key] for r in results])
        finite = np.isfinite(vals)
        merged[key] = EmpiricalDist.from_draws(vals[finite], n_failed=int((~finite).sum()))
    return merged


def ks_distance(a: EmpiricalDist | np.ndarray, b: EmpiricalDist | np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic (max ECDF gap)."""
    xa = a.draws if isinstance(a, EmpiricalDist) else np.sort(np.asarray(a, dtype=float))
    xb = b.draws if isinstance(b, EmpiricalDist) else np.sort(np.asarray(b, dtype=float))
    if xa.size == 0 or xb.size == 0:
        raise ValueError("both samples must be nonempty")
    pooled = np.concatenate([xa, xb])
    cdf_a = np.searchsorted(xa, pooled, side="right") / xa.size
    cdf_b = np.searchsorted(xb, pooled, side="right") / xb.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


@dataclass(frozen=True)
class BootstrapInterval:
    lo: float
    hi: float
    resamples: int
    redraws: int

    def __iter__(self):
        return iter((self.lo, self.hi))


def _bootstrap_block(
    current: BinomialRaw,
    external: BinomialRaw,
    sens: float,
    seed: int,
    block_index: int,
    count: int,
    scheme: str,
) -> tuple[np.ndarray, int]:
    gen = streams.stream_generator(seed, stream=1 + block_index)
    n, m = current.trials, external.trials
    p_cur, p_ext = current.rate, external.rate
    if scheme == "nonparametric":
        k = gen.binomial(n, p_cur, size=count)
        j = gen.binomial(m, p_ext, size=count)
    elif scheme == "gaussian":
        k = np.rint(gen.normal(n * p_cur, math.sqrt(n * p_cur * (1 - p_cur)), size=count))
        j = np.rint(gen.normal(m * p_ext, math.sqrt(m * p_ext * (1 - p_ext)), size=count))
        k = np.clip(k, 0, n)
        j = np.clip(j, 0, m)
    else:
        raise ValueError(f"unknown bootstrap scheme {scheme!r}")

    redraws = 0
    bad = (k <= 0) | (k >= n) | (j <= 0) | (j >= m)
    while np.any(bad):
        idx = np.flatnonzero(bad)
        redraws += idx.size
        k[idx] = gen.binomial(n, p_cur, size=idx.size)
        j[idx] = gen.binomial(m, p_ext, size=idx.size)
        bad = (k <= 0) | (k >= n) | (j <= 0) | (j >= m)

    r_cur = k / n
    r_ext = j / m
    sd_cur = np.sqrt(r_cur * (1.0 - r_cur))
    sd_ext = np.sqrt(r_ext * (1.0 - r_ext))
    th_st = r_cur / sd_cur
    dh_st = r_ext / sd_ext - th_st
    weight = m / (n + m + m * n * dh_st * dh_st * sens)
    est_raw = (th_st + weight * dh_st) * sd_cur  # back to the rate scale
    return est_raw, redraws


def bootstrap_ci(
    current: BinomialRaw,
    external: BinomialRaw,
    sens: float,
    resamples: int,
    level: float,
    seed: int,
    *,
    scheme: str = "nonparametric",
    workers: int = 1,
) -> BootstrapInterval:
    """Percentile bootstrap interval for the sensitivity-indexed borrowing estimate.

    Each resample redraws both binomial counts, re-standardizes, recomputes
    the estimate, and maps it back to the rate scale.  Degenerate resamples
    (all successes or none) are redrawn within their block and counted.
    The ``gaussian`` scheme replaces the binomial draws by their normal
    approximation as a sensitivity variant.
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    if resamples < 1:
        raise ValueError("resamples must be >= 1")
    n_blocks = (resamples + _BOOT_BLOCK - 1) // _BOOT_BLOCK
    sizes = [min(_BOOT_BLOCK, resamples - i * _BOOT_BLOCK) for i in range(n_blocks)]
    args = [(current, external, sens, seed, i, sizes[i], scheme) for i in range(n_blocks)]
    if workers == 1 or n_blocks == 1:
        parts = [_bootstrap_block(*a) for a in args]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda a: _bootstrap_block(*a), args))
    draws = np.concatenate([p[0] for p in parts])
    redraws = sum(p[1] for p in parts)
    alpha = 1.0 - level
    lo, hi = np.quantile(draws, [alpha / 2.0, 1.0 - alpha / 2.0])
    return BootstrapInterval(float(lo), float(hi), resamples, redraws)
