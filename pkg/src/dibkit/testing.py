"""Hypothesis testing with borrowing estimators.

The statistic throughout is ``Z = sqrt(n) * (estimate - theta0)`` with a
one-sided upper rejection region.  Because every estimator has the form
``theta_hat + q(delta_hat)``, the exact finite-sample law of Z reduces to a
one-dimensional integral over the observed conflict: conditionally on
``delta_hat = t`` the remaining randomness of ``theta_hat`` is normal with
known moments, so

    P(Z <= z | theta, delta) =
        E_t[ Phi( sqrt(n+m) * (z/sqrt(n) - (theta-theta0) - q(t)
                               + m/(n+m) * (t - delta)) ) ]

with ``t ~ N(delta, 1/n + 1/m)``.  Quantiles invert this CDF numerically.
The heavy-tailed-prior estimator has no closed-form correction cheap enough
to use everywhere, so its per-conflict quantiles come from seeded Monte
Carlo instead.

Critical values depend on what is assumed about the conflict under the null:
exactly zero, bounded by a known value, or unrestricted.  In the unrestricted
convention the per-conflict quantiles of non-suppressing estimators grow
without bound and the critical value is reported as infinite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Union

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.optimize import brentq
from scipy.special import ndtr, ndtri
from scipy.stats import norm

from . import streams
from .estimators import (
    EstimatorConfig,
    StudentTPriorBayes,
    conflict_correction,
    correction_breakpoints,
    est_ammse_s,
    est_pooled,
    estimator_id,
)
from .summaries import TwoSampleSummary

__all__ = [
    "AllDelta",
    "DeltaZero",
    "DeltaBounded",
    "Convention",
    "TestSpec",
    "CriticalValue",
    "PowerCurve",
    "SweetSpot",
    "sampling_cdf",
    "null_quantile",
    "critical_value",
    "power",
    "power_curve",
    "sweet_spot",
    "p2_p3",
    "pvalue",
    "tipping_point",
    "alasso_local_power_decay",
    "MC_DRAWS_DEFAULT",
]

MC_DRAWS_DEFAULT = 50_000


@dataclass(frozen=True)
class AllDelta:
    """Control the error rate for every conflict value."""


@dataclass(frozen=True)
class DeltaZero:
    """Assume no conflict under the null."""


@dataclass(frozen=True)
class DeltaBounded:
    """Assume the conflict is at most ``delta0`` under the null."""

    delta0: float

    def __post_init__(self) -> None:
        if not self.delta0 > 0:
            raise ValueError("delta0 must be positive")


Convention = Union[AllDelta, DeltaZero, DeltaBounded]


@dataclass(frozen=True)
class TestSpec:
    theta0: float
    alpha: float
    convention: Convention
    estimator: EstimatorConfig
    n: int
    m: int

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")


@dataclass(frozen=True)
class CriticalValue:
    """Critical Z value; ``math.inf`` when no finite value controls the error rate.

    ``flagged`` marks a non-monotone quantile profile whose maximum sat on the
    grid boundary, i.e. the supremum may not have been bracketed.
    """

    value: float
    sup_at: float | None
    flagged: bool = False

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class PowerCurve:
    estimator: str
    convention: str
    theta: float
    delta: np.ndarray
    rejection_prob: np.ndarray
    critical: float
    meta: dict = field(default_factory=dict)


def convention_id(conv: Convention) -> str:
    if isinstance(conv, AllDelta):
        return "all-delta"
    if isinstance(conv, DeltaZero):
        return "delta-zero"
    return "delta-bounded"


# ---------------------------------------------------------------------------
# Exact sampling law via conditional-normal quadrature
# ---------------------------------------------------------------------------


def _conflict_panels(spec: TestSpec, delta: float, span: float = 9.5) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes/weights over the conflict-statistic range, split at kinks."""
    s = math.sqrt(1.0 / spec.n + 1.0 / spec.m)
    lo, hi = delta - span * s, delta + span * s
    edges = {lo, hi}
    for b in correction_breakpoints(spec.estimator, spec.n, spec.m):
        if lo < b < hi:
            edges.add(b)
    edges = sorted(edges)
    xg, wg = leggauss(12)
    xs, ws = [], []
    max_width = 0.5 * s
    for a, b in zip(edges[:-1], edges[1:]):
        pieces = max(1, math.ceil((b - a) / max_width))
        sub = np.linspace(a, b, pieces + 1)
        for aa, bb in zip(sub[:-1], sub[1:]):
            half = 0.5 * (bb - aa)
            xs.append(half * xg + 0.5 * (aa + bb))
            ws.append(half * wg)
    return np.concatenate(xs), np.concatenate(ws)


def sampling_cdf(
    spec: TestSpec, z: float | np.ndarray, theta: float, delta: float
) -> float | np.ndarray:
    """P(Z <= z) for ``Z = sqrt(n)(estimate - theta0)`` at the given truth."""
    n, m = spec.n, spec.m
    s = math.sqrt(1.0 / n + 1.0 / m)
    t, w = _conflict_panels(spec, delta)
    q = conflict_correction(spec.estimator, t, n, m, delta_true=delta)
    dens = np.exp(-((t - delta) ** 2) / (2.0 * s * s)) / (s * math.sqrt(2.0 * math.pi))
    shift = theta - spec.theta0
    root_nm = math.sqrt(n + m)
    zs = np.atleast_1d(np.asarray(z, dtype=float))
    inner = -shift - q + (m / (n + m)) * (t - delta)
    out = np.array(
        [float(np.sum(w * dens * ndtr(root_nm * (zz / math.sqrt(n) + inner)))) for zz in zs]
    )
    return out if np.ndim(z) else float(out[0])


def _mc_statistic_draws(
    spec: TestSpec, theta: float, delta: float, draws: int, seed: int, stream: int
) -> np.ndarray:
    z1 = streams.addressed_normals(seed, stream, 0, draws)
    z2 = streams.addressed_normals(seed, stream, draws, draws)
    theta_hat = theta + z1 / math.sqrt(spec.n)
    beta_hat = theta + delta + z2 / math.sqrt(spec.m)
    q = conflict_correction(spec.estimator, beta_hat - theta_hat, spec.n, spec.m, delta_true=delta)
    return math.sqrt(spec.n) * (theta_hat + q - spec.theta0)


def _needs_mc(config: EstimatorConfig) -> bool:
    return isinstance(config, StudentTPriorBayes)


def null_quantile(
    spec: TestSpec,
    delta: float,
    prob: float | None = None,
    *,
    mc_draws: int = MC_DRAWS_DEFAULT,
    seed: int = 0,
    stream: int = 0,
) -> float:
    """(1-alpha) quantile of Z under ``theta = theta0`` at the given conflict."""
    prob = 1.0 - spec.alpha if prob is None else prob
    if _needs_mc(spec.estimator):
        zs = _mc_statistic_draws(spec, spec.theta0, delta, mc_draws, seed, stream)
        return float(np.quantile(zs, prob))
    t, _ = _conflict_panels(spec, delta)
    q = conflict_correction(spec.estimator, t, spec.n, spec.m, delta_true=delta)
    qn = math.sqrt(spec.n)
    lo = qn * float(np.min(q)) - 9.0
    hi = qn * float(np.max(q)) + 9.0
    return float(brentq(lambda z: sampling_cdf(spec, z, spec.theta0, delta) - prob, lo, hi, xtol=1e-10))


def _default_grid(spec: TestSpec, points: int) -> np.ndarray:
    s = math.sqrt(1.0 / spec.n + 1.0 / spec.m)
    top = 10.0 * s
    for b in correction_breakpoints(spec.estimator, spec.n, spec.m):
        top = max(top, 4.0 * abs(b))
    return np.linspace(0.0, top, points)


def critical_value(
    spec: TestSpec,
    delta_grid: np.ndarray | None = None,
    *,
    points: int = 41,
    mc_draws: int = MC_DRAWS_DEFAULT,
    seed: int = 0,
) -> CriticalValue:
    """Critical Z under the spec's conflict convention (sup of per-conflict quantiles).

    Unbounded growth across the probe extensions of the grid reports an
    infinite critical value (non-suppressing estimators under the
    unrestricted convention).
    """
    conv = spec.convention
    if isinstance(conv, DeltaZero):
        return CriticalValue(null_quantile(spec, 0.0, mc_draws=mc_draws, seed=seed), sup_at=0.0)

    if delta_grid is None:
        if isinstance(conv, DeltaBounded):
            delta_grid = np.linspace(0.0, conv.delta0, points)
        else:
            delta_grid = _default_grid(spec, points)
    grid = np.asarray(delta_grid, dtype=float)
    quants = np.array(
        [
            null_quantile(spec, d, mc_draws=mc_draws, seed=seed, stream=i)
            for i, d in enumerate(grid)
        ]
    )
    k = int(np.argmax(quants))
    sup_val, sup_at = float(quants[k]), float(grid[k])

    flagged = False
    diffs = np.diff(quants)
    non_monotone = np.any(diffs > 1e-9) and np.any(diffs < -1e-9)
    if k in (0, grid.size - 1) and non_monotone:
        flagged = True

    if isinstance(conv, AllDelta):
        # probe beyond the grid: quantiles still rising -> no finite sup
        top = grid[-1] if grid[-1] > 0 else 1.0
        probe = [
            null_quantile(spec, 2.0 * top, mc_draws=mc_draws, seed=seed, stream=grid.size),
            null_quantile(spec, 4.0 * top, mc_draws=mc_draws, seed=seed, stream=grid.size + 1),
        ]
        tol = 1e-6 + 0.02 * (1.0 if _needs_mc(spec.estimator) else 0.0)
        if probe[0] > sup_val + tol and probe[1] > probe[0] + tol:
            return CriticalValue(math.inf, sup_at=None)
        sup_val = max(sup_val, *probe)
    return CriticalValue(sup_val, sup_at=sup_at, flagged=flagged)


def power(
    spec: TestSpec,
    critical: float | CriticalValue,
    theta: float,
    delta: float,
    *,
    mc_draws: int = MC_DRAWS_DEFAULT,
    seed: int = 0,
    stream: int = 0,
) -> float:
    """Rejection probability P(Z > critical) at the given truth."""
    crit = float(critical)
    if math.isinf(crit):
        return 0.0
    if _needs_mc(spec.estimator):
        zs = _mc_statistic_draws(spec, theta, delta, mc_draws, seed, stream)
        return float(np.mean(zs > crit))
    return 1.0 - float(sampling_cdf(spec, crit, theta, delta))


def power_curve(
    spec: TestSpec,
    theta: float,
    delta_grid: np.ndarray | None = None,
    *,
    points: int = 33,
    mc_draws: int = MC_DRAWS_DEFAULT,
    seed: int = 0,
) -> PowerCurve:
    """Rejection probability over a conflict grid at the spec's critical value."""
    if delta_grid is None:
        conv = spec.convention
        top = conv.delta0 if isinstance(conv, DeltaBounded) else None
        delta_grid = (
            np.linspace(0.0, top, points) if top is not None else _default_grid(spec, points)
        )
    grid = np.asarray(delta_grid, dtype=float)
    crit = critical_value(spec, mc_draws=mc_draws, seed=seed)
    probs = np.array(
        [
            power(spec, crit, theta, d, mc_draws=mc_draws, seed=seed, stream=5000 + i)
            for i, d in enumerate(grid)
        ]
    )
    return PowerCurve(
        estimator=estimator_id(spec.estimator),
        convention=convention_id(spec.convention),
        theta=theta,
        delta=grid,
        rejection_prob=probs,
        critical=crit.value,
        meta={"flagged": crit.flagged, "sup_at": crit.sup_at, "alpha": spec.alpha},
    )


@dataclass(frozen=True)
class SweetSpot:
    """Conflict range where the borrowing test beats the plain test's power."""

    interval: tuple[float, float] | None
    candidate: tuple[float, float]
    grid: np.ndarray
    gain: np.ndarray


def sweet_spot(
    spec: TestSpec,
    theta: float,
    *,
    points: int = 61,
    mc_draws: int = MC_DRAWS_DEFAULT,
    seed: int = 0,
) -> SweetSpot:
    """Locate conflicts below the bound where the borrowing test has higher power.

    The analytic candidate ``(delta0 - (theta - theta0), delta0)`` is reported
    alongside the numerically located region.
    """
    conv = spec.convention
    if not isinstance(conv, DeltaBounded):
        raise ValueError("sweet spot is defined for the bounded-conflict convention")
    crit = critical_value(spec, mc_draws=mc_draws, seed=seed)
    mle_power = 1.0 - float(ndtr(ndtri(1.0 - spec.alpha) - math.sqrt(spec.n) * (theta - spec.theta0)))
    grid = np.linspace(0.0, conv.delta0, points)
    gain = np.array(
        [
            power(spec, crit, theta, d, mc_draws=mc_draws, seed=seed, stream=1000 + i) - mle_power
            for i, d in enumerate(grid)
        ]
    )
    positive = gain > 0.0
    if not np.any(positive):
        interval = None
    else:
        idx = np.flatnonzero(positive)
        interval = (float(grid[idx[0]]), float(grid[idx[-1]]))
    candidate = (conv.delta0 - (theta - spec.theta0), conv.delta0)
    return SweetSpot(interval=interval, candidate=candidate, grid=grid, gain=gain)


# ---------------------------------------------------------------------------
# Conflict-plausibility diagnostics and the worked-example p-values
# ---------------------------------------------------------------------------


def p2_p3(s: TwoSampleSummary, delta0: float, theta_assumed: float) -> tuple[float, float]:
    """Plug-in probabilities that the conflict sits in the favorable ranges.

    ``p3`` is the chance the estimated conflict stays below ``delta0``;
    ``p2`` additionally requires it to exceed ``delta0 - (theta_hat -
    theta_assumed)``, the sweet-spot lower edge.  Sampling references are
    normal, centered at the observed values, with the exact joint covariance
    of the two statistics; ``p2 <= p3`` holds by construction.
    """
    if not delta0 > 0:
        raise ValueError("delta0 must be positive")
    n, m = s.n, s.m
    s_del = math.sqrt(1.0 / n + 1.0 / m)
    p3 = float(ndtr((delta0 - s.delta_hat) / s_del))

    # theta_hat* ~ N(obs, 1/n); delta_hat* | theta_hat* ~ N(obs - (theta_hat*-obs), 1/m)
    xg, wg = leggauss(96)
    th_star = s.theta_hat + 4.0 / math.sqrt(n) * xg
    wts = wg * norm.pdf(th_star, loc=s.theta_hat, scale=1.0 / math.sqrt(n)) * (4.0 / math.sqrt(n))
    mu_cond = s.delta_hat - (th_star - s.theta_hat)
    upper = ndtr((delta0 - mu_cond) * math.sqrt(m))
    lower = ndtr((delta0 - (th_star - theta_assumed) - mu_cond) * math.sqrt(m))
    p2 = float(np.sum(wts * np.maximum(0.0, upper - lower)))
    return min(p2, p3), p3


PValueOption = Literal["mle-alldelta", "pooled-deltazero", "dib-deltabounded"]


def pvalue(
    option: PValueOption,
    s: TwoSampleSummary,
    theta0: float,
    delta0: float | None = None,
    sens: float | None = None,
    mc_draws: int = MC_DRAWS_DEFAULT,
    seed: int = 0,
) -> float:
    """One-sided upper p-value under the three conflict conventions.

    All quantities live on the summary's scale; ``delta0`` is the assumed
    conflict bound on that same scale.  The bounded-conflict option evaluates
    the sensitivity-indexed borrowing statistic by seeded Monte Carlo at the
    worst null conflict ``delta = delta0``.
    """
    n, m = s.n, s.m
    if option == "mle-alldelta":
        z1 = math.sqrt(n) * (s.theta_hat - theta0)
        return 1.0 - float(ndtr(z1))
    if option == "pooled-deltazero":
        z2 = math.sqrt(n) * (est_pooled(s).theta_est - theta0)
        return 1.0 - float(ndtr(z2 / math.sqrt(n / (n + m))))
    if option == "dib-deltabounded":
        if delta0 is None or sens is None:
            raise ValueError("bounded-conflict option needs delta0 and sens")
        z_obs = math.sqrt(n) * (est_ammse_s(s, sens).theta_est - theta0)
        z1 = streams.addressed_normals(seed, 0, 0, mc_draws)
        z2 = streams.addressed_normals(seed, 0, mc_draws, mc_draws)
        theta_hat = theta0 + z1 / math.sqrt(n)
        beta_hat = theta0 + delta0 + z2 / math.sqrt(m)
        dh = beta_hat - theta_hat
        w = m / (n + m + m * n * dh * dh * sens)
        z_null = math.sqrt(n) * (theta_hat + w * dh - theta0)
        return float(np.mean(z_null > z_obs))
    raise ValueError(f"unknown p-value option {option!r}")


def tipping_point(
    s: TwoSampleSummary,
    theta0: float,
    sens: float,
    target_p: float,
    *,
    bracket: tuple[float, float] = (1e-3, 0.5),
    grid_points: int = 33,
    mc_draws: int = MC_DRAWS_DEFAULT,
    seed: int = 0,
) -> float:
    """Conflict bound at which the bounded-conflict p-value reaches ``target_p``.

    Common random numbers across the conflict grid plus isotonic smoothing
    tame the Monte Carlo noise before the crossing is interpolated.
    """
    if not 0.0 < target_p < 1.0:
        raise ValueError("target_p must lie in (0, 1)")
    grid = np.linspace(bracket[0], bracket[1], grid_points)
    ps = np.array(
        [pvalue("dib-deltabounded", s, theta0, d0, sens, mc_draws, seed) for d0 in grid]
    )
    ps = np.maximum.accumulate(ps)  # monotone envelope
    if target_p < ps[0] or target_p > ps[-1]:
        raise ValueError(
            f"no sign change on bracket: p ranges [{ps[0]:.4g}, {ps[-1]:.4g}], "
            f"target {target_p:.4g}"
        )
    return float(np.interp(target_p, ps, grid))


def alasso_local_power_decay(
    tau: float,
    h_theta: float,
    h: float,
    n_ladder: tuple[int, ...],
    *,
    alpha: float = 0.025,
    estimator: EstimatorConfig | None = None,
) -> list[dict[str, float]]:
    """Unrestricted-convention power along a sample-size ladder with m = 100 n.

    The local location ``h_theta / sqrt(n)`` shrinks while the critical value
    of an oracle-property estimator grows, so the detection power decays
    toward zero; the returned rows expose that sequence.
    """
    from .estimators import AdaptiveLasso

    config = AdaptiveLasso(tau=tau) if estimator is None else estimator
    rows: list[dict[str, float]] = []
    for n in n_ladder:
        m = 100 * n
        spec = TestSpec(theta0=0.0, alpha=alpha, convention=AllDelta(), estimator=config, n=n, m=m)
        crit = critical_value(spec)
        pw = power(spec, crit, theta=h_theta / math.sqrt(n), delta=h / math.sqrt(n))
        rows.append(
            {
                "n": float(n),
                "critical": float(crit),
                "power": pw,
                "estimator": estimator_id(config),
            }
        )
    return rows
