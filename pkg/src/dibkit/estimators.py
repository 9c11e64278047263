"""Point estimators that blend current and external sample means.

Every estimator here can be written as ``theta_hat + q(delta_hat)`` where
``delta_hat = beta_hat - theta_hat`` is the observed conflict and ``q`` is an
estimator-specific correction.  The vectorized corrections
(:func:`conflict_correction`) are the workhorse shared by the risk, testing
and Monte Carlo modules; the public ``est_*`` functions wrap them for single
summaries and report the realized mixing weight where one exists.

Families
--------
- plain MLE and full pooling,
- test-then-pool (pool unless the conflict z-statistic is significant),
- mean-squared-error minimizers: the oracle weight, its plug-in version,
  and the sensitivity-indexed generalization,
- penalized likelihood with an adaptive lasso penalty on the conflict,
- power priors with fixed, Hellinger-distance and empirical-Bayes weights,
- full Bayes with normal or heavy-tailed (Student t) priors on the conflict,
- the limited-translation compromise rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .summaries import TwoSampleSummary

__all__ = [
    "Mle",
    "Pooled",
    "TestThenPool",
    "OracleMmse",
    "AdaptiveMmse",
    "SensitivityMmse",
    "GeneralizedBorrow",
    "AdaptiveLasso",
    "FixedPowerPrior",
    "HellingerPowerPrior",
    "EmpiricalBayesPowerPrior",
    "NormalPriorBayes",
    "StudentTPriorBayes",
    "LimitedTranslation",
    "EstimatorConfig",
    "EstimateResult",
    "estimate",
    "estimator_id",
    "config_from_id",
    "conflict_correction",
    "correction_breakpoints",
    "est_mle",
    "est_pooled",
    "est_ttpool",
    "est_ommse",
    "est_ammse",
    "est_ammse_s",
    "est_gdib",
    "est_alasso",
    "power_prior_mean",
    "gamma_hd",
    "gamma_eb",
    "est_hdpp",
    "est_ebpp",
    "est_np",
    "est_lstp",
    "est_ltr",
    "lstp_delta_mode",
    "lstp_delta_mode_scan",
    "lstp_profile_objective",
    "alasso_delta",
]


# ---------------------------------------------------------------------------
# Configurations (tagged choice of estimator + tuning parameters)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mle:
    """Current-data mean only; never borrows."""


@dataclass(frozen=True)
class Pooled:
    """Precision-weighted combination of both means; optimal at zero conflict."""


@dataclass(frozen=True)
class TestThenPool:
    """Pool unless the squared conflict z-statistic reaches ``c`` (default 3.84)."""

    c: float = 3.84

    def __post_init__(self) -> None:
        if not self.c > 0:
            raise ValueError("test-then-pool threshold c must be positive")


@dataclass(frozen=True)
class OracleMmse:
    """MSE-optimal mixing weight computed at a known conflict value.

    ``delta_true=None`` means "track the true conflict of the evaluation
    scenario"; the risk module substitutes the scenario's conflict, which is
    how the oracle lower bound on risk curves is produced.  The scalar
    estimator :func:`est_ommse` always requires an explicit value.
    """

    delta_true: float | None = None


@dataclass(frozen=True)
class AdaptiveMmse:
    """Oracle MMSE weight with the observed conflict plugged in."""


@dataclass(frozen=True)
class SensitivityMmse:
    """Adaptive MMSE family indexed by a sensitivity-to-conflict ``sens >= 0``.

    ``sens=0`` always pools, ``sens=1`` recovers the plain adaptive MMSE and
    larger values suppress external data more aggressively.
    """

    sens: float

    def __post_init__(self) -> None:
        if not self.sens >= 0:
            raise ValueError("sensitivity must be non-negative")


@dataclass(frozen=True)
class GeneralizedBorrow:
    """User-supplied mixing function ``g`` applied to ``n * delta_hat^2 * sens``.

    ``g`` must map non-negative reals into [0, 1].
    """

    g: Callable[[np.ndarray], np.ndarray]
    sens: float

    def __post_init__(self) -> None:
        if not self.sens >= 0:
            raise ValueError("sensitivity must be non-negative")


@dataclass(frozen=True)
class AdaptiveLasso:
    """Penalized likelihood with an adaptive L1 penalty on the conflict."""

    tau: float = 0.25

    def __post_init__(self) -> None:
        if not 0 < self.tau < 0.5:
            raise ValueError("tau must lie in (0, 0.5)")


@dataclass(frozen=True)
class FixedPowerPrior:
    """External likelihood raised to a fixed power ``gamma`` in (0, 1]."""

    gamma: float

    def __post_init__(self) -> None:
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")


@dataclass(frozen=True)
class HellingerPowerPrior:
    """Power prior with gamma estimated from the Hellinger distance."""


@dataclass(frozen=True)
class EmpiricalBayesPowerPrior:
    """Power prior with gamma estimated by marginal-likelihood maximization."""


@dataclass(frozen=True)
class NormalPriorBayes:
    """Posterior mode under a N(0, 1/n) prior on the conflict."""


@dataclass(frozen=True)
class StudentTPriorBayes:
    """Posterior mode under a location-scale t prior (scale 1/sqrt(n)) on the conflict."""

    v: int = 3

    def __post_init__(self) -> None:
        if self.v < 3:
            raise ValueError("degrees of freedom v must be >= 3")


@dataclass(frozen=True)
class LimitedTranslation:
    """Normal-prior Bayes rule with the translation capped at the testing boundary."""


EstimatorConfig = Union[
    Mle,
    Pooled,
    TestThenPool,
    OracleMmse,
    AdaptiveMmse,
    SensitivityMmse,
    GeneralizedBorrow,
    AdaptiveLasso,
    FixedPowerPrior,
    HellingerPowerPrior,
    EmpiricalBayesPowerPrior,
    NormalPriorBayes,
    StudentTPriorBayes,
    LimitedTranslation,
]


_ID_TO_KIND: dict[str, type] = {
    "mle": Mle,
    "pooled": Pooled,
    "ttpool": TestThenPool,
    "ommse": OracleMmse,
    "ammse": AdaptiveMmse,
    "ammse-s": SensitivityMmse,
    "gdib": GeneralizedBorrow,
    "alasso": AdaptiveLasso,
    "power-prior": FixedPowerPrior,
    "hdpp": HellingerPowerPrior,
    "ebpp": EmpiricalBayesPowerPrior,
    "np": NormalPriorBayes,
    "lstp": StudentTPriorBayes,
    "ltr": LimitedTranslation,
}
_KIND_TO_ID = {v: k for k, v in _ID_TO_KIND.items()}


def estimator_id(config: EstimatorConfig) -> str:
    """Short stable identifier used in CSV output and CLI flags."""
    return _KIND_TO_ID[type(config)]


def config_from_id(
    name: str,
    *,
    c: float = 3.84,
    tau: float = 0.25,
    sens: float = 1.0,
    gamma: float = 1.0,
    v: int = 3,
    delta_true: float | None = None,
) -> EstimatorConfig:
    """Build a configuration from its CLI identifier and tuning flags."""
    kind = _ID_TO_KIND.get(name)
    if kind is None:
        raise ValueError(f"unknown estimator id {name!r}; known: {sorted(_ID_TO_KIND)}")
    if kind is TestThenPool:
        return TestThenPool(c=c)
    if kind is OracleMmse:
        return OracleMmse(delta_true=delta_true)
    if kind is SensitivityMmse:
        return SensitivityMmse(sens=sens)
    if kind is GeneralizedBorrow:
        raise ValueError("gdib needs a mixing function and cannot be built from the CLI")
    if kind is AdaptiveLasso:
        return AdaptiveLasso(tau=tau)
    if kind is FixedPowerPrior:
        return FixedPowerPrior(gamma=gamma)
    if kind is StudentTPriorBayes:
        return StudentTPriorBayes(v=v)
    return kind()


# ---------------------------------------------------------------------------
# Result type
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EstimateResult:
    """Point estimate plus whatever auxiliary quantities the method produces.

    ``weight`` is the realized mixing proportion on the observed conflict for
    weight-form estimators (``theta_est = theta_hat + weight * delta_hat``);
    it is ``None`` for the penalized/Bayes-mode methods whose correction is
    not a plain multiple of the conflict.
    """

    theta_est: float
    delta_est: float | None = None
    gamma_est: float | None = None
    weight: float | None = None


# ---------------------------------------------------------------------------
# Vectorized correction kernels: T = theta_hat + q(delta_hat)
# ---------------------------------------------------------------------------


def _pooled_weight(n: int, m: int) -> float:
    return m / (n + m)


def alasso_delta(delta_hat: np.ndarray, n: int, m: int, tau: float) -> np.ndarray:
    """Soft-thresholded conflict estimate from the adaptive-lasso objective.

    Profiling the location parameter out of the penalized likelihood leaves

        (n*m/(n+m)) * (delta - delta_hat)^2 + (n+m)^tau * |delta| / |delta_hat|

    whose minimizer is a soft threshold at ``(n+m)^(1+tau) / (2 n m |delta_hat|)``.
    A zero observed conflict makes the adaptive penalty infinite, so the
    estimate is defined as exactly zero there.
    """
    d = np.asarray(delta_hat, dtype=float)
    ad = np.abs(d)
    with np.errstate(divide="ignore"):
        shrink = (n + m) ** (1.0 + tau) / (2.0 * n * m * ad)
    out = np.sign(d) * np.maximum(0.0, ad - shrink)
    return np.where(ad == 0.0, 0.0, out)


def lstp_profile_objective(
    d: np.ndarray, delta_hat: np.ndarray, n: int, m: int, v: int
) -> np.ndarray:
    """Profiled negative log posterior of the conflict under the t prior.

    ``f(d) = ((v+1)/2) log(v + n d^2) + (n m / (2 (n+m))) (delta_hat - d)^2``
    after maximizing the posterior over the location in closed form.
    """
    a = n * m / (2.0 * (n + m))
    return 0.5 * (v + 1) * np.log(v + n * d * d) + a * (delta_hat - d) ** 2


def lstp_delta_mode_scan(
    delta_hat: np.ndarray,
    n: int,
    m: int,
    v: int = 3,
    *,
    coarse: int = 1000,
    chunk: int = 262_144,
) -> np.ndarray:
    """Conflict value at the joint posterior mode, by bracketed global search.

    Minimizes :func:`lstp_profile_objective` over the bracket
    ``[min(0, delta_hat), max(0, delta_hat)]`` padded by five conflict SDs.
    The objective can be bimodal at moderate conflict, so a coarse global
    scan precedes bisection of f' on the winning cell; the refinement drives
    the bracket below 1e-10.
    """
    d = np.asarray(delta_hat, dtype=float)
    flat = d.ravel()
    out = np.empty_like(flat)
    pad = 5.0 * math.sqrt(1.0 / n + 1.0 / m)
    a = n * m / (2.0 * (n + m))

    def fprime(x: np.ndarray, dh: np.ndarray) -> np.ndarray:
        return (v + 1.0) * n * x / (v + n * x * x) - 2.0 * a * (dh - x)

    t = np.linspace(0.0, 1.0, coarse)
    for start in range(0, flat.size, chunk):
        dh = flat[start : start + chunk]
        lo = np.minimum(0.0, dh) - pad
        hi = np.maximum(0.0, dh) + pad
        grid = lo[:, None] + (hi - lo)[:, None] * t[None, :]
        f = lstp_profile_objective(grid, dh[:, None], n, m, v)
        k = np.clip(np.argmin(f, axis=1), 1, coarse - 2)
        left = np.take_along_axis(grid, (k - 1)[:, None], axis=1).ravel()
        right = np.take_along_axis(grid, (k + 1)[:, None], axis=1).ravel()
        # 64 bisection steps shrink the cell by 2^-64, far below 1e-10
        for _ in range(64):
            mid = 0.5 * (left + right)
            neg = fprime(mid, dh) < 0.0
            left = np.where(neg, mid, left)
            right = np.where(neg, right, mid)
        out[start : start + chunk] = 0.5 * (left + right)
    return out.reshape(d.shape)


def lstp_delta_mode(delta_hat: np.ndarray, n: int, m: int, v: int = 3) -> np.ndarray:
    """Conflict value at the joint posterior mode, by exact stationary points.

    Setting the derivative of :func:`lstp_profile_objective` to zero and
    clearing the rational term gives a cubic in the conflict:

        2 a n d^3 - 2 a n delta_hat d^2 + (2 a v + (v+1) n) d - 2 a v delta_hat = 0

    with ``a = n m / (2 (n+m))``.  Its real roots are the stationary points;
    the global mode is the root with the smallest objective (the objective is
    coercive, so the minimum is never at a bracket edge).  Agrees with the
    scan-and-refine search to floating-point accuracy and is used by the
    vectorized risk/simulation paths where millions of solves are needed.
    """
    d = np.asarray(delta_hat, dtype=float)
    dh = d.ravel()
    a = n * m / (2.0 * (n + m))
    # normalized cubic x^3 + B x^2 + C x + D
    B = -dh
    C = np.full_like(dh, (2.0 * a * v + (v + 1.0) * n) / (2.0 * a * n))
    D = -v * dh / n
    # depressed form t^3 + p t + q with x = t - B/3
    p = C - B * B / 3.0
    q = 2.0 * B**3 / 27.0 - B * C / 3.0 + D
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3

    roots = np.empty((dh.size, 3))

    one = disc > 0.0
    if np.any(one):
        s = np.sqrt(disc[one])
        t_single = np.cbrt(-q[one] / 2.0 + s) + np.cbrt(-q[one] / 2.0 - s)
        roots[one, 0] = t_single - B[one] / 3.0
    three = ~one
    if np.any(three):
        pp = p[three]
        qq = q[three]
        r = np.sqrt(np.maximum(-pp / 3.0, 0.0))
        # clip guards round-off at the double-root boundary (disc ~ 0)
        cos_arg = np.clip(3.0 * qq / (2.0 * pp) * np.sqrt(np.where(pp < 0, -3.0 / pp, 0.0)), -1.0, 1.0)
        theta = np.arccos(cos_arg)
        for k in range(3):
            roots[three, k] = 2.0 * r * np.cos(theta / 3.0 - 2.0 * math.pi * k / 3.0) - B[three] / 3.0

    out = roots[:, 0].copy()
    if np.any(three):
        idx = np.flatnonzero(three)
        cand = roots[idx]
        f = lstp_profile_objective(cand, dh[idx, None], n, m, v)
        out[idx] = np.take_along_axis(cand, np.argmin(f, axis=1)[:, None], axis=1).ravel()
    return out.reshape(d.shape)


def _gamma_hd(delta_hat: np.ndarray, n: int) -> np.ndarray:
    return (1.0 - np.sqrt(1.0 - np.exp(-n * delta_hat * delta_hat / 8.0))) ** 2


def _gamma_eb(delta_hat: np.ndarray, n: int, m: int) -> np.ndarray:
    d2 = delta_hat * delta_hat
    return (1.0 / m) / (np.maximum(d2, 1.0 / n + 1.0 / m) - 1.0 / n)


def _power_prior_weight(gamma: np.ndarray, n: int, m: int) -> np.ndarray:
    # m/(m + n/gamma), written to stay finite as gamma -> 0
    return m * gamma / (m * gamma + n)


def _ltr_constants(n: int, m: int) -> tuple[float, float]:
    big_m = math.sqrt(1.0 / n + 1.0 / m)
    big_c = big_m * (2.0 * m + n) / (m + n)
    return big_m, big_c


def conflict_correction(
    config: EstimatorConfig,
    delta_hat: np.ndarray,
    n: int,
    m: int,
    *,
    delta_true: float | None = None,
) -> np.ndarray:
    """Correction ``q`` with ``theta_est = theta_hat + q(delta_hat)``, vectorized.

    ``delta_true`` feeds the oracle MMSE weight when the configuration left it
    unspecified (risk evaluation at a known scenario conflict).
    """
    d = np.asarray(delta_hat, dtype=float)
    w_pool = _pooled_weight(n, m)

    if isinstance(config, Mle):
        return np.zeros_like(d)
    if isinstance(config, Pooled):
        return w_pool * d
    if isinstance(config, TestThenPool):
        xi2 = d * d / (1.0 / n + 1.0 / m)
        return np.where(xi2 >= config.c, 0.0, w_pool * d)
    if isinstance(config, OracleMmse):
        dt = config.delta_true if config.delta_true is not None else delta_true
        if dt is None:
            raise ValueError("oracle MMSE needs a conflict value (delta_true)")
        return m / (n + m + n * m * dt * dt) * d
    if isinstance(config, AdaptiveMmse):
        return m / (n + m + n * m * d * d) * d
    if isinstance(config, SensitivityMmse):
        return m / (n + m + m * n * d * d * config.sens) * d
    if isinstance(config, GeneralizedBorrow):
        gval = np.asarray(config.g(n * d * d * config.sens), dtype=float)
        if np.any(gval < 0.0) or np.any(gval > 1.0):
            raise ValueError("invalid mixing function: g must map into [0, 1]")
        return gval * d
    if isinstance(config, AdaptiveLasso):
        return w_pool * (d - alasso_delta(d, n, m, config.tau))
    if isinstance(config, FixedPowerPrior):
        return _power_prior_weight(np.asarray(config.gamma), n, m) * d
    if isinstance(config, HellingerPowerPrior):
        return _power_prior_weight(_gamma_hd(d, n), n, m) * d
    if isinstance(config, EmpiricalBayesPowerPrior):
        return _power_prior_weight(_gamma_eb(d, n, m), n, m) * d
    if isinstance(config, NormalPriorBayes):
        return m / (2.0 * m + n) * d
    if isinstance(config, StudentTPriorBayes):
        return w_pool * (d - lstp_delta_mode(d, n, m, config.v))
    if isinstance(config, LimitedTranslation):
        big_m, big_c = _ltr_constants(n, m)
        cap = big_m * m / (m + n)
        inner = m / (2.0 * m + n) * d
        # outer-branch signs continue the inner rule at |delta_hat| = C; the
        # translation is capped at the value it attains on that boundary
        return np.where(d > big_c, cap, np.where(d < -big_c, -cap, inner))
    raise TypeError(f"unknown estimator configuration: {config!r}")


def correction_breakpoints(config: EstimatorConfig, n: int, m: int) -> tuple[float, ...]:
    """Conflict values where the correction is non-smooth (for quadrature splits)."""
    if isinstance(config, TestThenPool):
        b = math.sqrt(config.c * (1.0 / n + 1.0 / m))
        return (-b, b)
    if isinstance(config, LimitedTranslation):
        _, big_c = _ltr_constants(n, m)
        return (-big_c, big_c)
    if isinstance(config, AdaptiveLasso):
        b = math.sqrt((n + m) ** (1.0 + config.tau) / (2.0 * n * m))
        return (-b, b)
    return ()


# ---------------------------------------------------------------------------
# Scalar API
# ---------------------------------------------------------------------------


def _weight_result(s: TwoSampleSummary, weight: float, gamma: float | None = None,
                   delta_est: float | None = None) -> EstimateResult:
    return EstimateResult(
        theta_est=s.theta_hat + weight * s.delta_hat,
        delta_est=delta_est,
        gamma_est=gamma,
        weight=weight,
    )


def est_mle(s: TwoSampleSummary) -> EstimateResult:
    """Current-data mean; ignores the external sample entirely."""
    return _weight_result(s, 0.0)


def est_pooled(s: TwoSampleSummary) -> EstimateResult:
    """Both samples pooled with precision weights."""
    return _weight_result(s, _pooled_weight(s.n, s.m))


def est_ttpool(s: TwoSampleSummary, c: float = 3.84) -> EstimateResult:
    """Pool unless the conflict test rejects; ties resolve to rejection."""
    if not c > 0:
        raise ValueError("threshold c must be positive")
    xi2 = s.delta_hat**2 / (1.0 / s.n + 1.0 / s.m)
    if xi2 >= c:
        return _weight_result(s, 0.0)
    return _weight_result(s, _pooled_weight(s.n, s.m))


def est_ommse(s: TwoSampleSummary, delta_true: float) -> EstimateResult:
    """MSE-optimal mixing weight at a known conflict (not usable in practice)."""
    if not math.isfinite(delta_true):
        raise ValueError("delta_true must be finite")
    w = s.m / (s.n + s.m + s.n * s.m * delta_true**2)
    return _weight_result(s, w)


def est_ammse(s: TwoSampleSummary) -> EstimateResult:
    """Oracle weight with the observed conflict plugged in."""
    w = s.m / (s.n + s.m + s.n * s.m * s.delta_hat**2)
    return _weight_result(s, w)


def est_ammse_s(s: TwoSampleSummary, sens: float) -> EstimateResult:
    """Sensitivity-indexed adaptive MMSE; sens=0 pools, sens=1 is plain adaptive."""
    if not sens >= 0:
        raise ValueError("sensitivity must be non-negative")
    w = s.m / (s.n + s.m + s.m * s.n * s.delta_hat**2 * sens)
    return _weight_result(s, w)


def est_gdib(
    s: TwoSampleSummary, g: Callable[[np.ndarray], np.ndarray], sens: float
) -> EstimateResult:
    """Generalized borrowing with a user-supplied mixing function."""
    q = conflict_correction(GeneralizedBorrow(g=g, sens=sens), np.asarray(s.delta_hat), s.n, s.m)
    w = float(np.asarray(g(np.asarray(s.n * s.delta_hat**2 * sens)), dtype=float))
    return EstimateResult(theta_est=s.theta_hat + float(q), weight=w)


def est_alasso(s: TwoSampleSummary, tau: float = 0.25) -> EstimateResult:
    """Adaptive-lasso estimate: soft-threshold the conflict, then re-pool."""
    if not 0 < tau < 0.5:
        raise ValueError("tau must lie in (0, 0.5)")
    d_star = float(alasso_delta(np.asarray(s.delta_hat), s.n, s.m, tau))
    theta = (s.n * s.theta_hat + s.m * (s.beta_hat - d_star)) / (s.n + s.m)
    return EstimateResult(theta_est=theta, delta_est=d_star)


def power_prior_mean(s: TwoSampleSummary, gamma: float) -> EstimateResult:
    """Posterior mean when the external likelihood is tempered by ``gamma``."""
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    w = float(_power_prior_weight(np.asarray(gamma), s.n, s.m))
    return _weight_result(s, w, gamma=gamma)


def gamma_hd(s: TwoSampleSummary) -> float:
    """Hellinger-distance power-prior weight (normal-likelihood closed form)."""
    return float(_gamma_hd(np.asarray(s.delta_hat), s.n))


def gamma_eb(s: TwoSampleSummary) -> float:
    """Empirical-Bayes power-prior weight; clamps to 1 for small conflicts."""
    return float(_gamma_eb(np.asarray(s.delta_hat), s.n, s.m))


def est_hdpp(s: TwoSampleSummary) -> EstimateResult:
    g = gamma_hd(s)
    w = float(_power_prior_weight(np.asarray(g), s.n, s.m))
    return _weight_result(s, w, gamma=g)


def est_ebpp(s: TwoSampleSummary) -> EstimateResult:
    g = gamma_eb(s)
    w = float(_power_prior_weight(np.asarray(g), s.n, s.m))
    return _weight_result(s, w, gamma=g)


def est_np(s: TwoSampleSummary) -> EstimateResult:
    """Posterior mode under a N(0, 1/n) conflict prior and flat location prior."""
    w = s.m / (2.0 * s.m + s.n)
    return _weight_result(s, w, delta_est=w * s.delta_hat)


def est_lstp(s: TwoSampleSummary, v: int = 3) -> EstimateResult:
    """Posterior mode under the location-scale t conflict prior.

    The location parameter is profiled out in closed form, leaving a
    one-dimensional global search over the conflict
    (:func:`lstp_delta_mode_scan`: coarse bracketed scan plus refinement).
    """
    if v < 3:
        raise ValueError("degrees of freedom v must be >= 3")
    d_star = float(lstp_delta_mode_scan(np.asarray(s.delta_hat), s.n, s.m, v))
    theta = (s.n * s.theta_hat + s.m * (s.beta_hat - d_star)) / (s.n + s.m)
    return EstimateResult(theta_est=theta, delta_est=d_star)


def est_ltr(s: TwoSampleSummary) -> EstimateResult:
    """Limited-translation rule: the normal-prior Bayes estimate with a capped move."""
    big_m, big_c = _ltr_constants(s.n, s.m)
    d = s.delta_hat
    w_np = s.m / (2.0 * s.m + s.n)
    if d > big_c:
        delta_est = d - big_m
        theta = s.theta_hat + big_m * s.m / (s.m + s.n)
    elif d < -big_c:
        delta_est = d + big_m
        theta = s.theta_hat - big_m * s.m / (s.m + s.n)
    else:
        delta_est = w_np * d
        theta = s.theta_hat + w_np * d
    return EstimateResult(theta_est=theta, delta_est=delta_est)


_DISPATCH: dict[type, Callable[[EstimatorConfig, TwoSampleSummary], EstimateResult]] = {
    Mle: lambda c, s: est_mle(s),
    Pooled: lambda c, s: est_pooled(s),
    TestThenPool: lambda c, s: est_ttpool(s, c.c),
    OracleMmse: lambda c, s: est_ommse(s, c.delta_true),
    AdaptiveMmse: lambda c, s: est_ammse(s),
    SensitivityMmse: lambda c, s: est_ammse_s(s, c.sens),
    GeneralizedBorrow: lambda c, s: est_gdib(s, c.g, c.sens),
    AdaptiveLasso: lambda c, s: est_alasso(s, c.tau),
    FixedPowerPrior: lambda c, s: power_prior_mean(s, c.gamma),
    HellingerPowerPrior: lambda c, s: est_hdpp(s),
    EmpiricalBayesPowerPrior: lambda c, s: est_ebpp(s),
    NormalPriorBayes: lambda c, s: est_np(s),
    StudentTPriorBayes: lambda c, s: est_lstp(s, c.v),
    LimitedTranslation: lambda c, s: est_ltr(s),
}


def estimate(config: EstimatorConfig, s: TwoSampleSummary) -> EstimateResult:
    """Single dispatch entry point routing a configuration to its estimator."""
    if isinstance(config, OracleMmse) and config.delta_true is None:
        raise ValueError("oracle MMSE needs delta_true for point estimation")
    fn = _DISPATCH.get(type(config))
    if fn is None:
        raise TypeError(f"unknown estimator configuration: {config!r}")
    return fn(config, s)
