import math

import numpy as np
import pytest
from scipy.integrate import quad

from dibkit.estimators import (
    AdaptiveMmse,
    EmpiricalBayesPowerPrior,
    HellingerPowerPrior,
    Mle,
    NormalPriorBayes,
    OracleMmse,
    Pooled,
    StudentTPriorBayes,
    TestThenPool as TtPool,
)
from dibkit.risk import (
    LaplacePrior,
    NormalPrior,
    PointMassPrior,
    StudentTPrior,
    UniformPrior,
    imse,
    integrated_srmse,
    mse_numeric,
    srmse,
    srmse_batch,
    srmse_curve,
    table_priors,
)

N, M = 1000, 100_000


def pooled_mse(delta, n=N, m=M):
    return 1.0 / (n + m) + (m * delta / (n + m)) ** 2


def ommse_mse(delta, n=N, m=M):
    return (1.0 - m / (n + m + n * m * delta * delta)) / n


def test_mle_mse_exact():
    assert mse_numeric(Mle(), 0.0, 0.3, N, M) == pytest.approx(1.0 / N, abs=1e-13)
    assert srmse(Mle(), 2.0, 1.7, N, M) == pytest.approx(1.0, abs=1e-10)


def test_ommse_matches_closed_form():
    for delta in (0.0, 0.02, 0.1, 0.5):
        got = mse_numeric(OracleMmse(delta), 0.0, delta, N, M)
        assert got == pytest.approx(ommse_mse(delta), abs=1e-10)


def test_pooled_matches_bias_variance_decomposition():
    for delta in (0.0, 0.05, 0.3):
        got = mse_numeric(Pooled(), 0.0, delta, N, M)
        assert got == pytest.approx(pooled_mse(delta), abs=1e-10)


def test_node_doubling_stability():
    # smooth corrections: doubling is a no-op at quadrature accuracy
    for config in (Mle(), Pooled(), OracleMmse(0.05), AdaptiveMmse(), NormalPriorBayes()):
        a = mse_numeric(config, 0.0, 0.05, N, M, nodes=128)
        b = mse_numeric(config, 0.0, 0.05, N, M, nodes=256)
        assert abs(a - b) < 1e-8
    # kinked or discontinuous corrections converge slower under tensor
    # Gauss-Hermite; the indicator jump dominates the error
    for config, tol in ((TtPool(), 2e-5), (EmpiricalBayesPowerPrior(), 2e-6), (HellingerPowerPrior(), 2e-6)):
        a = mse_numeric(config, 0.0, 0.05, N, M, nodes=128)
        b = mse_numeric(config, 0.0, 0.05, N, M, nodes=256)
        assert abs(a - b) < tol
    a = mse_numeric(StudentTPriorBayes(), 0.0, 0.05, N, M, nodes=96)
    b = mse_numeric(StudentTPriorBayes(), 0.0, 0.05, N, M, nodes=192)
    assert abs(a - b) < 1e-4


def test_minimum_nodes_enforced():
    with pytest.raises(ValueError):
        mse_numeric(Mle(), 0.0, 0.0, N, M, nodes=32)


def test_srmse_examples():
    assert srmse(Pooled(), 0.0, 0.0, N, M) == pytest.approx(math.sqrt(N / (N + M)), abs=1e-10)
    np_vals = [srmse(NormalPriorBayes(), 0.0, d, N, M) for d in (0.5, 1.0, 2.0)]
    assert np_vals[0] < np_vals[1] < np_vals[2]


def test_curve_dominance_and_tails():
    grid = np.array([0.0, 1.0, 2.5, 5.0, 20.0]) / math.sqrt(N)
    oracle = srmse_batch(OracleMmse(), 0.0, grid, N, M)
    for config in (AdaptiveMmse(), EmpiricalBayesPowerPrior(), HellingerPowerPrior(), TtPool()):
        curve = srmse_curve(config, N, M, grid)
        assert np.all(curve.srmse >= oracle - 1e-6)
        assert curve.srmse[-1] == pytest.approx(1.0, abs=0.05)
        assert curve.sqrt_n_delta[-1] == pytest.approx(20.0)


def test_pooled_curve_closed_form():
    grid = np.linspace(0.0, 0.2, 9)
    curve = srmse_curve(Pooled(), N, M, grid)
    p = N / (N + M)
    expected = np.sqrt(p + N * (1 - p) ** 2 * grid**2)
    np.testing.assert_allclose(curve.srmse, expected, atol=1e-8)


def test_prior_densities_normalized():
    for prior in table_priors(N, M).values():
        total = quad(lambda x: float(prior.pdf(np.asarray(x))), *prior.support(), limit=200)[0]
        assert total >= 1.0 - prior.truncation_mass() - 1e-6


def test_integrated_srmse_pooled_against_adaptive_quad():
    prior = NormalPrior(0.0, 1.0 / N)
    p = N / (N + M)

    def integrand(d):
        return math.sqrt(p + N * (1 - p) ** 2 * d * d) * float(prior.pdf(np.asarray(d)))

    oracle = quad(integrand, *prior.support(), limit=400)[0]
    got = integrated_srmse(Pooled(), prior, N, M)
    assert got == pytest.approx(oracle, abs=1e-3)


def test_integrated_srmse_point_mass_reduces_to_srmse():
    value = integrated_srmse(AdaptiveMmse(), PointMassPrior(0.07), N, M)
    assert value == pytest.approx(srmse(AdaptiveMmse(), 0.0, 0.07, N, M), abs=1e-12)


def test_imse_examples():
    prior = NormalPrior(0.0, 1.0 / N)
    assert imse(Mle(), 0.0, prior, N, M) == pytest.approx(1.0 / N, abs=1e-9)
    # location invariance: the integrand never sees theta
    a = imse(NormalPriorBayes(), 0.0, prior, N, M)
    b = imse(NormalPriorBayes(), 5.0, prior, N, M)
    assert a == b
    pm = imse(Pooled(), 0.0, PointMassPrior(0.04), N, M)
    assert pm == pytest.approx(pooled_mse(0.04), abs=1e-12)


def test_np_is_bayes_optimal_under_matching_prior():
    prior = NormalPrior(0.0, 1.0 / N)
    best = imse(NormalPriorBayes(), 0.0, prior, N, M)
    for config in (Mle(), Pooled(), AdaptiveMmse(), EmpiricalBayesPowerPrior(), TtPool()):
        assert best <= imse(config, 0.0, prior, N, M) + 1e-12


def test_ommse_lower_bound_on_integrated_risk():
    priors = table_priors(N, M)
    for name in ("pi1", "pi3"):
        bound = integrated_srmse(OracleMmse(), priors[name], N, M)
        for config in (Mle(), Pooled(), AdaptiveMmse(), NormalPriorBayes()):
            assert bound <= integrated_srmse(config, priors[name], N, M) + 1e-9


def test_prior_validation():
    with pytest.raises(ValueError):
        NormalPrior(0.0, 0.0)
    with pytest.raises(ValueError):
        UniformPrior(1.0, 1.0)
    with pytest.raises(ValueError):
        LaplacePrior(0.0, -1.0)
    with pytest.raises(ValueError):
        StudentTPrior(2, 0.0, 1.0)
