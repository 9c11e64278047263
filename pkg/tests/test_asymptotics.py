import math

import numpy as np
import pytest

from dibkit.asymptotics import (
    EXTERNAL_MLE,
    LocalScenario,
    limit_draw,
    limit_law_theorem4,
    limit_sample,
    limit_srmse,
    limit_value,
)
from dibkit.estimators import (
    AdaptiveLasso,
    AdaptiveMmse,
    GeneralizedBorrow,
    LimitedTranslation,
    Mle,
    NormalPriorBayes,
    OracleMmse,
    Pooled,
    SensitivityMmse,
    StudentTPriorBayes,
    TestThenPool as TtPool,
)
from dibkit.montecarlo import ks_distance
from dibkit.streams import addressed_normals

P_PAPER = 1000 / 101_000


def test_scenario_validation():
    with pytest.raises(ValueError):
        LocalScenario(h=1.0, p=0.0)
    with pytest.raises(ValueError):
        LocalScenario(h=math.inf, p=0.5)


def test_pooled_law_moments():
    sc = LocalScenario(h=0.0, p=0.3)
    vals = limit_sample(Pooled(), sc, 200_000, seed=1)
    se_mean = math.sqrt(0.3 / vals.size)
    assert abs(vals.mean()) < 4 * se_mean
    assert vals.var() == pytest.approx(0.3, rel=0.02)

    sc_h = LocalScenario(h=2.0, p=0.3)
    vals_h = limit_sample(Pooled(), sc_h, 200_000, seed=1)
    assert vals_h.mean() == pytest.approx(0.7 * 2.0, abs=4 * se_mean)


def test_external_mle_law():
    sc = LocalScenario(h=1.5, p=0.2)
    vals = limit_sample(EXTERNAL_MLE, sc, 200_000, seed=2)
    assert vals.mean() == pytest.approx(1.5, abs=0.01)
    assert vals.var() == pytest.approx(0.25, rel=0.03)


def test_ttpool_mixture_weight_at_zero_conflict():
    sc = LocalScenario(h=0.0, p=P_PAPER)
    z1 = addressed_normals(3, 0, 0, 400_000)
    z2 = addressed_normals(3, 0, 400_000, 400_000)
    ttp = limit_value(TtPool(c=3.84), sc, z1, z2)
    pooled = limit_value(Pooled(), sc, z1, z2)
    frac_pooled = np.mean(ttp == pooled)
    # xi ~ N(0,1) at h=0, so the pooling branch fires with chi^2_1 mass at 3.84
    assert frac_pooled == pytest.approx(0.95, abs=0.002)


def test_gdib_matches_adaptive_mmse_per_draw():
    p = 0.25
    sc = LocalScenario(h=1.2, p=p)
    z1 = addressed_normals(5, 0, 0, 10_000)
    z2 = addressed_normals(5, 0, 10_000, 10_000)

    def g_limit(t):
        return (1.0 - p) / (1.0 + (1.0 - p) * np.asarray(t, float))

    via_g = limit_value(GeneralizedBorrow(g=g_limit, sens=1.0), sc, z1, z2)
    direct = limit_value(AdaptiveMmse(), sc, z1, z2)
    np.testing.assert_allclose(via_g, direct, rtol=0, atol=1e-13)


def test_corollary2_display_form_per_draw():
    # zeta1 + sqrt(1-p) * xi / (1 + xi^2) is the same map written explicitly
    sc = LocalScenario(h=0.7, p=0.1)
    z1 = addressed_normals(6, 0, 0, 5000)
    z2 = addressed_normals(6, 0, 5000, 5000)
    xi = math.sqrt(0.9) * (0.7 - z1) + math.sqrt(0.1) * z2
    display = z1 + math.sqrt(0.9) * xi / (1.0 + xi * xi)
    np.testing.assert_allclose(limit_value(AdaptiveMmse(), sc, z1, z2), display, atol=1e-13)


def test_ammse_far_conflict_recovers_standard_normal():
    sc = LocalScenario(h=50.0, p=P_PAPER)
    vals = limit_sample(AdaptiveMmse(), sc, 1_000_000, seed=9)
    z = addressed_normals(10, 0, 0, 1_000_000)
    assert ks_distance(vals, z) < 0.01


def test_theorem4_law():
    sc = LocalScenario(h=0.0, p=0.37)
    law = limit_law_theorem4(sc)
    assert (law.mean, law.variance) == (0.0, 0.37)
    nearly_all_current = limit_law_theorem4(LocalScenario(h=3.0, p=0.9999))
    assert nearly_all_current.variance == pytest.approx(1.0, abs=1e-3)
    assert nearly_all_current.mean == pytest.approx(0.0, abs=1e-3)
    paper_point = limit_law_theorem4(LocalScenario(h=5.0, p=0.0099))
    assert paper_point.mean == pytest.approx(4.9505)
    assert paper_point.variance == pytest.approx(0.0099)


def test_limit_srmse():
    sc = LocalScenario(h=1.3, p=0.4)
    assert limit_srmse(Mle(), sc, 10) == 1.0
    sc0 = LocalScenario(h=0.0, p=P_PAPER)
    assert limit_srmse(Pooled(), sc0, 10) == pytest.approx(math.sqrt(P_PAPER))
    val, se = limit_srmse(OracleMmse(), sc0, 400_000, seed=4, return_stderr=True)
    assert val == pytest.approx(math.sqrt(P_PAPER), abs=5 * se + 5e-4)


def test_xi_uncorrelated_with_pooled_limit():
    sc = LocalScenario(h=2.5, p=0.35)
    z1 = addressed_normals(8, 0, 0, 1_000_000)
    z2 = addressed_normals(8, 0, 1_000_000, 1_000_000)
    xi = math.sqrt(0.65) * (2.5 - z1) + math.sqrt(0.35) * z2
    pooled = limit_value(Pooled(), sc, z1, z2)
    r = np.corrcoef(xi, pooled)[0, 1]
    assert abs(r) < 3.0 / math.sqrt(z1.size)


def test_unsupported_kinds_raise():
    sc = LocalScenario(h=0.0, p=0.2)
    rng = np.random.default_rng(0)
    for kind in (AdaptiveLasso(), NormalPriorBayes(), StudentTPriorBayes(), LimitedTranslation()):
        with pytest.raises(ValueError, match="no closed limit law"):
            limit_draw(kind, sc, rng)


def test_limit_draw_fields():
    sc = LocalScenario(h=1.0, p=0.3)
    draw = limit_draw(SensitivityMmse(0.5), sc, np.random.default_rng(12))
    xi = math.sqrt(0.7) * (1.0 - draw.zeta1) + math.sqrt(0.3) * draw.zeta2
    assert draw.xi == pytest.approx(xi, abs=1e-14)
    w = 0.7 / (1.0 + 0.5 * xi * xi)
    assert draw.value == pytest.approx(draw.zeta1 + w * xi / math.sqrt(0.7), abs=1e-14)
