import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from replicore import dist
from replicore.errors import DomainError
from replicore.model import (
    DesignSpec,
    EffectContext,
    MixedModelParams,
    TwoSampleSummary,
    cdf_t_under_m2,
    classical_p_value,
    cohens_d,
    harmonic_mean_n,
    noncentrality,
    observed_effect_size,
    sf_t_under_m2,
    t_statistic,
)

SUMMARY = TwoSampleSummary(97.0, 56.0, 12.14, 11, 11)


def test_harmonic_mean():
    assert harmonic_mean_n(11, 11) == 11
    assert harmonic_mean_n(300, 300) == 300
    assert harmonic_mean_n(10, 40) == pytest.approx(16.0, abs=1e-12)
    with pytest.raises(DomainError):
        harmonic_mean_n(0, 5)


@pytest.mark.parametrize("n1,n2,alpha", [(1, 5, 0.05), (5, 1, 0.05), (5, 5, 0.0), (5, 5, 1.0), (5.5, 5, 0.05)])
def test_design_rejects(n1, n2, alpha):
    with pytest.raises(DomainError):
        DesignSpec(n1, n2, alpha)


def test_design_properties():
    d = DesignSpec(10, 40, 0.05)
    assert d.df == 48
    assert d.n_h == pytest.approx(16.0)
    assert d.t_crit == pytest.approx(dist.central_t_quantile(0.975, 48))
    assert DesignSpec.balanced(11) == DesignSpec(11, 11)


def test_effect_context_rejects():
    with pytest.raises(DomainError):
        EffectContext(1.0, -0.1)
    with pytest.raises(DomainError):
        EffectContext(float("inf"), 0.1)


def test_noncentrality():
    d = DesignSpec(11, 11)
    assert noncentrality(EffectContext(1, 0), d) == pytest.approx(math.sqrt(11), abs=1e-12)
    # sqrt(11) / sqrt(1 + 11 * .25)
    assert noncentrality(EffectContext(1, 0.5), d) == pytest.approx(1.712698, abs=1e-6)
    assert noncentrality(EffectContext(0, 0.7), DesignSpec(5, 9)) == 0


def test_cdf_under_m2_examples():
    d = DesignSpec(11, 11)
    assert cdf_t_under_m2(0.0, EffectContext(0, 0), d) == pytest.approx(0.5, abs=1e-15)
    upper = sf_t_under_m2(d.t_crit, EffectContext(1, 0.5), d)
    assert upper == pytest.approx(0.74, abs=0.005)
    assert cdf_t_under_m2(-2.086, EffectContext(1, 2), d) >= 0.2


def test_cdf_under_m2_omega_zero_is_m1():
    d = DesignSpec(8, 13)
    for t in np.linspace(-6, 6, 25):
        ctx = EffectContext(0.8, 0.0)
        expected = dist.noncentral_t_cdf(t, d.df, 0.8 * math.sqrt(d.n_h))
        assert abs(cdf_t_under_m2(t, ctx, d) - expected) <= 1e-12


def test_cdf_under_m2_monotone_in_t_and_omega():
    d = DesignSpec(9, 14)
    ts = np.linspace(-8, 8, 41)
    for omega in (0, 0.3, 1, 3):
        vals = [cdf_t_under_m2(t, EffectContext(0.6, omega), d) for t in ts]
        assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))
    for t in (0.5, 2, 5):
        tails = [sf_t_under_m2(t, EffectContext(0, w), d) for w in np.linspace(0, 3, 31)]
        assert all(b >= a - 1e-14 for a, b in zip(tails, tails[1:]))


def test_sf_is_complement():
    d = DesignSpec(11, 11)
    ctx = EffectContext(1, 0.5)
    for t in (-3, 0, 1.5, 4):
        assert sf_t_under_m2(t, ctx, d) + cdf_t_under_m2(t, ctx, d) == pytest.approx(1, abs=1e-12)


def test_summary_statistics():
    assert observed_effect_size(SUMMARY) == pytest.approx(41 / (math.sqrt(2) * 12.14), abs=1e-12)
    assert cohens_d(SUMMARY) == pytest.approx(41 / 12.14, abs=1e-12)
    assert t_statistic(SUMMARY) == pytest.approx(41 / (12.14 * math.sqrt(2 / 11)), abs=1e-12)
    assert classical_p_value(SUMMARY) < 0.001
    assert observed_effect_size(TwoSampleSummary(5, 5, 3, 8, 8)) == 0
    assert observed_effect_size(TwoSampleSummary(1, 0, 1 / math.sqrt(2), 4, 4)) == pytest.approx(1, abs=1e-15)
    unit = TwoSampleSummary(math.sqrt(2 / 6), 0, 1, 6, 6)
    assert t_statistic(unit) == pytest.approx(1, abs=1e-15)


def test_summary_rejects_nonpositive_sd():
    with pytest.raises(DomainError):
        TwoSampleSummary(1, 0, 0.0, 4, 4)


def test_from_samples():
    y1 = [3.0, 5.0, 4.0, 6.0]
    y2 = [1.0, 2.0, 2.5]
    s = TwoSampleSummary.from_samples(y1, y2)
    ss = np.var(y1) * 4 + np.var(y2) * 3
    assert s.pooled_sd == pytest.approx(math.sqrt(ss / 5))
    assert (s.n1, s.n2) == (4, 3)
    assert s.mean1 == pytest.approx(4.5)
    with pytest.raises(DomainError):
        TwoSampleSummary.from_samples([2, 2], [2, 2])


def test_mixed_params_round_trip():
    p = MixedModelParams.from_effect(0.7, 0.4, sigma_e=3.0, sigma_theta=2.0, mu2=10.0)
    assert p.delta == pytest.approx(0.7)
    assert p.omega == pytest.approx(0.4)
    assert p.mu2 == 10.0
    with pytest.raises(DomainError):
        MixedModelParams(0, 0, sigma_e=0.0)
    with pytest.raises(DomainError):
        MixedModelParams(0, 0, sigma_delta=-1)


@settings(max_examples=100, deadline=None)
@given(
    m1=st.floats(-100, 100),
    m2=st.floats(-100, 100),
    sd=st.floats(0.01, 50),
    c=st.floats(1e-3, 1e3),
    n1=st.integers(2, 500),
    n2=st.integers(2, 500),
)
def test_scale_invariance(m1, m2, sd, c, n1, n2):
    s = TwoSampleSummary(m1, m2, sd, n1, n2)
    sc = TwoSampleSummary(c * m1, c * m2, c * sd, n1, n2)
    assert observed_effect_size(sc) == pytest.approx(observed_effect_size(s), rel=1e-12, abs=1e-12)
    assert t_statistic(sc) == pytest.approx(t_statistic(s), rel=1e-12, abs=1e-12)
    assert t_statistic(s) == pytest.approx(observed_effect_size(s) * math.sqrt(s.n_h), rel=1e-12, abs=1e-12)
