import math

import numpy as np
import pytest
from scipy import stats

from replicore.errors import DomainError
from replicore.model import DesignSpec, EffectContext, MixedModelParams
from replicore.power import initial_power, replicability_power_exact
from replicore.simulate import (
    BLOCK_SIZE,
    SimConfig,
    SimOutcomeTally,
    binomial_se,
    block_rng,
    run_tally,
    simulate_differences,
    simulate_experiment,
    simulate_t,
)


def _within(rate, p, n, k=3):
    return abs(rate - p) <= k * binomial_se(p, n)


def test_config_validation():
    p = MixedModelParams(0, 0)
    with pytest.raises(DomainError):
        SimConfig(p, DesignSpec(5, 5), 0)
    with pytest.raises(DomainError):
        SimConfig(p, DesignSpec(5, 5), 10, seed=-1)
    assert SimConfig(p, DesignSpec(5, 5), BLOCK_SIZE + 1).n_blocks == 2


def test_tally_counts_sum():
    cfg = SimConfig(MixedModelParams.from_effect(0.5, 0.3), DesignSpec(7, 9), 10_000, seed=4)
    t = run_tally(cfg)
    assert t.n_correct + t.n_wrong + t.n_nonsig == t.n_reps == 10_000
    assert sum(v for k, v in t.rates().items() if k.startswith("p_")) == pytest.approx(1.0)


def test_merge_is_associative():
    a = SimOutcomeTally(3, 1, 1, 1, 2, 3, 0.5, 1.5)
    b = SimOutcomeTally(2, 2, 0, 0, 1, 2, -1.0, 2.0)
    c = SimOutcomeTally(1, 0, 0, 1, 1, 1, 0.25, 0.0625)
    assert a.merge(b).merge(c) == a.merge(b.merge(c))


def test_null_m1_mean_t():
    cfg = SimConfig(MixedModelParams(3.0, 3.0), DesignSpec(11, 11), 100_000, seed=1)
    t = run_tally(cfg)
    # sd of a t(20) variate is sqrt(20/18)
    assert abs(t.mean_t) <= 3 * math.sqrt(20 / 18) / math.sqrt(t.n_reps)
    assert t.sd_t == pytest.approx(math.sqrt(20 / 18), rel=0.02)


def test_example_rate():
    params = MixedModelParams.from_effect(1.0, 0.5)
    n = 100_000
    t = run_tally(SimConfig(params, DesignSpec(11, 11), n, seed=2))
    assert _within(t.rates()["p_rep"], 0.738870, n)


def test_large_design_rates():
    design = DesignSpec(300, 300, 0.005)
    n = 200_000
    t = run_tally(SimConfig(MixedModelParams.from_effect(0.25, 0.5), design, n, seed=5))
    exact = replicability_power_exact(EffectContext(0.25, 0.5), design)
    r = t.rates()
    assert _within(r["p_rep"], exact.p_rep, n)
    assert _within(r["p_wrong_direction"], exact.p_wrong_direction, n)
    assert _within(r["p_nonsig"], exact.p_nonsig, n)


def test_omega_zero_nonsig_is_one_minus_power():
    design = DesignSpec(20, 20)
    n = 100_000
    t = run_tally(SimConfig(MixedModelParams.from_effect(0.6, 0.0), design, n, seed=6))
    wrong = replicability_power_exact(EffectContext(0.6, 0), design).p_wrong_direction
    p = 1 - initial_power(0.6, design) - wrong
    assert _within(t.rates()["p_nonsig"], p, n)


def test_negative_effect_counts_lower_tail_as_correct():
    params = MixedModelParams.from_effect(-1.0, 0.2)
    t = run_tally(SimConfig(params, DesignSpec(11, 11), 20_000, seed=7))
    assert t.n_correct > 10 * t.n_wrong
    assert t.mean_t < 0


def test_determinism_and_threads():
    cfg = SimConfig(MixedModelParams.from_effect(0.3, 0.4, sigma_theta=2.0), DesignSpec(13, 8), 30_000, seed=123)
    a = run_tally(cfg)
    assert run_tally(cfg) == a
    assert run_tally(cfg, threads=4) == a
    assert np.array_equal(simulate_t(cfg), simulate_t(cfg, threads=3))
    other = run_tally(SimConfig(cfg.params, cfg.design, cfg.n_reps, seed=124))
    assert other != a


def test_block_streams_are_independent_of_run_length():
    p = MixedModelParams.from_effect(0.3, 0.4)
    short = simulate_t(SimConfig(p, DesignSpec(5, 5), BLOCK_SIZE, seed=9))
    long = simulate_t(SimConfig(p, DesignSpec(5, 5), 3 * BLOCK_SIZE, seed=9))
    assert np.array_equal(short, long[:BLOCK_SIZE])
    assert not np.array_equal(block_rng(9, 0).standard_normal(4), block_rng(9, 1).standard_normal(4))


def test_sigma_theta_invariance():
    design = DesignSpec(11, 11)
    a = simulate_t(SimConfig(MixedModelParams.from_effect(0.5, 0.4, sigma_theta=0.0), design, 50_000, seed=31))
    b = simulate_t(SimConfig(MixedModelParams.from_effect(0.5, 0.4, sigma_theta=5.0), design, 50_000, seed=32))
    # Kolmogorov-Smirnov critical distance at the 0.1% level for two samples of 50k
    crit = 1.95 * math.sqrt(2 / 50_000)
    assert stats.ks_2samp(a, b).statistic < crit


def test_difference_variance_is_dominated_by_interaction():
    n = 10_000
    cfg = SimConfig(MixedModelParams(0, 0, sigma_e=1.0, sigma_delta=1.0, sigma_theta=3.0), DesignSpec(n, n), 8_000, seed=8)
    d = simulate_differences(cfg)
    # 2 sigma_delta^2 + 2 sigma_e^2 / n
    assert d.var(ddof=1) == pytest.approx(2.0, rel=0.05)


def test_simulate_experiment_single():
    rng = np.random.default_rng(0)
    s = simulate_experiment(MixedModelParams(5, 1, 2.0, 0.0, 10.0), DesignSpec(400, 300), rng)
    assert (s.n1, s.n2) == (400, 300)
    assert s.difference == pytest.approx(4.0, abs=0.6)
    assert s.pooled_sd == pytest.approx(2.0, rel=0.1)


def test_per_unit_simulator_agrees_with_block_simulator():
    params = MixedModelParams.from_effect(1.0, 0.5)
    design = DesignSpec(11, 11)
    rng = np.random.default_rng(77)
    n = 20_000
    hits = 0
    for _ in range(n):
        s = simulate_experiment(params, design, rng)
        t = s.difference / (s.pooled_sd * math.sqrt(2 / s.n_h))
        hits += t >= design.t_crit
    assert _within(hits / n, 0.738870, n)
