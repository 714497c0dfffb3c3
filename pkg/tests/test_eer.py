import math
import warnings
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from replicore.eer import (
    MULTILAB_EER,
    RCB_PUBLISHED_REFERENCE,
    RcbLayout,
    eer_bound_from_icc,
    eer_from_variance_proportions,
    intraclass_correlation,
    rcb_table_from_records,
    rcb_variance_components,
    simulate_rcb,
)
from replicore.errors import DomainError, StructureError
from replicore.model import MixedModelParams
from replicore.readers import read_rcb

DATA = Path(__file__).parent / "data"


@pytest.mark.parametrize(
    "rho,bound", [(0.30, 0.65), (0.12, 0.37), (0.34, 0.72), (0.23, 0.55), (0.07, 0.27), (0.0, 0.0)]
)
def test_icc_bounds(rho, bound):
    b = eer_bound_from_icc(rho)
    assert b.rho == rho
    assert round(b.omega_upper, 2) == bound


def test_icc_domain_and_monotone():
    for bad in (-0.01, 1.0, 1.5):
        with pytest.raises(DomainError):
            eer_bound_from_icc(bad)
    vals = [eer_bound_from_icc(r).omega_upper for r in np.linspace(0, 0.99, 100)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_variance_proportions():
    assert eer_from_variance_proportions(0.2, 0.2) == pytest.approx(1.0)
    assert eer_from_variance_proportions(0.0, 0.4) == 0.0
    with pytest.raises(DomainError):
        eer_from_variance_proportions(0.1, 0.0)
    with pytest.raises(DomainError):
        eer_from_variance_proportions(1.2, 0.5)


@settings(max_examples=100, deadline=None)
@given(pi=st.floats(0, 1), pe=st.floats(1e-6, 1))
def test_variance_proportions_round_trip(pi, pe):
    w = eer_from_variance_proportions(pi, pe)
    assert w**2 * pe == pytest.approx(pi, rel=1e-12, abs=1e-15)


def test_multilab_reference():
    assert MULTILAB_EER["lingering time"] == 0.63
    assert MULTILAB_EER["homebase occupancy"] == 0.0
    assert all(v >= 0 for v in MULTILAB_EER.values())
    ref = RCB_PUBLISHED_REFERENCE
    assert math.sqrt(ref["sigma2_interaction"] / ref["sigma2_error"]) == pytest.approx(ref["eer"], abs=1e-4)


def test_bound_consistency():
    rng = np.random.default_rng(3)
    for _ in range(200):
        se, sd, st_ = rng.uniform(0.1, 5), rng.uniform(0, 5), rng.uniform(0, 5)
        p = MixedModelParams(0, 0, se, sd, st_)
        rho = intraclass_correlation(p)
        assert eer_bound_from_icc(rho).omega_upper >= p.omega * (1 - 1e-12)


def _moment_se(layout, s2b, s2i, s2e):
    # var(MS) = 2 E[MS]^2 / df for each independent mean square
    b, t, r = layout.shape
    e_err, e_int, e_blk = s2e, s2e + r * s2i, s2e + r * s2i + r * t * s2b
    v_err = 2 * e_err**2 / (b * t * (r - 1))
    v_int = 2 * e_int**2 / ((b - 1) * (t - 1))
    v_blk = 2 * e_blk**2 / (b - 1)
    return math.sqrt(v_blk + v_int) / (r * t), math.sqrt(v_int + v_err) / r, math.sqrt(v_err)


@pytest.mark.parametrize("seed", [1, 99, 2024])
def test_known_components_large_layout(seed):
    layout = RcbLayout(200, 3, 4)
    y = simulate_rcb(layout, 1.0, 4.0, 9.0, np.random.default_rng(seed))
    vc = rcb_variance_components(y)
    se = _moment_se(layout, 1.0, 4.0, 9.0)
    for est, truth, s in zip((vc.sigma2_block, vc.sigma2_interaction, vc.sigma2_error), (1, 4, 9), se):
        assert abs(est - truth) <= 3 * s
    # only the error component is pinned tightly enough for a 15% band
    assert 3 * se[2] <= 0.15 * 9 and abs(vc.sigma2_error - 9) <= 0.15 * 9
    assert vc.eer_hat == pytest.approx(math.sqrt(vc.sigma2_interaction / vc.sigma2_error))


def test_unbiased_over_2000_datasets():
    layout = RcbLayout(6, 3, 4)
    truth = np.array([1.0, 4.0, 9.0])
    rng = np.random.default_rng(20240607)
    est = np.empty((2000, 3))
    for i in range(2000):
        vc = rcb_variance_components(simulate_rcb(layout, *truth, rng), warn=False)
        est[i] = (vc.raw_block, vc.raw_interaction, vc.sigma2_error)
    se = est.std(axis=0, ddof=1) / math.sqrt(len(est))
    assert np.all(np.abs(est.mean(axis=0) - truth) <= 3 * se)


@settings(max_examples=50, deadline=None)
@given(c=st.floats(1e-4, 1e4), seed=st.integers(0, 2**32 - 1))
def test_scale_equivariance(c, seed):
    y = simulate_rcb(RcbLayout(5, 3, 4), 1.0, 2.0, 3.0, np.random.default_rng(seed))
    a = rcb_variance_components(y, warn=False)
    b = rcb_variance_components(c * y, warn=False)
    for f in ("sigma2_block", "sigma2_interaction", "sigma2_error"):
        assert getattr(b, f) == pytest.approx(c * c * getattr(a, f), rel=1e-9, abs=1e-300)
    assert abs(b.eer_hat - a.eer_hat) <= 1e-10


def test_location_invariance_of_components():
    y = simulate_rcb(RcbLayout(5, 4, 3), 1.0, 2.0, 3.0, np.random.default_rng(5))
    a = rcb_variance_components(y, warn=False)
    b = rcb_variance_components(y + 1000.0, warn=False)
    assert b.sigma2_error == pytest.approx(a.sigma2_error, rel=1e-9)
    assert b.eer_hat == pytest.approx(a.eer_hat, rel=1e-8)


def test_truncation_flag_and_warning():
    # cells with identical means give a zero interaction mean square
    base = np.array([[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]])
    noise = np.array([-1.0, 1.0])
    y = base[:, :, None] + noise[None, None, :]
    with pytest.warns(RuntimeWarning):
        vc = rcb_variance_components(y)
    assert vc.truncated
    assert vc.sigma2_interaction == 0.0 and vc.raw_interaction < 0
    assert vc.eer_hat == 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rcb_variance_components(y, warn=False)


def test_degenerate_and_structural_errors():
    with pytest.raises(DomainError):
        rcb_variance_components(np.full((3, 2, 2), 7.0))
    with pytest.raises(StructureError):
        rcb_variance_components(np.ones((3, 2)))
    with pytest.raises(StructureError):
        rcb_variance_components(np.ones((3, 2, 1)))
    with pytest.raises(StructureError):
        rcb_variance_components(np.random.default_rng(0).normal(size=(3, 2, 2)), layout=RcbLayout(2, 3, 2))
    records = [(b, t, r, float(b + t + r)) for b in range(3) for t in range(2) for r in range(2)]
    with pytest.raises(StructureError):
        rcb_table_from_records(records[:-1])
    with pytest.raises(StructureError):
        rcb_table_from_records(records + [records[0]])


def test_records_match_array():
    rng = np.random.default_rng(8)
    y = simulate_rcb(RcbLayout(4, 3, 2), 1, 1, 1, rng)
    records = [(f"b{i}", f"t{j}", k, y[i, j, k]) for i in range(4) for j in range(3) for k in range(2)]
    rng.shuffle(records)
    table, layout = rcb_table_from_records(records)
    assert layout == RcbLayout(4, 3, 2)
    assert np.array_equal(table, y)
    assert rcb_variance_components(records, warn=False) == rcb_variance_components(y, warn=False)


def test_bundled_fixture():
    records = read_rcb((DATA / "rcb_synthetic.csv").read_text())
    vc = rcb_variance_components(records)
    se = _moment_se(RcbLayout(200, 3, 4), 1.0, 4.0, 9.0)
    for est, truth, s in zip((vc.sigma2_block, vc.sigma2_interaction, vc.sigma2_error), (1, 4, 9), se):
        assert abs(est - truth) <= 3 * s
    assert vc.eer_hat == pytest.approx(0.639577, abs=1e-6)
