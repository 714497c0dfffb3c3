"""Seeded Monte Carlo simulation of the initial and follow-up models.

The simulator draws every random term of the follow-up model explicitly
(environment effect, two interaction effects, one error per unit), so it is
an independent check on the closed forms in :mod:`replicore.power` and
:mod:`replicore.broad`.

Random streams
--------------
Replicates are grouped into fixed blocks of ``BLOCK_SIZE``. Block ``k`` of
a run with seed ``s`` draws from a Philox counter-based generator seeded by
``SeedSequence(s, spawn_key=(k,))``. Within a block the draw order is:
environment effects, interaction effects, then per sub-chunk of replicates
the arm-1 errors followed by the arm-2 errors. Blocks are independent and
their partial tallies are merged in block order, so the output does not
depend on how many threads evaluate them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import dist
from .errors import DomainError
from .model import DesignSpec, MixedModelParams, TwoSampleSummary

BLOCK_SIZE = 4096
# cap on error draws held in memory at once
_CHUNK_DRAWS = 2_000_000


@dataclass(frozen=True)
class SimConfig:
    params: MixedModelParams
    design: DesignSpec
    n_reps: int
    seed: int = 0

    def __post_init__(self):
        if int(self.n_reps) < 1:
            raise DomainError(f"n_reps must be at least 1, got {self.n_reps!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise DomainError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")

    @property
    def n_blocks(self) -> int:
        return -(-self.n_reps // BLOCK_SIZE)


@dataclass
class SimOutcomeTally:
    """Counts of test outcomes and interval coverage over simulated experiments.

    "Correct direction" means significance with the sign of mu1 - mu2 (the
    upper tail when the means are equal).
    """

    n_reps: int = 0
    n_correct: int = 0
    n_wrong: int = 0
    n_nonsig: int = 0
    n_cover_naive: int = 0
    n_cover_bi: int = 0
    sum_t: float = 0.0
    sum_t2: float = 0.0

    def merge(self, other: "SimOutcomeTally") -> "SimOutcomeTally":
        return SimOutcomeTally(
            self.n_reps + other.n_reps,
            self.n_correct + other.n_correct,
            self.n_wrong + other.n_wrong,
            self.n_nonsig + other.n_nonsig,
            self.n_cover_naive + other.n_cover_naive,
            self.n_cover_bi + other.n_cover_bi,
            self.sum_t + other.sum_t,
            self.sum_t2 + other.sum_t2,
        )

    @property
    def mean_t(self) -> float:
        return self.sum_t / self.n_reps

    @property
    def sd_t(self) -> float:
        if self.n_reps < 2:
            return float("nan")
        var = (self.sum_t2 - self.n_reps * self.mean_t**2) / (self.n_reps - 1)
        return math.sqrt(max(var, 0.0))

    def rates(self) -> dict:
        n = self.n_reps
        return {
            "p_rep": self.n_correct / n,
            "p_wrong_direction": self.n_wrong / n,
            "p_nonsig": self.n_nonsig / n,
            "coverage_naive": self.n_cover_naive / n,
            "coverage_bi": self.n_cover_bi / n,
        }

    def as_dict(self) -> dict:
        out = {
            "n_reps": self.n_reps,
            "n_correct": self.n_correct,
            "n_wrong": self.n_wrong,
            "n_nonsig": self.n_nonsig,
            "n_cover_naive": self.n_cover_naive,
            "n_cover_bi": self.n_cover_bi,
        }
        out.update(self.rates())
        out["mean_t"] = self.mean_t
        out["sd_t"] = self.sd_t
        return out


def binomial_se(p: float, n: int) -> float:
    return math.sqrt(p * (1.0 - p) / n)


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Independent generator for replicate block ``block`` of a run seeded with ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=(int(block),))))


def simulate_experiment(
    params: MixedModelParams, design: DesignSpec, rng: np.random.Generator
) -> TwoSampleSummary:
    """Run one follow-up experiment and summarize it.

    Draws the common environment effect and the two interaction effects
    once, then one error per unit.
    """
    theta = rng.normal(0.0, params.sigma_theta)
    d1, d2 = rng.normal(0.0, params.sigma_delta, size=2)
    y1 = params.mu1 + theta + d1 + rng.normal(0.0, params.sigma_e, size=design.n1)
    y2 = params.mu2 + theta + d2 + rng.normal(0.0, params.sigma_e, size=design.n2)
    return TwoSampleSummary.from_samples(y1, y2)


def _simulate_block(cfg: SimConfig, block: int):
    """Mean differences and pooled SDs for the replicates of one block."""
    p, d = cfg.params, cfg.design
    start = block * BLOCK_SIZE
    m = min(BLOCK_SIZE, cfg.n_reps - start)
    rng = block_rng(cfg.seed, block)
    theta = rng.standard_normal(m) * p.sigma_theta
    inter = rng.standard_normal((m, 2)) * p.sigma_delta
    mean1 = np.empty(m)
    mean2 = np.empty(m)
    ss = np.empty(m)
    rows = max(1, _CHUNK_DRAWS // (d.n1 + d.n2))
    for lo in range(0, m, rows):
        hi = min(m, lo + rows)
        e1 = rng.standard_normal((hi - lo, d.n1))
        e2 = rng.standard_normal((hi - lo, d.n2))
        m1 = e1.mean(axis=1)
        m2 = e2.mean(axis=1)
        mean1[lo:hi] = m1
        mean2[lo:hi] = m2
        ss[lo:hi] = ((e1 - m1[:, None]) ** 2).sum(axis=1) + ((e2 - m2[:, None]) ** 2).sum(axis=1)
    # theta is added to both arms before differencing, as in the model
    ybar1 = p.mu1 + theta + inter[:, 0] + p.sigma_e * mean1
    ybar2 = p.mu2 + theta + inter[:, 1] + p.sigma_e * mean2
    diff = ybar1 - ybar2
    s_e = p.sigma_e * np.sqrt(ss / d.df)
    return diff, s_e


def _t_values(cfg, diff, s_e):
    return diff / (s_e * math.sqrt(2.0 / cfg.design.n_h))


def _tally_block(cfg: SimConfig, block: int, t_crit: float) -> SimOutcomeTally:
    diff, s_e = _simulate_block(cfg, block)
    t = _t_values(cfg, diff, s_e)
    true_diff = cfg.params.mu1 - cfg.params.mu2
    upper = int(np.count_nonzero(t >= t_crit))
    lower = int(np.count_nonzero(t <= -t_crit))
    correct, wrong = (lower, upper) if true_diff < 0 else (upper, lower)
    n_h = cfg.design.n_h
    omega = cfg.params.omega
    err = np.abs(diff - true_diff)
    naive = t_crit * s_e * math.sqrt(2.0 / n_h)
    broad = t_crit * s_e * math.sqrt(2.0 / n_h + 2.0 * omega * omega)
    m = len(t)
    return SimOutcomeTally(
        n_reps=m,
        n_correct=correct,
        n_wrong=wrong,
        n_nonsig=m - upper - lower,
        n_cover_naive=int(np.count_nonzero(err <= naive)),
        n_cover_bi=int(np.count_nonzero(err <= broad)),
        sum_t=math.fsum(t.tolist()),
        sum_t2=math.fsum((t * t).tolist()),
    )


def _map_blocks(fn, n_blocks, threads):
    if threads <= 1 or n_blocks == 1:
        return [fn(k) for k in range(n_blocks)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(n_blocks)))


def run_tally(cfg: SimConfig, alpha: float | None = None, threads: int = 1) -> SimOutcomeTally:
    """Simulate ``cfg.n_reps`` experiments and tally test outcomes and coverage.

    ``alpha`` defaults to the design's significance level. The result is
    identical for any ``threads`` value.
    """
    if alpha is None:
        alpha = cfg.design.alpha
    t_crit = dist.central_t_quantile(1.0 - alpha / 2.0, cfg.design.df)
    parts = _map_blocks(lambda k: _tally_block(cfg, k, t_crit), cfg.n_blocks, threads)
    total = SimOutcomeTally()
    for part in parts:
        total = total.merge(part)
    return total


def simulate_t(cfg: SimConfig, threads: int = 1) -> np.ndarray:
    """Simulated values of the two-sample t statistic, in replicate order."""
    parts = _map_blocks(lambda k: _t_values(cfg, *_simulate_block(cfg, k)), cfg.n_blocks, threads)
    return np.concatenate(parts)


def simulate_differences(cfg: SimConfig, threads: int = 1) -> np.ndarray:
    """Simulated mean differences ybar1 - ybar2, in replicate order."""
    parts = _map_blocks(lambda k: _simulate_block(cfg, k)[0], cfg.n_blocks, threads)
    return np.concatenate(parts)
