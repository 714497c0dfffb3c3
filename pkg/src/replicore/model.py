"""Design parameters, effect sizes and the distribution of T in a new environment.

Notation used throughout the package:

* ``delta`` -- treatment effect size, (mu1 - mu2) / (sigma_e * sqrt(2)).
* ``omega`` -- environmental effect ratio (EER), sigma_delta / sigma_e.
* ``n_h`` -- harmonic mean of the two arm sizes.

The follow-up experiment adds a common environment effect ``theta`` and
treatment-specific interaction effects ``delta_r`` to the fixed-effects
model of the initial experiment. Under that model ``T / sqrt(1 + n_h omega^2)``
follows a noncentral t distribution with ``n1 + n2 - 2`` degrees of freedom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import dist
from .errors import DomainError

SQRT2 = math.sqrt(2.0)


def _check_count(name, n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DomainError(f"{name} must be an integer count, got {n!r}")
    if n < 2:
        raise DomainError(f"{name} must be at least 2, got {n}")


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie strictly between 0 and 1, got {alpha!r}")


@dataclass(frozen=True)
class DesignSpec:
    """Arm sizes and two-sided significance level of a two-sample experiment."""

    n1: int
    n2: int
    alpha: float = 0.05

    def __post_init__(self):
        _check_count("n1", self.n1)
        _check_count("n2", self.n2)
        _check_alpha(self.alpha)

    @property
    def n_h(self) -> float:
        return harmonic_mean_n(self.n1, self.n2)

    @property
    def df(self) -> int:
        return int(self.n1) + int(self.n2) - 2

    @cached_property
    def t_crit(self) -> float:
        """Upper alpha/2 critical value of the central t distribution."""
        return dist.central_t_quantile(1.0 - self.alpha / 2.0, self.df)

    @classmethod
    def balanced(cls, n: int, alpha: float = 0.05) -> "DesignSpec":
        return cls(n, n, alpha)


@dataclass(frozen=True)
class EffectContext:
    """Treatment effect size and environmental effect ratio."""

    delta: float
    omega: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.delta):
            raise DomainError(f"delta must be finite, got {self.delta!r}")
        if not (math.isfinite(self.omega) and self.omega >= 0):
            raise DomainError(f"omega must be finite and nonnegative, got {self.omega!r}")


@dataclass(frozen=True)
class TwoSampleSummary:
    """Observed means, pooled standard deviation and arm sizes."""

    mean1: float
    mean2: float
    pooled_sd: float
    n1: int
    n2: int

    def __post_init__(self):
        _check_count("n1", self.n1)
        _check_count("n2", self.n2)
        if not self.pooled_sd > 0:
            raise DomainError(f"pooled_sd must be positive, got {self.pooled_sd!r}")

    @property
    def n_h(self) -> float:
        return harmonic_mean_n(self.n1, self.n2)

    @property
    def df(self) -> int:
        return self.n1 + self.n2 - 2

    @property
    def difference(self) -> float:
        return self.mean1 - self.mean2

    def design(self, alpha: float = 0.05) -> DesignSpec:
        return DesignSpec(self.n1, self.n2, alpha)

    @classmethod
    def from_samples(cls, y1: Sequence[float], y2: Sequence[float]) -> "TwoSampleSummary":
        """Summarize raw responses with the usual pooled variance (df = n1 + n2 - 2)."""
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        n1, n2 = len(y1), len(y2)
        if n1 < 2 or n2 < 2:
            raise DomainError("each group needs at least 2 observations")
        ss = float(np.sum((y1 - y1.mean()) ** 2) + np.sum((y2 - y2.mean()) ** 2))
        sd = math.sqrt(ss / (n1 + n2 - 2))
        if sd == 0:
            raise DomainError("pooled standard deviation is zero")
        return cls(float(y1.mean()), float(y2.mean()), sd, n1, n2)


@dataclass(frozen=True)
class MixedModelParams:
    """Parameters of the follow-up mixed model.

    ``sigma_delta = sigma_theta = 0`` gives back the fixed-effects model of
    the initial experiment.
    """

    mu1: float
    mu2: float
    sigma_e: float = 1.0
    sigma_delta: float = 0.0
    sigma_theta: float = 0.0

    def __post_init__(self):
        if not self.sigma_e > 0:
            raise DomainError(f"sigma_e must be positive, got {self.sigma_e!r}")
        if self.sigma_delta < 0 or self.sigma_theta < 0:
            raise DomainError("sigma_delta and sigma_theta must be nonnegative")

    @property
    def delta(self) -> float:
        return (self.mu1 - self.mu2) / (self.sigma_e * SQRT2)

    @property
    def omega(self) -> float:
        return self.sigma_delta / self.sigma_e

    @property
    def effect(self) -> EffectContext:
        return EffectContext(self.delta, self.omega)

    @classmethod
    def from_effect(
        cls, delta: float, omega: float, sigma_e: float = 1.0, sigma_theta: float = 0.0, mu2: float = 0.0
    ) -> "MixedModelParams":
        return cls(mu2 + delta * SQRT2 * sigma_e, mu2, sigma_e, omega * sigma_e, sigma_theta)


def harmonic_mean_n(n1: float, n2: float) -> float:
    """Harmonic mean 2 / (1/n1 + 1/n2) of the arm sizes."""
    if not (n1 > 0 and n2 > 0):
        raise DomainError(f"arm sizes must be positive, got {n1!r}, {n2!r}")
    if n1 == n2:
        return float(n1)
    return 2.0 / (1.0 / n1 + 1.0 / n2)


def inflation(n_h: float, omega: float) -> float:
    """sqrt(1 + n_h omega^2), the factor by which environment variance scales T."""
    return math.sqrt(1.0 + n_h * omega * omega)


def noncentrality(ctx: EffectContext, design: DesignSpec) -> float:
    n_h = design.n_h
    return ctx.delta * math.sqrt(n_h) / inflation(n_h, ctx.omega)


def cdf_t_under_m2(t: float, ctx: EffectContext, design: DesignSpec) -> float:
    """P(T <= t) in a follow-up experiment with effect ``ctx``."""
    scaled = t / inflation(design.n_h, ctx.omega)
    return dist.noncentral_t_cdf(scaled, design.df, noncentrality(ctx, design))


def sf_t_under_m2(t: float, ctx: EffectContext, design: DesignSpec) -> float:
    """P(T > t), the complement of :func:`cdf_t_under_m2`."""
    scaled = t / inflation(design.n_h, ctx.omega)
    # reflect so the series is summed for the lower tail of -T
    return dist.noncentral_t_cdf(-scaled, design.df, -noncentrality(ctx, design))


def observed_effect_size(s: TwoSampleSummary) -> float:
    """Observed effect size (ybar1 - ybar2) / (sqrt(2) s_e)."""
    return s.difference / (SQRT2 * s.pooled_sd)


def cohens_d(s: TwoSampleSummary) -> float:
    """Cohen's d, the observed effect size without the sqrt(2) divisor."""
    return s.difference / s.pooled_sd


def t_statistic(s: TwoSampleSummary) -> float:
    return s.difference / (s.pooled_sd * math.sqrt(2.0 / s.n_h))


def classical_p_value(s: TwoSampleSummary) -> float:
    """Two-sided p-value of the pooled two-sample t test."""
    return 2.0 * dist.central_t_cdf(-abs(t_statistic(s)), s.df)
