"""Broad-inference p-values, confidence levels and intervals.

"Broad inference" means inference about mu1 - mu2 that averages over random
research environments, for an assumed EER ``omega``. At ``omega = 0`` every
quantity here reduces to its classical two-sample t counterpart. ``omega``
is always an input; it is never estimated from the two-sample data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import dist
from .errors import DomainError
from .model import DesignSpec, TwoSampleSummary, inflation, observed_effect_size


def _check_omega(omega):
    if not (math.isfinite(omega) and omega >= 0):
        raise DomainError(f"omega must be finite and nonnegative, got {omega!r}")


def bi_p_value(delta_star: float, design: DesignSpec, omega: float) -> float:
    """Two-sided broad-inference p-value for an observed effect size.

    ``2 * (1 - G0(|delta*| sqrt(n_h) / sqrt(1 + n_h omega^2)))`` with G0 the
    central t CDF on n1 + n2 - 2 degrees of freedom.
    """
    _check_omega(omega)
    n_h = design.n_h
    x = abs(delta_star) * math.sqrt(n_h) / inflation(n_h, omega)
    return min(1.0, 2.0 * dist.central_t_cdf(-x, design.df))


def bi_p_value_asymptotic(delta_star: float, omega: float) -> float:
    """Limit of :func:`bi_p_value` as n_h grows, 2 (1 - Phi(|delta*| / omega)).

    This is also the smallest broad-inference p-value any sample size can give.
    """
    _check_omega(omega)
    if omega == 0:
        raise DomainError("the asymptotic broad-inference p-value needs omega > 0")
    return min(1.0, 2.0 * dist.normal_cdf(-abs(delta_star) / omega))


def min_detectable_effect(alpha: float, omega: float) -> float:
    """Smallest observed effect size whose asymptotic BI p-value reaches ``alpha``."""
    _check_omega(omega)
    return dist.normal_quantile(1.0 - alpha / 2.0) * omega


def bi_confidence_level(design: DesignSpec, omega: float) -> float:
    """Coverage of the classical 1 - alpha interval for mu1 - mu2 across environments."""
    _check_omega(omega)
    c = design.t_crit / inflation(design.n_h, omega)
    return 2.0 * dist.central_t_cdf(c, design.df) - 1.0


def classical_interval(s: TwoSampleSummary, alpha: float) -> tuple[float, float]:
    return bi_confidence_interval(s, alpha, 0.0)


def bi_confidence_interval(s: TwoSampleSummary, alpha: float, omega: float) -> tuple[float, float]:
    """Interval (ybar1 - ybar2) +/- t_{alpha/2} s_e sqrt(2/n_h + 2 omega^2)."""
    _check_omega(omega)
    t = s.design(alpha).t_crit
    half = t * s.pooled_sd * math.sqrt(2.0 / s.n_h + 2.0 * omega * omega)
    return s.difference - half, s.difference + half


@dataclass(frozen=True)
class BroadInferenceReport:
    delta_star: float
    classical_p_value: float
    bi_p_value: float
    bi_conf_level: float
    bi_interval_low: float
    bi_interval_high: float
    omega_assumed: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def broad_inference_report(s: TwoSampleSummary, alpha: float, omega: float) -> BroadInferenceReport:
    design = s.design(alpha)
    d = observed_effect_size(s)
    low, high = bi_confidence_interval(s, alpha, omega)
    return BroadInferenceReport(
        delta_star=d,
        classical_p_value=bi_p_value(d, design, 0.0),
        bi_p_value=bi_p_value(d, design, omega),
        bi_conf_level=bi_confidence_level(design, omega),
        bi_interval_low=low,
        bi_interval_high=high,
        omega_assumed=omega,
    )
