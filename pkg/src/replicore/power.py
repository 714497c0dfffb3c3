"""Replicability power and follow-up sample sizes.

Replicability power is the probability that a follow-up experiment, run in
a new random environment, rejects the two-sided null *in the direction of
the true effect*. The remaining probability splits into significance in the
wrong direction and non-significance.

Effect sizes are taken as nonnegative (mu1 >= mu2); callers holding a
negative effect should swap the arms first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import dist
from .errors import DomainError
from .model import DesignSpec, EffectContext, inflation, noncentrality

# margin by which the limiting power must exceed the target
ATTAIN_TOL = 1e-12
# residual allowed when checking a candidate root of the sample-size equation
ROOT_TOL = 1e-9


@dataclass(frozen=True)
class PowerBreakdown:
    p_rep: float
    p_wrong_direction: float
    p_nonsig: float

    def as_dict(self) -> dict:
        return {
            "p_rep": self.p_rep,
            "p_wrong_direction": self.p_wrong_direction,
            "p_nonsig": self.p_nonsig,
        }


@dataclass(frozen=True)
class SampleSizeResult:
    """Per-arm sample size; ``n_per_arm is None`` marks an unattainable target.

    ``n_real`` is the unrounded solution and ``achieved_power`` the power at
    the rounded size (both None when unattainable). ``limit`` is the power
    reached as n grows without bound.
    """

    n_per_arm: Optional[int]
    n_real: Optional[float]
    achieved_power: Optional[float]
    limit: float

    @property
    def attainable(self) -> bool:
        return self.n_per_arm is not None


def _check_delta(delta):
    if delta < 0:
        raise DomainError(f"effect size must be nonnegative (swap arms for mu1 < mu2), got {delta!r}")


def _check_targets(alpha, power):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie strictly between 0 and 1, got {alpha!r}")
    if not alpha / 2.0 < power < 1.0:
        raise DomainError(f"power must lie in (alpha/2, 1), got {power!r}")


def replicability_power_exact(ctx: EffectContext, design: DesignSpec) -> PowerBreakdown:
    """Exact power breakdown of the two-sided t test under the follow-up model."""
    _check_delta(ctx.delta)
    c = design.t_crit / inflation(design.n_h, ctx.omega)
    ncp = noncentrality(ctx, design)
    # upper tail via reflection so it keeps full precision
    p_rep = dist.noncentral_t_cdf(-c, design.df, -ncp)
    p_wrong = dist.noncentral_t_cdf(-c, design.df, ncp)
    p_nonsig = max(0.0, 1.0 - p_rep - p_wrong)
    return PowerBreakdown(p_rep, p_wrong, p_nonsig)


def initial_power(delta: float, design: DesignSpec) -> float:
    """Power of the initial experiment (no environment change) in the correct direction."""
    return replicability_power_exact(EffectContext(delta, 0.0), design).p_rep


def replicability_power_normal_approx(ctx: EffectContext, design: DesignSpec) -> float:
    """Large-sample approximation 1 - Phi((z - delta sqrt(n_h)) / sqrt(1 + n_h omega^2))."""
    _check_delta(ctx.delta)
    return _normal_power(ctx.delta, ctx.omega, design.n_h, design.alpha)


def _normal_power(delta, omega, n, alpha):
    z = dist.normal_quantile(1.0 - alpha / 2.0)
    return dist.normal_sf((z - delta * math.sqrt(n)) / inflation(n, omega))


def limiting_power(ctx: EffectContext) -> float:
    """Replicability power as the sample size grows without bound, Phi(delta / omega).

    Continuous at omega = 0: 1 for delta > 0, 1/2 for delta = 0.
    """
    if ctx.omega == 0:
        if ctx.delta > 0:
            return 1.0
        return 0.5 if ctx.delta == 0 else 0.0
    return dist.normal_cdf(ctx.delta / ctx.omega)


def limiting_wrong_direction(ctx: EffectContext) -> float:
    return 1.0 - limiting_power(ctx)


def _round_n(n_real):
    return max(2, math.ceil(n_real))


def _refine_exact(n_start, delta, omega, alpha, power):
    """Smallest per-arm n whose exact replicability power reaches ``power``."""
    ctx = EffectContext(delta, omega)

    def p(n):
        return replicability_power_exact(ctx, DesignSpec(n, n, alpha)).p_rep

    n = n_start
    while n > 2 and p(n - 1) >= power:
        n -= 1
    # the exact test is a little less powerful than the normal approximation
    while p(n) < power:
        n += 1
    return n, p(n)


def initial_sample_size(delta: float, alpha: float, power: float, exact: bool = False) -> SampleSizeResult:
    """Per-arm size (z_{alpha/2} + z_beta)^2 / delta^2 for the initial experiment, rounded up.

    With ``exact=True`` the rounded size is then adjusted until the exact
    t-test power reaches the target.
    """
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta!r}")
    _check_targets(alpha, power)
    za = dist.normal_quantile(1.0 - alpha / 2.0)
    zb = dist.normal_quantile(power)
    n_real = (za + zb) ** 2 / delta**2
    n = _round_n(n_real)
    if exact:
        n, achieved = _refine_exact(n, delta, 0.0, alpha, power)
    else:
        achieved = _normal_power(delta, 0.0, n, alpha)
    return SampleSizeResult(n, n_real, achieved, 1.0)


def _residual(n, delta, omega, za, zb):
    return za + zb * math.sqrt(1.0 + n * omega * omega) - delta * math.sqrt(n)


def _solve_followup(delta, omega, za, zb):
    """Real roots n of za + zb sqrt(1 + n omega^2) = delta sqrt(n).

    Squaring with x = sqrt(n) gives

        (delta^2 - zb^2 omega^2) x^2 - 2 delta za x + (za^2 - zb^2) = 0,

    whose roots are then checked against the unsquared equation.
    """
    a = delta * delta - zb * zb * omega * omega
    b = -2.0 * delta * za
    c = za * za - zb * zb
    if a == 0.0:
        xs = [-c / b] if b != 0.0 else []
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0:
            return []
        # cancellation-free pair of roots
        q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
        xs = [q / a]
        if q != 0.0:
            xs.append(c / q)
    roots = []
    for x in xs:
        if x <= 0:
            continue
        n = x * x
        scale = max(1.0, abs(za), abs(delta * x))
        if abs(_residual(n, delta, omega, za, zb)) <= ROOT_TOL * scale:
            roots.append(n)
    return sorted(roots)


def followup_sample_size(
    ctx: EffectContext, alpha: float, power: float, exact: bool = False
) -> SampleSizeResult:
    """Per-arm follow-up size whose (normal-approximation) replicability power equals ``power``.

    Returns an unattainable result when the limiting power Phi(delta/omega)
    does not exceed the target; in that case no sample size is large enough.
    """
    if not ctx.delta > 0:
        raise DomainError(f"delta must be positive, got {ctx.delta!r}")
    _check_targets(alpha, power)
    limit = limiting_power(ctx)
    unattainable = SampleSizeResult(None, None, None, limit)
    if not limit > power + ATTAIN_TOL:
        return unattainable
    za = dist.normal_quantile(1.0 - alpha / 2.0)
    zb = dist.normal_quantile(power)
    roots = _solve_followup(ctx.delta, ctx.omega, za, zb)
    if not roots:
        return unattainable
    n_real = roots[0]
    n = _round_n(n_real)
    if exact:
        n, achieved = _refine_exact(n, ctx.delta, ctx.omega, alpha, power)
    else:
        achieved = _normal_power(ctx.delta, ctx.omega, n, alpha)
    return SampleSizeResult(n, n_real, achieved, limit)


def relative_efficiency(ctx: EffectContext, alpha: float, power: float, rounded: bool = True) -> float:
    """n_I / n_F, or 0 when the follow-up target is unattainable.

    By default the ratio uses the per-arm sizes after rounding up; pass
    ``rounded=False`` for the ratio of the real-valued solutions (smooth in
    omega, used for efficiency curves).
    """
    follow = followup_sample_size(ctx, alpha, power)
    if not follow.attainable:
        return 0.0
    initial = initial_sample_size(ctx.delta, alpha, power)
    if rounded:
        return initial.n_per_arm / follow.n_per_arm
    return initial.n_real / follow.n_real
