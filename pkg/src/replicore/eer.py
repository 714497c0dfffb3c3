"""Plausible values of the environmental effect ratio.

Three routes:

* an upper bound from an intraclass correlation,
* the ratio of published variance proportions (interaction vs. error),
* method-of-moments variance components from a balanced randomized
  complete block (RCB) design with replicated block x treatment cells,
  treating each block as an environment.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import DomainError, StructureError
from .model import MixedModelParams

# EER by endpoint for a multi-laboratory mouse-behaviour study, computed
# from published variance proportions (interaction / within-lab error).
MULTILAB_EER = {
    "lingering time": 0.63,
    "distance traveled": 0.57,
    "segment max speed": 0.40,
    "excursions": 0.37,
    "time for turn": 0.13,
    "radius of turn": 0.34,
    "segment length": 0.51,
    "center time": 0.40,
    "progression segments": 0.14,
    "segment acceleration": 0.38,
    "homebase occupancy": 0.0,
    "lingering mean speed": 0.35,
    "diversity": 0.0,
    "stops per excursion": 0.18,
    "lingering spatial spread": 0.19,
    "relative activity decrease": 0.03,
    "latency to half max speed": 0.0,
}

# Published REML estimates for a 5 block x 3 treatment x 4 replicate
# count trial. Reference only: the raw counts are not bundled.
RCB_PUBLISHED_REFERENCE = {
    "sigma2_block": 1.1052,
    "sigma2_interaction": 3.8559,
    "sigma2_error": 9.1056,
    "eer": 0.6507,
}


@dataclass(frozen=True)
class IccBound:
    rho: float
    omega_upper: float


@dataclass(frozen=True)
class RcbLayout:
    b: int
    t: int
    r: int

    def __post_init__(self):
        for name in ("b", "t", "r"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 2:
                raise StructureError(f"{name} must be an integer >= 2, got {v!r}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.b, self.t, self.r)


@dataclass(frozen=True)
class VarianceComponents:
    """Variance component estimates from a balanced RCB layout.

    The ``raw_*`` fields hold the moment estimates before negative values
    are truncated to zero; ``truncated`` is set when any truncation happened.
    """

    sigma2_block: float
    sigma2_interaction: float
    sigma2_error: float
    eer_hat: float
    raw_block: float
    raw_interaction: float
    truncated: bool
    ms_block: float
    ms_treatment: float
    ms_interaction: float
    ms_error: float


def intraclass_correlation(params: MixedModelParams) -> float:
    """Within-treatment correlation induced by the shared environment terms."""
    env = params.sigma_theta**2 + params.sigma_delta**2
    return env / (env + params.sigma_e**2)


def eer_bound_from_icc(rho: float) -> IccBound:
    """Upper bound sqrt(rho / (1 - rho)) on omega implied by an intraclass correlation."""
    if not 0.0 <= rho < 1.0:
        raise DomainError(f"rho must lie in [0, 1), got {rho!r}")
    return IccBound(rho, math.sqrt(rho / (1.0 - rho)))


def eer_from_variance_proportions(prop_interaction: float, prop_error: float) -> float:
    """EER from the shares of total variance due to interaction and to error."""
    if not 0.0 <= prop_interaction <= 1.0:
        raise DomainError(f"prop_interaction must lie in [0, 1], got {prop_interaction!r}")
    if not 0.0 < prop_error <= 1.0:
        raise DomainError(f"prop_error must lie in (0, 1], got {prop_error!r}")
    return math.sqrt(prop_interaction / prop_error)


def rcb_table_from_records(records: Iterable[tuple]) -> tuple[np.ndarray, RcbLayout]:
    """Arrange ``(block, treatment, rep, value)`` records into a b x t x r array.

    Labels are sorted (numerically when all labels are numbers) to fix the
    array order. Missing or duplicated cells raise :class:`StructureError`.
    """
    cells: dict[tuple, float] = {}
    for rec in records:
        if len(rec) != 4:
            raise StructureError(f"expected (block, treatment, rep, value), got {rec!r}")
        blk, trt, rep, value = rec
        key = (blk, trt, rep)
        if key in cells:
            raise StructureError(f"duplicate cell {key!r}")
        cells[key] = float(value)
    if not cells:
        raise StructureError("no data")

    def levels(pos):
        labels = {k[pos] for k in cells}
        try:
            return sorted(labels, key=float)
        except (TypeError, ValueError):
            return sorted(labels, key=str)

    blocks, trts, reps = levels(0), levels(1), levels(2)
    layout = RcbLayout(len(blocks), len(trts), len(reps))
    if len(cells) != layout.b * layout.t * layout.r:
        raise StructureError(
            f"unbalanced table: {len(cells)} cells for {layout.b} blocks x {layout.t} treatments x {layout.r} reps"
        )
    y = np.empty(layout.shape)
    for i, blk in enumerate(blocks):
        for j, trt in enumerate(trts):
            for k, rep in enumerate(reps):
                try:
                    y[i, j, k] = cells[(blk, trt, rep)]
                except KeyError:
                    raise StructureError(f"missing cell {(blk, trt, rep)!r}") from None
    return y, layout


def _is_nested(item):
    return isinstance(item, (list, tuple, np.ndarray)) and len(item) > 0 and isinstance(item[0], (list, tuple, np.ndarray))


def rcb_variance_components(data, layout: RcbLayout | None = None, warn: bool = True) -> VarianceComponents:
    """ANOVA (method-of-moments) variance components for a balanced RCB design.

    Parameters
    ----------
    data : array_like or iterable of records
        Either an array of shape (blocks, treatments, replicates) or an
        iterable of ``(block, treatment, rep, value)`` records.
    layout : RcbLayout, optional
        Expected layout; checked against ``data`` when given.

    Notes
    -----
    Uses the unrestricted mixed model, whose expected mean squares are

    ========  ==============================================
    residual  s2_e
    blk x trt s2_e + r s2_delta
    block     s2_e + r s2_delta + r t s2_block
    ========  ==============================================
    """
    if not isinstance(data, np.ndarray):
        data = list(data)
        if data and not _is_nested(data[0]):
            data = rcb_table_from_records(data)[0]
    y = np.asarray(data, dtype=float)
    if y.ndim != 3:
        raise StructureError(f"expected a 3-d array (block, treatment, rep), got shape {y.shape}")
    found = RcbLayout(*y.shape)
    if layout is not None and found != layout:
        raise StructureError(f"data layout {found.shape} does not match {layout.shape}")
    if not np.all(np.isfinite(y)):
        raise StructureError("table contains non-finite values")
    b, t, r = found.shape

    grand = y.mean()
    cell = y.mean(axis=2)
    blk = y.mean(axis=(1, 2))
    trt = y.mean(axis=(0, 2))
    ss_block = t * r * np.sum((blk - grand) ** 2)
    ss_trt = b * r * np.sum((trt - grand) ** 2)
    ss_inter = r * np.sum((cell - blk[:, None] - trt[None, :] + grand) ** 2)
    ss_error = np.sum((y - cell[:, :, None]) ** 2)

    ms_block = ss_block / (b - 1)
    ms_trt = ss_trt / (t - 1)
    ms_inter = ss_inter / ((b - 1) * (t - 1))
    ms_error = ss_error / (b * t * (r - 1))
    # rounding noise from constant cells counts as zero
    if not ms_error > 1e-26 * float(np.mean(y * y)):
        raise DomainError("zero residual mean square: error variance is not estimable")

    raw_inter = (ms_inter - ms_error) / r
    raw_block = (ms_block - ms_inter) / (r * t)
    s2_inter = max(raw_inter, 0.0)
    s2_block = max(raw_block, 0.0)
    truncated = raw_inter < 0 or raw_block < 0
    if truncated and warn:
        warnings.warn("negative variance component estimate truncated to zero", RuntimeWarning, stacklevel=2)
    return VarianceComponents(
        sigma2_block=float(s2_block),
        sigma2_interaction=float(s2_inter),
        sigma2_error=float(ms_error),
        eer_hat=math.sqrt(s2_inter / ms_error),
        raw_block=float(raw_block),
        raw_interaction=float(raw_inter),
        truncated=bool(truncated),
        ms_block=float(ms_block),
        ms_treatment=float(ms_trt),
        ms_interaction=float(ms_inter),
        ms_error=float(ms_error),
    )


def simulate_rcb(
    layout: RcbLayout,
    sigma2_block: float,
    sigma2_interaction: float,
    sigma2_error: float,
    rng: np.random.Generator,
    treatment_means: Mapping[int, float] | None = None,
) -> np.ndarray:
    """Draw a balanced RCB table from the unrestricted mixed model."""
    b, t, r = layout.shape
    means = np.zeros(t)
    if treatment_means:
        for j, m in treatment_means.items():
            means[j] = m
    y = (
        means[None, :, None]
        + rng.normal(0.0, math.sqrt(sigma2_block), (b, 1, 1))
        + rng.normal(0.0, math.sqrt(sigma2_interaction), (b, t, 1))
        + rng.normal(0.0, math.sqrt(sigma2_error), (b, t, r))
    )
    return y
