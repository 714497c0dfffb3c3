"""EER profiles: inferential quantities as functions of an assumed EER.

A :class:`ProfileGrid` tabulates, on a uniform grid of omega values, the
broad-inference p-value and confidence level for an observed effect size
together with the replicability power breakdown for a true effect of the
same size. Grids render to CSV and to a small standalone SVG line chart.
"""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Sequence
from xml.sax.saxutils import escape

from .broad import bi_confidence_level, bi_p_value
from .errors import DomainError
from .model import DesignSpec, EffectContext
from .power import relative_efficiency, replicability_power_exact

COLUMNS = ("bi_p_value", "bi_conf_level", "p_rep", "p_wrong_direction", "p_nonsig")
OPTIONAL_COLUMNS = ("relative_efficiency",)


@dataclass(frozen=True)
class ProfileGrid:
    delta_star: float
    design: DesignSpec
    omega: tuple
    columns: Mapping[str, tuple]
    efficiency_power: Optional[float] = None

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.omega, self.omega[1:])):
            raise DomainError("omega values must be strictly increasing")
        for name, values in self.columns.items():
            if len(values) != len(self.omega):
                raise DomainError(f"column {name!r} has {len(values)} rows, expected {len(self.omega)}")

    def __len__(self):
        return len(self.omega)

    @property
    def names(self) -> tuple:
        return tuple(c for c in COLUMNS + OPTIONAL_COLUMNS if c in self.columns)

    def rows(self):
        for i, w in enumerate(self.omega):
            yield {"omega": w, **{c: self.columns[c][i] for c in self.names}}

    def function(self, column: str) -> Callable[[float], float]:
        """The analytic function of omega behind ``column``."""
        d = abs(self.delta_star)
        design = self.design
        if column == "bi_p_value":
            return lambda w: bi_p_value(d, design, w)
        if column == "bi_conf_level":
            return lambda w: bi_confidence_level(design, w)
        if column in ("p_rep", "p_wrong_direction", "p_nonsig"):
            return lambda w: getattr(replicability_power_exact(EffectContext(d, w), design), column)
        if column == "relative_efficiency" and self.efficiency_power is not None:
            power = self.efficiency_power
            return lambda w: relative_efficiency(EffectContext(d, w), design.alpha, power, rounded=False)
        raise DomainError(f"unknown profile column {column!r}")


def build_profile(
    delta_star: float,
    design: DesignSpec,
    omega_max: float,
    steps: int,
    efficiency_power: Optional[float] = None,
) -> ProfileGrid:
    """Evaluate every profile column on ``steps`` evenly spaced omegas in [0, omega_max].

    Pass ``efficiency_power`` to add a relative-efficiency column for that
    target power (requires a nonzero effect size).
    """
    if steps < 2:
        raise DomainError(f"steps must be at least 2, got {steps!r}")
    if not (math.isfinite(omega_max) and omega_max > 0):
        raise DomainError(f"omega_max must be positive, got {omega_max!r}")
    omegas = tuple(omega_max * i / (steps - 1) for i in range(steps))
    d = abs(delta_star)
    cols = {c: [] for c in COLUMNS}
    if efficiency_power is not None:
        cols["relative_efficiency"] = []
    for w in omegas:
        pb = replicability_power_exact(EffectContext(d, w), design)
        cols["bi_p_value"].append(bi_p_value(d, design, w))
        cols["bi_conf_level"].append(bi_confidence_level(design, w))
        cols["p_rep"].append(pb.p_rep)
        cols["p_wrong_direction"].append(pb.p_wrong_direction)
        cols["p_nonsig"].append(pb.p_nonsig)
        if efficiency_power is not None:
            cols["relative_efficiency"].append(
                relative_efficiency(EffectContext(d, w), design.alpha, efficiency_power, rounded=False)
            )
    return ProfileGrid(delta_star, design, omegas, {k: tuple(v) for k, v in cols.items()}, efficiency_power)


def crossing_point(grid: ProfileGrid, column: str, threshold: float, tol: float = 1e-12) -> Optional[float]:
    """Omega in [0, omega_max] where ``column`` crosses ``threshold``, or None.

    The crossing is located by bisection on the analytic function, so the
    grid resolution does not affect it. The column must be monotone in omega.
    """
    f = grid.function(column)
    lo, hi = grid.omega[0], grid.omega[-1]
    f_lo, f_hi = f(lo) - threshold, f(hi) - threshold
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        return None
    rising = f_hi > 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        if (f(mid) - threshold > 0) == rising:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _fmt(v: float) -> str:
    return format(v, ".6g")


def _write(data: bytes, destination):
    if destination is None:
        return
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "wb") as fh:
            fh.write(data)
    else:
        destination.write(data)


def emit_csv(grid: ProfileGrid, destination=None) -> bytes:
    """Render ``grid`` as CSV (6 significant digits, ``\\n`` line endings).

    ``destination`` may be a path or a binary file object; the bytes are
    returned either way.
    """
    names = grid.names
    buf = io.StringIO()
    buf.write(",".join(("omega",) + names) + "\n")
    for row in grid.rows():
        buf.write(",".join(_fmt(row[k]) for k in ("omega",) + names) + "\n")
    data = buf.getvalue().encode("utf-8")
    _write(data, destination)
    return data


def read_profile_csv(data: bytes) -> dict:
    """Parse CSV written by :func:`emit_csv` into ``{column: [floats]}``."""
    lines = data.decode("utf-8").splitlines()
    header = lines[0].split(",")
    out = {h: [] for h in header}
    for line in lines[1:]:
        for h, v in zip(header, line.split(","), strict=True):
            out[h].append(float(v))
    return out


# -- SVG -----------------------------------------------------------------------

WIDTH, HEIGHT = 800, 500
_LEFT, _RIGHT = 0.1 * WIDTH, 0.9 * WIDTH
_TOP, _BOTTOM = 0.1 * HEIGHT, 0.9 * HEIGHT
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
LABELS = {
    "bi_p_value": "BI p-value",
    "bi_conf_level": "BI confidence level",
    "p_rep": "replicability power",
    "p_wrong_direction": "P(significant, wrong direction)",
    "p_nonsig": "P(non-significant)",
    "relative_efficiency": "relative efficiency",
}


def _c(v: float) -> str:
    return f"{v:.2f}"


def line_chart_svg(
    x: Sequence[float],
    series: Mapping[str, Sequence[float]],
    x_label: str = "EER (omega)",
    y_label: str = "probability",
    reference_lines: Sequence[float] = (),
    title: Optional[str] = None,
    y_range: tuple = (0.0, 1.0),
    x_ticks: int = 5,
    y_ticks: int = 5,
) -> bytes:
    """Standalone SVG 1.1 line chart, one polyline per series, on an 800 x 500 canvas."""
    if len(x) < 2:
        raise DomainError("need at least two x values")
    if not series:
        raise DomainError("no series to plot")
    if len(series) > len(PALETTE):
        raise DomainError(f"at most {len(PALETTE)} series supported")
    y0, y1 = y_range
    if not (math.isfinite(y0) and math.isfinite(y1) and y0 < y1):
        raise DomainError(f"invalid y_range {y_range!r}")
    if x_ticks < 1 or y_ticks < 1:
        raise DomainError("tick counts must be positive")
    for ref in reference_lines:
        if not y0 <= ref <= y1:
            raise DomainError(f"reference line {ref!r} outside y_range {y_range!r}")
    x0, x1 = x[0], x[-1]
    if not x1 > x0:
        raise DomainError("x values must increase")

    def px(v):
        return _LEFT + (v - x0) / (x1 - x0) * (_RIGHT - _LEFT)

    def py(v):
        v = min(max(v, y0), y1)
        return _BOTTOM - (v - y0) / (y1 - y0) * (_BOTTOM - _TOP)

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="yes"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(
            f'<text x="{_c(WIDTH / 2)}" y="{_c(_TOP / 2)}" text-anchor="middle" font-family="sans-serif" '
            f'font-size="16">{escape(title)}</text>'
        )
    # axes
    out.append(
        f'<g stroke="black" stroke-width="1"><line x1="{_c(_LEFT)}" y1="{_c(_BOTTOM)}" x2="{_c(_RIGHT)}" '
        f'y2="{_c(_BOTTOM)}"/><line x1="{_c(_LEFT)}" y1="{_c(_TOP)}" x2="{_c(_LEFT)}" y2="{_c(_BOTTOM)}"/></g>'
    )
    ticks = ['<g font-family="sans-serif" font-size="11" fill="black">']
    for i in range(x_ticks + 1):
        v = x0 + (x1 - x0) * i / x_ticks
        ticks.append(
            f'<line x1="{_c(px(v))}" y1="{_c(_BOTTOM)}" x2="{_c(px(v))}" y2="{_c(_BOTTOM + 5)}" stroke="black"/>'
            f'<text x="{_c(px(v))}" y="{_c(_BOTTOM + 18)}" text-anchor="middle">{v:.3g}</text>'
        )
    for i in range(y_ticks + 1):
        v = y0 + (y1 - y0) * i / y_ticks
        ticks.append(
            f'<line x1="{_c(_LEFT - 5)}" y1="{_c(py(v))}" x2="{_c(_LEFT)}" y2="{_c(py(v))}" stroke="black"/>'
            f'<text x="{_c(_LEFT - 8)}" y="{_c(py(v) + 4)}" text-anchor="end">{v:.3g}</text>'
        )
    ticks.append("</g>")
    out.extend(ticks)
    out.append(
        f'<text x="{_c((_LEFT + _RIGHT) / 2)}" y="{_c(HEIGHT - 12)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{escape(x_label)}</text>'
    )
    out.append(
        f'<text x="18" y="{_c((_TOP + _BOTTOM) / 2)}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13" transform="rotate(-90 18 {_c((_TOP + _BOTTOM) / 2)})">{escape(y_label)}</text>'
    )
    for ref in reference_lines:
        out.append(
            f'<line class="reference" x1="{_c(_LEFT)}" y1="{_c(py(ref))}" x2="{_c(_RIGHT)}" y2="{_c(py(ref))}" '
            f'stroke="gray" stroke-width="1" stroke-dasharray="2,3"/>'
        )
    for k, (name, ys) in enumerate(series.items()):
        if len(ys) != len(x):
            raise DomainError(f"series {name!r} has {len(ys)} points, expected {len(x)}")
        pts = " ".join(f"{_c(px(a))},{_c(py(b))}" for a, b in zip(x, ys))
        out.append(
            f'<polyline data-series="{escape(name)}" fill="none" stroke="{PALETTE[k]}" stroke-width="2" '
            f'points="{pts}"/>'
        )
    legend_y = _TOP + 10
    for k, name in enumerate(series):
        y = legend_y + 16 * k
        out.append(
            f'<line x1="{_c(_RIGHT - 190)}" y1="{_c(y)}" x2="{_c(_RIGHT - 170)}" y2="{_c(y)}" '
            f'stroke="{PALETTE[k]}" stroke-width="2"/>'
            f'<text x="{_c(_RIGHT - 165)}" y="{_c(y + 4)}" font-family="sans-serif" '
            f'font-size="11">{escape(LABELS.get(name, name))}</text>'
        )
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def emit_svg(
    grid: ProfileGrid,
    destination=None,
    columns: Optional[Sequence[str]] = None,
    reference_lines: Sequence[float] = (0.05, 0.95),
    title: Optional[str] = None,
) -> bytes:
    """Render selected grid columns (default: BI p-value and confidence level) as SVG."""
    if columns is None:
        columns = ("bi_p_value", "bi_conf_level")
    for c in columns:
        if c not in grid.columns:
            raise DomainError(f"grid has no column {c!r}")
    data = line_chart_svg(
        grid.omega,
        {c: grid.columns[c] for c in columns},
        reference_lines=reference_lines,
        title=title,
    )
    _write(data, destination)
    return data
