"""Plain-text CSV input formats.

Two schemas, both UTF-8, comma separated, header row required, no quoting:

* two-sample data -- header ``group,value``; exactly two group labels,
  at least two rows each. Arm 1 is the first label to appear unless
  overridden.
* RCB data -- header ``block,treatment,rep,value``.
"""

from __future__ import annotations

import math

from .errors import StructureError
from .model import TwoSampleSummary

TWO_SAMPLE_HEADER = ("group", "value")
RCB_HEADER = ("block", "treatment", "rep", "value")


class CsvFormatError(StructureError):
    """Malformed CSV input."""


def _rows(text: str, header: tuple):
    lines = [ln.strip() for ln in text.lstrip("﻿").splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise CsvFormatError("empty input")
    got = tuple(h.strip() for h in lines[0].split(","))
    if got != header:
        raise CsvFormatError(f"expected header {','.join(header)!r}, got {lines[0]!r}")
    for lineno, line in enumerate(lines[1:], start=2):
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != len(header):
            raise CsvFormatError(f"line {lineno}: expected {len(header)} fields, got {len(fields)}")
        try:
            value = float(fields[-1])
        except ValueError:
            raise CsvFormatError(f"line {lineno}: non-numeric value {fields[-1]!r}") from None
        if not math.isfinite(value):
            raise CsvFormatError(f"line {lineno}: non-finite value {fields[-1]!r}")
        yield fields[:-1], value


def read_two_sample(text: str, arm1_label: str | None = None) -> tuple[TwoSampleSummary, tuple[str, str]]:
    """Parse ``group,value`` CSV text into a summary and the (arm 1, arm 2) labels."""
    groups: dict[str, list[float]] = {}
    for (label,), value in _rows(text, TWO_SAMPLE_HEADER):
        groups.setdefault(label, []).append(value)
    if len(groups) != 2:
        raise CsvFormatError(f"expected exactly 2 groups, found {len(groups)}: {sorted(groups)}")
    labels = list(groups)
    if arm1_label is not None:
        if arm1_label not in groups:
            raise CsvFormatError(f"arm-1 label {arm1_label!r} not among groups {labels}")
        if labels[0] != arm1_label:
            labels.reverse()
    for label in labels:
        if len(groups[label]) < 2:
            raise CsvFormatError(f"group {label!r} has fewer than 2 observations")
    summary = TwoSampleSummary.from_samples(groups[labels[0]], groups[labels[1]])
    return summary, (labels[0], labels[1])


def read_rcb(text: str) -> list[tuple[str, str, str, float]]:
    """Parse ``block,treatment,rep,value`` CSV text into records."""
    records = [(b, t, r, v) for (b, t, r), v in _rows(text, RCB_HEADER)]
    if not records:
        raise CsvFormatError("no data rows")
    return records
