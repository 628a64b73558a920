"""Reader for the transition-flow CSV emitted by the pipeline.

Format: a `source,target,weight` header, then one row per observed
transition with a nonnegative numeric weight. Rows with weight zero are
legal but carry no ink, so the reader drops them.
"""

import csv
import math

from .errors import ReportDataError

HEADER = ["source", "target", "weight"]


def read_flows(path):
    """Parse and validate a flows CSV.

    Returns a list of (source, target, weight) with weight > 0, in file
    order. Raises ReportDataError on structural problems: wrong header,
    short rows, non-numeric / negative / non-finite weights, duplicate
    pairs, or no positive flow at all.
    """
    try:
        with open(path, encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise ReportDataError(f"cannot read flows CSV: {e}") from e
    if not rows or rows[0] != HEADER:
        raise ReportDataError(
            f"{path}: expected header {','.join(HEADER)}, "
            f"got {','.join(rows[0]) if rows else 'an empty file'}")
    flows = []
    seen = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise ReportDataError(f"{path}, line {lineno}: expected 3 fields")
        source, target, raw = row[0].strip(), row[1].strip(), row[2].strip()
        if not source or not target:
            raise ReportDataError(f"{path}, line {lineno}: empty state name")
        try:
            weight = float(raw)
        except ValueError:
            raise ReportDataError(
                f"{path}, line {lineno}: weight {raw!r} is not a number")
        if not math.isfinite(weight) or weight < 0:
            raise ReportDataError(
                f"{path}, line {lineno}: weight must be finite and >= 0, "
                f"got {raw}")
        if (source, target) in seen:
            raise ReportDataError(
                f"{path}, line {lineno}: duplicate flow {source} -> {target}")
        seen.add((source, target))
        if weight > 0:
            flows.append((source, target, weight))
    if not flows:
        raise ReportDataError(f"{path}: no positive flows to draw")
    return flows
