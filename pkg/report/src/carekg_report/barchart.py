"""Grouped bar charts of experiment metrics, one SVG per experiment.

Each cell of an experiment (model x representation) becomes a group on
the x axis; within a group there is one bar per metric, drawn at height
mean * Y_SCALE pixels with an error bar spanning mean +- std. Heights and
error-bar endpoints are written to the SVG at full float precision, so
tests can verify the encoding without rasterizing anything.
"""

import json
import math
import os
import re

from .errors import ReportDataError
from .sankey import PALETTE

Y_SCALE = 260.0
HEADROOM = 1.15
MARGIN_TOP = 52
MARGIN_BOTTOM = 100
MARGIN_LEFT = 64
LEGEND_W = 150
BAR_W = 16
BAR_GAP = 4
GROUP_GAP = 28


def _is_num(x):
    return isinstance(x, (int, float)) and not isinstance(x, bool) \
        and math.isfinite(x)


def read_summary(path):
    """Parse and validate an experiment summary JSON.

    Returns the parsed document. Raises ReportDataError when the file is
    missing, is not JSON, or strays from the documented shape: a list of
    uniquely named experiments, each with cells carrying one consistent
    set of metrics with finite means in [0, 1] and stds >= 0.
    """
    try:
        with open(path, encoding="utf-8") as f:
            doc = json.load(f)
    except OSError as e:
        raise ReportDataError(f"cannot read summary JSON: {e}") from e
    except json.JSONDecodeError as e:
        raise ReportDataError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(doc, dict) or not isinstance(doc.get("experiments"), list):
        raise ReportDataError(f"{path}: expected an object with 'experiments'")
    if not doc["experiments"]:
        raise ReportDataError(f"{path}: no experiments to chart")
    names = set()
    for exp in doc["experiments"]:
        name = exp.get("name") if isinstance(exp, dict) else None
        if not isinstance(name, str) or not name:
            raise ReportDataError(f"{path}: experiment without a name")
        if name in names:
            raise ReportDataError(f"{path}: duplicate experiment {name!r}")
        names.add(name)
        cells = exp.get("cells")
        if not isinstance(cells, list) or not cells:
            raise ReportDataError(f"{path}: experiment {name!r} has no cells")
        metric_keys = None
        for cell in cells:
            if not isinstance(cell, dict) or not isinstance(cell.get("model"), str) \
                    or not isinstance(cell.get("kg_variant"), str):
                raise ReportDataError(
                    f"{path}: {name!r} cell missing model/kg_variant")
            metrics = cell.get("metrics")
            if not isinstance(metrics, dict) or not metrics:
                raise ReportDataError(
                    f"{path}: {name!r} cell {cell['model']!r} has no metrics")
            if metric_keys is None:
                metric_keys = list(metrics)
            elif list(metrics) != metric_keys:
                raise ReportDataError(
                    f"{path}: {name!r} cells disagree on metric names")
            for metric, ms in metrics.items():
                if not isinstance(ms, dict) or not _is_num(ms.get("mean")) \
                        or not _is_num(ms.get("std")):
                    raise ReportDataError(
                        f"{path}: {name!r} metric {metric!r} needs numeric "
                        "mean and std")
                if not 0.0 <= ms["mean"] <= 1.0 + 1e-9 or ms["std"] < 0.0:
                    raise ReportDataError(
                        f"{path}: {name!r} metric {metric!r} out of range: "
                        f"mean={ms['mean']}, std={ms['std']}")
    return doc


def _slug(name):
    return re.sub(r"[^A-Za-z0-9_-]+", "-", name).strip("-") or "experiment"


def _chart(exp):
    cells = exp["cells"]
    metrics = list(cells[0]["metrics"])
    group_w = len(metrics) * BAR_W + (len(metrics) - 1) * BAR_GAP
    plot_w = len(cells) * group_w + (len(cells) - 1) * GROUP_GAP
    width = MARGIN_LEFT + plot_w + GROUP_GAP + LEGEND_W
    y_base = MARGIN_TOP + HEADROOM * Y_SCALE
    height = y_base + MARGIN_BOTTOM
    color = {m: PALETTE[i % len(PALETTE)] for i, m in enumerate(metrics)}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
        f'<text x="{MARGIN_LEFT}" y="30" font-family="sans-serif" '
        f'font-size="16" fill="#333">{exp["name"]}</text>',
    ]
    for tick in range(6):
        v = tick / 5.0
        y = y_base - v * Y_SCALE
        parts.append(
            f'<line x1="{MARGIN_LEFT}" y1="{y:.3f}" '
            f'x2="{MARGIN_LEFT + plot_w}" y2="{y:.3f}" stroke="#ddd"/>')
        parts.append(
            f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.3f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11" fill="#666">{v:.1f}</text>')

    x = float(MARGIN_LEFT)
    for cell in cells:
        label = f'{cell["model"]} @ {cell["kg_variant"]}'
        parts.append(f'<g class="cellgroup" data-model="{cell["model"]}" '
                     f'data-variant="{cell["kg_variant"]}">')
        bx = x
        for metric in metrics:
            ms = cell["metrics"][metric]
            h = ms["mean"] * Y_SCALE
            top = y_base - (ms["mean"] + ms["std"]) * Y_SCALE
            bot = y_base - max(ms["mean"] - ms["std"], 0.0) * Y_SCALE
            cx = bx + BAR_W / 2.0
            parts.append(
                f'<rect class="bar" x="{bx:.3f}" y="{y_base - h!r}" '
                f'width="{BAR_W}" height="{h!r}" fill="{color[metric]}" '
                f'data-metric="{metric}" data-mean="{ms["mean"]!r}"/>')
            parts.append(
                f'<g class="errbar" data-metric="{metric}">'
                f'<line x1="{cx:.3f}" y1="{top!r}" x2="{cx:.3f}" y2="{bot!r}" '
                f'stroke="#333"/>'
                f'<line x1="{cx - 5:.3f}" y1="{top!r}" x2="{cx + 5:.3f}" '
                f'y2="{top!r}" stroke="#333"/>'
                f'<line x1="{cx - 5:.3f}" y1="{bot!r}" x2="{cx + 5:.3f}" '
                f'y2="{bot!r}" stroke="#333"/></g>')
            bx += BAR_W + BAR_GAP
        parts.append("</g>")
        cx_mid = x + group_w / 2.0
        parts.append(
            f'<text x="{cx_mid:.3f}" y="{y_base + 16:.3f}" '
            f'font-family="sans-serif" font-size="11" fill="#333" '
            f'text-anchor="end" transform="rotate(-35 {cx_mid:.3f} '
            f'{y_base + 16:.3f})">{label}</text>')
        x += group_w + GROUP_GAP

    parts.append(
        f'<line x1="{MARGIN_LEFT}" y1="{y_base:.3f}" '
        f'x2="{MARGIN_LEFT + plot_w}" y2="{y_base:.3f}" stroke="#333"/>')
    lx = MARGIN_LEFT + plot_w + GROUP_GAP
    for i, metric in enumerate(metrics):
        ly = MARGIN_TOP + 14 * i
        parts.append(f'<rect x="{lx}" y="{ly}" width="10" height="10" '
                     f'fill="{color[metric]}"/>')
        parts.append(f'<text x="{lx + 15}" y="{ly + 9}" '
                     f'font-family="sans-serif" font-size="11" '
                     f'fill="#333">{metric}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_metrics(summary_json, out_dir):
    """Render one chart per experiment; returns the written paths."""
    doc = read_summary(summary_json)
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for exp in doc["experiments"]:
        path = os.path.join(out_dir, f"metrics_{_slug(exp['name'])}.svg")
        with open(path, "w", encoding="utf-8") as f:
            f.write(_chart(exp))
        paths.append(path)
    return paths
