"""Two-column Sankey diagram of care-event transition flows.

Sources stack on the left, targets on the right, and every flow becomes a
stroked cubic ribbon whose stroke-width is weight * scale for one global
scale factor, so on-screen width ratios equal weight ratios. The widths
are written verbatim into the SVG (stroke-width and data-weight), which
keeps the figure checkable by parsing rather than by pixel inspection.
"""

from .errors import ReportError
from .flows import read_flows

WIDTH = 960
HEIGHT = 640
MARGIN_TOP = 50
PLOT_H = 540
LEFT_X = 170
RIGHT_X = 790
NODE_W = 14
NODE_GAP = 10

PALETTE = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
]


def _esc(text):
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _stack(names, totals, scale):
    """Top-aligned node layout: name -> (top_y, height)."""
    layout = {}
    y = MARGIN_TOP
    for name in names:
        h = totals[name] * scale
        layout[name] = (y, h)
        y += h + NODE_GAP
    return layout


def render_sankey(flows_csv, out_path):
    """Render a flows CSV to one SVG file and return its path."""
    flows = read_flows(flows_csv)

    sources = list(dict.fromkeys(s for s, _, _ in flows))
    targets = list(dict.fromkeys(t for _, t, _ in flows))
    outflow = {s: 0.0 for s in sources}
    inflow = {t: 0.0 for t in targets}
    for s, t, w in flows:
        outflow[s] += w
        inflow[t] += w
    total = sum(w for _, _, w in flows)

    usable_left = PLOT_H - NODE_GAP * (len(sources) - 1)
    usable_right = PLOT_H - NODE_GAP * (len(targets) - 1)
    if min(usable_left, usable_right) <= 0:
        raise ReportError("too many states to stack in the fixed canvas")
    scale = min(usable_left, usable_right) / total

    left = _stack(sources, outflow, scale)
    right = _stack(targets, inflow, scale)
    color = {s: PALETTE[i % len(PALETTE)] for i, s in enumerate(sources)}

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        '<text x="480" y="28" text-anchor="middle" '
        'font-family="sans-serif" font-size="17" fill="#333">'
        "Care-event transitions</text>",
    ]

    # ribbons first so node bars draw on top of their anchor points
    out_cursor = {s: left[s][0] for s in sources}
    in_cursor = {t: right[t][0] for t in targets}
    mid = (LEFT_X + RIGHT_X) / 2.0
    for s, t, w in flows:
        sw = w * scale
        y0 = out_cursor[s] + sw / 2.0
        y1 = in_cursor[t] + sw / 2.0
        out_cursor[s] += sw
        in_cursor[t] += sw
        parts.append(
            f'<path class="flow" d="M {LEFT_X} {y0:.3f} C {mid} {y0:.3f}, '
            f'{mid} {y1:.3f}, {RIGHT_X} {y1:.3f}" fill="none" '
            f'stroke="{color[s]}" stroke-opacity="0.5" stroke-width="{sw!r}" '
            f'data-source="{_esc(s)}" data-target="{_esc(t)}" '
            f'data-weight="{w!r}"/>')

    for name in sources:
        y, h = left[name]
        parts.append(
            f'<rect class="node" x="{LEFT_X - NODE_W}" y="{y:.3f}" '
            f'width="{NODE_W}" height="{max(h, 1.0):.3f}" '
            f'fill="{color[name]}"/>')
        parts.append(
            f'<text x="{LEFT_X - NODE_W - 6}" y="{y + h / 2.0 + 4:.3f}" '
            f'text-anchor="end" font-family="sans-serif" font-size="13" '
            f'fill="#333">{_esc(name)}</text>')
    for i, name in enumerate(targets):
        y, h = right[name]
        parts.append(
            f'<rect class="node" x="{RIGHT_X}" y="{y:.3f}" '
            f'width="{NODE_W}" height="{max(h, 1.0):.3f}" '
            f'fill="{PALETTE[i % len(PALETTE)]}"/>')
        parts.append(
            f'<text x="{RIGHT_X + NODE_W + 6}" y="{y + h / 2.0 + 4:.3f}" '
            f'text-anchor="start" font-family="sans-serif" font-size="13" '
            f'fill="#333">{_esc(name)}</text>')

    parts.append("</svg>")
    with open(out_path, "w", encoding="utf-8") as f:
        f.write("\n".join(parts) + "\n")
    return out_path
