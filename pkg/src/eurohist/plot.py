"""Minimal self-contained SVG line charts for season series."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .dataset import TimeSeries
from .errors import DomainError

WIDTH, HEIGHT = 960, 540
LEFT, RIGHT, TOP, BOTTOM = 80, 200, 50, 60
PLOT_X0, PLOT_X1 = LEFT, WIDTH - RIGHT
PLOT_Y0, PLOT_Y1 = TOP, HEIGHT - BOTTOM  # y0 is the top edge
_ATTR = {'"': "&quot;"}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def _nice_step(span: float, target: int = 5) -> float:
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 2.5, 5, 10):
        if raw <= mult * mag:
            return mult * mag
    return 10 * mag


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".") if v != 0 else "0"


def value_range(series: Sequence[TimeSeries]) -> tuple[float, float]:
    values = [v for s in series for v in s.values()]
    lo, hi = min(values), max(values)
    if hi == lo:
        pad = max(abs(lo) * 0.05, 1.0)
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.05
    return lo - pad, hi + pad


def render_line_chart(series: Sequence[TimeSeries], labels: Sequence[str],
                      path: str | Path | None = None, title: str = "",
                      y_label: str = "") -> str:
    """Draw one polyline per series against season ordinals; write to ``path`` if given."""
    if len(series) != len(labels):
        raise DomainError("need one label per series")
    drawn = [(s, lab) for s, lab in zip(series, labels) if len(s)]
    if not drawn:
        raise DomainError("nothing to plot: every series is empty")

    ordinals = [o for s, _ in drawn for o in s.ordinals()]
    x_lo, x_hi = min(ordinals), max(ordinals)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    y_lo, y_hi = value_range([s for s, _ in drawn])

    def px(o: float) -> float:
        return PLOT_X0 + (o - x_lo) / (x_hi - x_lo) * (PLOT_X1 - PLOT_X0)

    def py(v: float) -> float:
        return PLOT_Y1 - (v - y_lo) / (y_hi - y_lo) * (PLOT_Y1 - PLOT_Y0)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{WIDTH / 2:.0f}" y="28" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="18">{escape(title)}</text>')
    parts.append(f'<g class="axes" stroke="black" stroke-width="1">'
                 f'<line x1="{PLOT_X0}" y1="{PLOT_Y1}" x2="{PLOT_X1}" y2="{PLOT_Y1}"/>'
                 f'<line x1="{PLOT_X0}" y1="{PLOT_Y0}" x2="{PLOT_X0}" y2="{PLOT_Y1}"/></g>')

    ticks = ['<g class="x-ticks" font-family="sans-serif" font-size="12" text-anchor="middle">']
    first_decade = int(math.ceil(x_lo / 10.0) * 10)
    for o in range(first_decade, int(x_hi) + 1, 10):
        x = px(o)
        ticks.append(f'<line x1="{x:.2f}" y1="{PLOT_Y1}" x2="{x:.2f}" y2="{PLOT_Y1 + 6}" '
                     f'stroke="black"/><text x="{x:.2f}" y="{PLOT_Y1 + 22}">{o}</text>')
    ticks.append("</g>")
    parts.extend(ticks)

    step = _nice_step(y_hi - y_lo)
    yt = ['<g class="y-ticks" font-family="sans-serif" font-size="12" text-anchor="end">']
    v = math.ceil(y_lo / step) * step
    while v <= y_hi + 1e-12:
        y = py(v)
        yt.append(f'<line x1="{PLOT_X0 - 6}" y1="{y:.2f}" x2="{PLOT_X0}" y2="{y:.2f}" '
                  f'stroke="black"/><text x="{PLOT_X0 - 10}" y="{y + 4:.2f}">{_fmt(v)}</text>')
        v += step
    yt.append("</g>")
    parts.extend(yt)
    if y_label:
        parts.append(f'<text x="20" y="{(PLOT_Y0 + PLOT_Y1) / 2:.0f}" font-family="sans-serif" '
                     f'font-size="13" text-anchor="middle" transform="rotate(-90 20 '
                     f'{(PLOT_Y0 + PLOT_Y1) / 2:.0f})">{escape(y_label)}</text>')

    legend = ['<g class="legend" font-family="sans-serif" font-size="13">']
    for i, (s, label) in enumerate(drawn):
        color = COLORS[i % len(COLORS)]
        points = " ".join(f"{px(o):.2f},{py(val):.2f}" for o, val in zip(s.ordinals(), s.values()))
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" '
                     f'data-label="{escape(label, _ATTR)}" points="{points}"/>')
        ly = PLOT_Y0 + 10 + 22 * i
        legend.append(f'<line x1="{PLOT_X1 + 15}" y1="{ly}" x2="{PLOT_X1 + 40}" y2="{ly}" '
                      f'stroke="{color}" stroke-width="2"/>'
                      f'<text x="{PLOT_X1 + 46}" y="{ly + 4}">{escape(label)}</text>')
    legend.append("</g>")
    parts.extend(legend)
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    if path is not None:
        Path(path).write_text(svg, encoding="utf-8")
    return svg
