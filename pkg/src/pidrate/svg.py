"""Minimal deterministic SVG line charts.

One panel per series, stacked vertically, shared x axis. No styling beyond
axes, a label and min/max ticks.
"""
from __future__ import annotations

from typing import Sequence

WIDTH = 640
PANEL_HEIGHT = 220
MARGIN_LEFT = 70
MARGIN_RIGHT = 20
MARGIN_TOP = 30
MARGIN_BOTTOM = 35
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def line_chart(
    x: Sequence[float],
    series: Sequence[tuple[str, Sequence[float]]],
    x_label: str,
    title: str = "",
) -> str:
    if not x:
        raise ValueError("cannot plot an empty series")
    x_min, x_max = min(x), max(x)
    x_span = (x_max - x_min) or 1.0
    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    height = PANEL_HEIGHT * len(series)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" '
        f'viewBox="0 0 {WIDTH} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if title:
        parts.append(f'<text x="{WIDTH // 2}" y="16" text-anchor="middle" font-size="13">{title}</text>')
    for i, (label, ys) in enumerate(series):
        top = i * PANEL_HEIGHT + MARGIN_TOP
        plot_h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        y_min, y_max = min(ys), max(ys)
        y_span = (y_max - y_min) or 1.0
        pts = " ".join(
            f"{MARGIN_LEFT + (xv - x_min) / x_span * plot_w:.2f},"
            f"{top + plot_h - (yv - y_min) / y_span * plot_h:.2f}"
            for xv, yv in zip(x, ys)
        )
        bottom = top + plot_h
        parts += [
            f'<line x1="{MARGIN_LEFT}" y1="{top}" x2="{MARGIN_LEFT}" y2="{bottom}" stroke="black"/>',
            f'<line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{MARGIN_LEFT + plot_w}" y2="{bottom}" stroke="black"/>',
            f'<text x="{MARGIN_LEFT - 4}" y="{top + 4}" text-anchor="end" font-size="10">{_fmt(y_max)}</text>',
            f'<text x="{MARGIN_LEFT - 4}" y="{bottom}" text-anchor="end" font-size="10">{_fmt(y_min)}</text>',
            f'<text x="{MARGIN_LEFT}" y="{bottom + 14}" font-size="10">{_fmt(x_min)}</text>',
            f'<text x="{MARGIN_LEFT + plot_w}" y="{bottom + 14}" text-anchor="end" font-size="10">{_fmt(x_max)}</text>',
            f'<text x="{MARGIN_LEFT + plot_w // 2}" y="{bottom + 28}" text-anchor="middle" font-size="11">{x_label}</text>',
            f'<text x="{MARGIN_LEFT + 6}" y="{top - 6}" font-size="12">{label}</text>',
            f'<polyline fill="none" stroke="{COLORS[i % len(COLORS)]}" stroke-width="1.5" points="{pts}"/>',
        ]
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
