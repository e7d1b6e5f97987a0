"""Bare-bones SVG line charts, enough to eyeball the CSV outputs."""

from __future__ import annotations

import math
from typing import Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

Series = Tuple[str, Sequence[float], Sequence[float]]

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]
W, H = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 50


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        return [10.0 ** e for e in range(math.floor(lo), math.ceil(hi) + 1)]
    return list(np.linspace(lo, hi, 5))


def line_chart(path, series: Sequence[Series], title: str = "", xlabel: str = "",
               ylabel: str = "", logx: bool = False, logy: bool = False) -> None:
    """Write ``series`` (label, x, y) as polylines to an SVG file.

    Non-positive values are dropped from log axes.
    """
    prepared = []
    for label, x, y in series:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if logx:
            keep &= x > 0
        if logy:
            keep &= y > 0
        x, y = x[keep], y[keep]
        if logx:
            x = np.log10(x)
        if logy:
            y = np.log10(y)
        prepared.append((label, x, y))
    xs = np.concatenate([p[1] for p in prepared]) if prepared else np.array([0.0, 1.0])
    ys = np.concatenate([p[2] for p in prepared]) if prepared else np.array([0.0, 1.0])
    if xs.size == 0:
        xs = ys = np.array([0.0, 1.0])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys.min()), float(ys.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5

    def px(v):
        return LEFT + (v - x0) / (x1 - x0) * (W - LEFT - RIGHT)

    def py(v):
        return H - BOTTOM - (v - y0) / (y1 - y0) * (H - TOP - BOTTOM)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<line x1="{LEFT}" y1="{H - BOTTOM}" x2="{W - RIGHT}" y2="{H - BOTTOM}" stroke="black"/>',
           f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{H - BOTTOM}" stroke="black"/>']
    for v in _ticks(x0, x1, logx):
        pos = math.log10(v) if logx else v
        if x0 - 1e-12 <= pos <= x1 + 1e-12:
            out.append(f'<text x="{px(pos):.1f}" y="{H - BOTTOM + 16}" '
                       f'text-anchor="middle">{v:.3g}</text>')
    for v in _ticks(y0, y1, logy):
        pos = math.log10(v) if logy else v
        if y0 - 1e-12 <= pos <= y1 + 1e-12:
            out.append(f'<text x="{LEFT - 6}" y="{py(pos) + 4:.1f}" '
                       f'text-anchor="end">{v:.3g}</text>')
    out.append(f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{H / 2}" text-anchor="middle" '
               f'transform="rotate(-90 16 {H / 2})">{escape(ylabel)}</text>')
    for k, (label, x, y) in enumerate(prepared):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = TOP + 14 * k + 6
        out.append(f'<line x1="{W - 170}" y1="{ly}" x2="{W - 150}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{W - 145}" y="{ly + 4}">{escape(label)}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
