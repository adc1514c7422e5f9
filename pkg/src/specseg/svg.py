"""Minimal SVG line plots for diagnostic figures."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

__all__ = ["line_plot"]

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 640, 400
_PAD_L, _PAD_R, _PAD_T, _PAD_B = 70, 150, 40, 50


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def line_plot(series, title: str = "", xlabel: str = "", ylabel: str = "", log_y: bool = False) -> str:
    """Render ``{name: (xs, ys)}`` as polylines on shared axes.

    With ``log_y`` non-positive values are dropped from their polyline.
    """
    pts = {}
    for name, (xs, ys) in series.items():
        pairs = [(float(x), float(y)) for x, y in zip(xs, ys) if math.isfinite(y)]
        if log_y:
            pairs = [(x, math.log10(y)) for x, y in pairs if y > 0]
        pts[name] = pairs
    all_x = [x for p in pts.values() for x, _ in p] or [0.0, 1.0]
    all_y = [y for p in pts.values() for _, y in p] or [0.0, 1.0]
    x0, x1 = min(all_x), max(all_x)
    y0, y1 = min(all_y), max(all_y)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pw = _W - _PAD_L - _PAD_R
    ph = _H - _PAD_T - _PAD_B

    def sx(x):
        return _PAD_L + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return _PAD_T + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{_PAD_L}" y1="{_PAD_T + ph}" x2="{_PAD_L + pw}" y2="{_PAD_T + ph}" stroke="black"/>',
        f'<line x1="{_PAD_L}" y1="{_PAD_T}" x2="{_PAD_L}" y2="{_PAD_T + ph}" stroke="black"/>',
    ]
    for i in range(5):
        fx = x0 + (x1 - x0) * i / 4
        fy = y0 + (y1 - y0) * i / 4
        ylab = _fmt(10 ** fy) if log_y else _fmt(fy)
        out.append(f'<text x="{sx(fx):.1f}" y="{_PAD_T + ph + 16}" text-anchor="middle">{_fmt(fx)}</text>')
        out.append(f'<text x="{_PAD_L - 6}" y="{sy(fy) + 4:.1f}" text-anchor="end">{ylab}</text>')
    out.append(f'<text x="{_PAD_L + pw / 2:.1f}" y="{_H - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{_PAD_T + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_PAD_T + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for i, (name, pairs) in enumerate(pts.items()):
        color = _COLORS[i % len(_COLORS)]
        if pairs:
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pairs)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = _PAD_T + 14 + 18 * i
        lx = _PAD_L + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 20}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
