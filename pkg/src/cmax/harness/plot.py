"""Minimal SVG line chart for sweep results; no plotting dependency."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape


def line_chart_svg(xs, ys, title: str = "", xlabel: str = "", ylabel: str = "",
                   log_x: bool = True, width: int = 480, height: int = 320) -> str:
    """Polyline of ``ys`` against ``xs``; ``None`` values are skipped."""
    pts = [(x, y) for x, y in zip(xs, ys) if y is not None and x is not None]
    left, right, top, bottom = 60, 20, 30, 45
    pw, ph = width - left - right, height - top - bottom
    fx = (lambda v: math.log10(v)) if log_x else (lambda v: v)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
        f'<text x="{left + pw / 2}" y="{height - 8}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{top + ph / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {top + ph / 2})">{escape(ylabel)}</text>',
    ]
    if pts:
        xv = [fx(x) for x, _ in pts]
        yv = [y for _, y in pts]
        x0, x1 = min(xv), max(xv)
        y0, y1 = 0.0, max(yv) * 1.1 or 1.0
        sx = lambda v: left + (pw * (v - x0) / (x1 - x0) if x1 > x0 else pw / 2)
        sy = lambda v: top + ph - ph * (v - y0) / (y1 - y0)
        coords = " ".join(f"{sx(a):.1f},{sy(b):.1f}" for a, b in zip(xv, yv))
        parts.append(f'<polyline points="{coords}" fill="none" stroke="steelblue" stroke-width="2"/>')
        for (x, y), a in zip(pts, xv):
            parts.append(f'<circle cx="{sx(a):.1f}" cy="{sy(y):.1f}" r="3" fill="steelblue"/>')
            parts.append(f'<text x="{sx(a):.1f}" y="{top + ph + 15}" text-anchor="middle" '
                         f'font-size="10">{x:g}</text>')
        for frac in (0.0, 0.5, 1.0):
            v = y0 + frac * (y1 - y0)
            parts.append(f'<text x="{left - 6}" y="{sy(v) + 4:.1f}" text-anchor="end" '
                         f'font-size="10">{v:.0f}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
