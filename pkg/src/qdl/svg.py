"""Minimal SVG 1.1 line charts, no plotting dependency."""
from __future__ import annotations

import math
from pathlib import Path

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]
DASHES = ["", "8,4", "2,3", "10,3,2,3"]


def _escape(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    """Round tick positions (1, 2, 5 times a power of ten) covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step + 1e-9) * step
    ticks = []
    x = start
    while x <= hi + step * 1e-9:
        if x >= lo - step * 1e-9:
            ticks.append(round(x, 12))
        x += step
    return ticks


def _label(v: float) -> str:
    return f"{v:.10g}"


def write_line_chart(path, series, title="", x_label="", y_label="", width=800, height=500) -> Path:
    """Write one polyline per ``(name, xs, ys)`` entry of ``series``."""
    left, right, top, bottom = 70, 150, 40, 55
    pw, ph = width - left - right, height - top - bottom
    xs_all = [float(x) for _, xs, _ in series for x in xs]
    ys_all = [float(y) for _, _, ys in series for y in ys if math.isfinite(y)]
    if not xs_all or not ys_all:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(min(ys_all), 0.0), max(ys_all)
    xt, yt = nice_ticks(x0, x1), nice_ticks(y0, y1)
    x0, x1 = min(x0, xt[0]), max(x1, xt[-1])
    y0, y1 = min(y0, yt[0]), max(y1, yt[-1])
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def px(x):
        return left + (x - x0) / (x1 - x0) * pw

    def py(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{left + pw / 2:.1f}" y="24" text-anchor="middle" font-size="16">{_escape(title)}</text>',
    ]
    for t in xt:
        out.append(f'<line x1="{px(t):.2f}" y1="{top}" x2="{px(t):.2f}" y2="{top + ph}" stroke="#eeeeee"/>')
        out.append(
            f'<text x="{px(t):.2f}" y="{top + ph + 18}" text-anchor="middle" font-size="12">{_label(t)}</text>'
        )
    for t in yt:
        out.append(f'<line x1="{left}" y1="{py(t):.2f}" x2="{left + pw}" y2="{py(t):.2f}" stroke="#eeeeee"/>')
        out.append(f'<text x="{left - 8}" y="{py(t) + 4:.2f}" text-anchor="end" font-size="12">{_label(t)}</text>')
    if y0 < 0 < y1:
        out.append(f'<line x1="{left}" y1="{py(0):.2f}" x2="{left + pw}" y2="{py(0):.2f}" stroke="#888888"/>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000000"/>')
    out.append(
        f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="14">{_escape(x_label)}</text>'
    )
    out.append(
        f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 18 {top + ph / 2:.1f})">{_escape(y_label)}</text>'
    )
    for i, (name, xs, ys) in enumerate(series):
        color = COLORS[i % len(COLORS)]
        dash = DASHES[i % len(DASHES)]
        pts = " ".join(f"{px(float(x)):.2f},{py(float(y)):.2f}" for x, y in zip(xs, ys) if math.isfinite(y))
        style = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{style} points="{pts}"/>')
        ly = top + 16 + 20 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 28}" y2="{ly}" stroke="{color}" stroke-width="2"{style}/>')
        out.append(f'<text x="{lx + 34}" y="{ly + 4}" font-size="13">{_escape(name)}</text>')
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
