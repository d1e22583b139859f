"""Minimal static SVG line charts.

The CSV files are the source of truth; these plots are a convenience, so they
are rendered directly without a plotting dependency.
"""

from __future__ import annotations

import math

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _ticks(lo, hi, n=5):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / n))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= n:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(t)
        t += step
    return ticks


def write_line_svg(path, xs, ys, title, xlabel, ylabel, logy=False):
    """Write one polyline chart; non-finite and non-positive-on-log points are dropped."""
    pts = [
        (x, y)
        for x, y in zip(xs, ys)
        if math.isfinite(x) and math.isfinite(y) and (not logy or y > 0)
    ]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W/2}" y="20" text-anchor="middle" font-size="14">{title}</text>',
    ]
    if not pts:
        parts.append(
            f'<text x="{_W/2}" y="{_H/2}" text-anchor="middle">no plottable data</text></svg>'
        )
        with open(path, "w") as fh:
            fh.write("\n".join(parts))
        return

    pxs = [p[0] for p in pts]
    pys = [math.log10(p[1]) for p in pts] if logy else [p[1] for p in pts]
    x0, x1 = min(pxs), max(pxs)
    y0, y1 = min(pys), max(pys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    iw = _W - _ML - _MR
    ih = _H - _MT - _MB

    def sx(x):
        return _ML + (x - x0) / (x1 - x0) * iw

    def sy(y):
        return _MT + ih - (y - y0) / (y1 - y0) * ih

    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{iw}" height="{ih}" fill="none" stroke="#999"/>'
    )
    for t in _ticks(x0, x1):
        parts.append(
            f'<line x1="{sx(t):.1f}" y1="{_MT + ih}" x2="{sx(t):.1f}" y2="{_MT + ih + 4}" stroke="#333"/>'
            f'<text x="{sx(t):.1f}" y="{_MT + ih + 18}" text-anchor="middle">{t:.4g}</text>'
        )
    for t in _ticks(y0, y1):
        label = f"1e{t:.0f}" if logy else f"{t:.4g}"
        parts.append(
            f'<line x1="{_ML - 4}" y1="{sy(t):.1f}" x2="{_ML}" y2="{sy(t):.1f}" stroke="#333"/>'
            f'<text x="{_ML - 8}" y="{sy(t):.1f}" text-anchor="end" dominant-baseline="middle">{label}</text>'
        )
    path_d = " ".join(
        f"{'M' if k == 0 else 'L'}{sx(x):.2f},{sy(y):.2f}"
        for k, (x, y) in enumerate(zip(pxs, pys))
    )
    parts.append(f'<path d="{path_d}" fill="none" stroke="#1f6fb2" stroke-width="1.5"/>')
    parts.append(
        f'<text x="{_ML + iw / 2}" y="{_H - 10}" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="18" y="{_MT + ih / 2}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_MT + ih / 2})">{ylabel}</text>'
    )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
