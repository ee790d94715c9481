"""Minimal deterministic SVG line plots.

Polyline axes, ticks and a legend; no external plotting dependency and no
timestamp metadata, so re-rendering the same data is byte-identical.
NaN samples break a polyline into separate segments, which is how sweeps
represent frequencies where no design exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
            "#8c564b", "#17becf", "#7f7f7f"]


@dataclass(frozen=True)
class Series:
    name: str
    x: np.ndarray
    y: np.ndarray
    dash: str = ""  # e.g. "6,3" for dashed


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _ticks(lo: float, hi: float, n: int = 5):
    if not math.isfinite(lo) or not math.isfinite(hi) or lo == hi:
        lo, hi = lo - 0.5, hi + 0.5
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * abs(step):
        out.append(0.0 if abs(t) < 1e-12 * abs(step) else t)
        t += step
    return out


def line_plot(series: list[Series], title: str, xlabel: str, ylabel: str,
              width: int = 720, height: int = 480) -> str:
    ml, mr, mt, mb = 64, 16, 36, 48
    pw, ph = width - ml - mr, height - mt - mb

    xs = np.concatenate([np.asarray(s.x, dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s.y, dtype=float) for s in series])
    xs = xs[np.isfinite(xs)]
    ys = ys[np.isfinite(ys)]
    if xs.size == 0 or ys.size == 0:
        xs, ys = np.array([0.0, 1.0]), np.array([0.0, 1.0])
    x0, x1 = float(np.min(xs)), float(np.max(xs))
    y0, y1 = float(np.min(ys)), float(np.max(ys))
    if x0 == x1:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y0 == y1:
        y0, y1 = y0 - 0.5, y1 + 0.5
    ypad = 0.05 * (y1 - y0)
    y0, y1 = y0 - ypad, y1 + ypad

    def px(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def py(y):
        return mt + ph - (y - y0) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#333" stroke-width="1"/>',
    ]

    for t in _ticks(x0, x1):
        if x0 <= t <= x1:
            xp = px(t)
            parts.append(f'<line x1="{xp:.2f}" y1="{mt + ph}" x2="{xp:.2f}" '
                         f'y2="{mt + ph + 5}" stroke="#333"/>')
            parts.append(f'<text x="{xp:.2f}" y="{mt + ph + 18}" '
                         f'text-anchor="middle" font-family="sans-serif" '
                         f'font-size="11">{_fmt(t)}</text>')
    for t in _ticks(y0, y1):
        if y0 <= t <= y1:
            yp = py(t)
            parts.append(f'<line x1="{ml - 5}" y1="{yp:.2f}" x2="{ml}" '
                         f'y2="{yp:.2f}" stroke="#333"/>')
            parts.append(f'<text x="{ml - 8}" y="{yp + 4:.2f}" '
                         f'text-anchor="end" font-family="sans-serif" '
                         f'font-size="11">{_fmt(t)}</text>')
    parts.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 10}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12">{xlabel}</text>')
    parts.append(f'<text x="16" y="{mt + ph / 2:.1f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 16 {mt + ph / 2:.1f})">{ylabel}</text>')

    for i, s in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        x = np.asarray(s.x, dtype=float)
        y = np.asarray(s.y, dtype=float)
        ok = np.isfinite(x) & np.isfinite(y)
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        # split into contiguous finite runs
        start = None
        for j in range(x.size + 1):
            if j < x.size and ok[j]:
                if start is None:
                    start = j
            elif start is not None:
                pts = " ".join(f"{px(x[m]):.2f},{py(y[m]):.2f}"
                               for m in range(start, j))
                parts.append(f'<polyline points="{pts}" fill="none" '
                             f'stroke="{color}" stroke-width="1.5"{dash}/>')
                start = None

    ly = mt + 10
    for i, s in enumerate(series):
        color = _PALETTE[i % len(_PALETTE)]
        dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
        parts.append(f'<line x1="{ml + pw - 150}" y1="{ly}" '
                     f'x2="{ml + pw - 120}" y2="{ly}" stroke="{color}" '
                     f'stroke-width="1.5"{dash}/>')
        parts.append(f'<text x="{ml + pw - 114}" y="{ly + 4}" '
                     f'font-family="sans-serif" font-size="11">{s.name}</text>')
        ly += 16

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
