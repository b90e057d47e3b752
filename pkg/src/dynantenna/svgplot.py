"""Minimal standalone SVG line plots of sweep metrics."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["sweep_svg"]

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
_BER_FLOOR = 1e-6
_LABELS = {"ber": "BER", "evm": "EVM (rms ratio)", "phase": "phase error (deg rms)"}


def _cartesian(series, metric, threshold, title, W=640, H=400, m=55):
    log = metric == "ber"
    x0, x1 = -180.0, 180.0
    if log:
        y0, y1 = math.log10(_BER_FLOOR), 0.0
    else:
        top = max([float(np.max(v)) for _, _, v in series] + [1e-9])
        y0, y1 = 0.0, top * 1.05
    px = lambda x: m + (x - x0) / (x1 - x0) * (W - 2 * m)
    py = lambda y: H - m - (y - y0) / (y1 - y0) * (H - 2 * m)
    tf = (lambda v: math.log10(max(v, _BER_FLOOR))) if log else float

    out = [f'<rect x="{m}" y="{m}" width="{W - 2 * m}" height="{H - 2 * m}" fill="none" stroke="#000"/>']
    for t in range(-180, 181, 60):
        out.append(f'<text x="{px(t):.1f}" y="{H - m + 16}" font-size="11" text-anchor="middle">{t}</text>')
    if log:
        for e in range(int(y0), 1):
            out.append(f'<text x="{m - 6}" y="{py(e) + 4:.1f}" font-size="11" text-anchor="end">1e{e}</text>')
        yt = py(math.log10(threshold))
        out.append(f'<line class="threshold" x1="{m}" y1="{yt:.2f}" x2="{W - m}" y2="{yt:.2f}" '
                   f'stroke="#555" stroke-dasharray="6,4"/>')
    else:
        for f in (0, 0.5, 1):
            v = y0 + f * (y1 - y0)
            out.append(f'<text x="{m - 6}" y="{py(v) + 4:.1f}" font-size="11" text-anchor="end">{v:.3g}</text>')
    out.append(f'<text x="{W / 2}" y="{H - 12}" font-size="12" text-anchor="middle">theta (deg)</text>')
    out.append(f'<text x="14" y="{H / 2}" font-size="12" transform="rotate(-90 14 {H / 2})" '
               f'text-anchor="middle">{escape(_LABELS[metric])}</text>')
    for i, (label, theta, vals) in enumerate(series):
        pts = " ".join(f"{px(t):.2f},{py(tf(v)):.2f}" for t, v in zip(theta, vals))
        out.append(f'<polyline class="series" data-label="{escape(label)}" fill="none" '
                   f'stroke="{_COLORS[i % len(_COLORS)]}" points="{pts}"/>')
        out.append(f'<text x="{W - m - 4}" y="{m + 14 + 14 * i}" font-size="11" text-anchor="end" '
                   f'fill="{_COLORS[i % len(_COLORS)]}">{escape(label)}</text>')
    out.append(f'<text x="{W / 2}" y="{m - 14}" font-size="13" text-anchor="middle">{escape(title)}</text>')
    return W, H, out


def _polar(series, metric, threshold, title, W=480, H=480):
    # radius grows with log BER above the floor, so the recoverable region hugs the centre
    cx, cy, R = W / 2, H / 2 + 10, W / 2 - 50
    log = metric == "ber"
    if log:
        lo = math.log10(_BER_FLOOR)
        rad = lambda v: (math.log10(max(v, _BER_FLOOR)) - lo) / -lo * R
    else:
        top = max([float(np.max(v)) for _, _, v in series] + [1e-9])
        rad = lambda v: v / top * R
    out = [f'<circle cx="{cx}" cy="{cy}" r="{R}" fill="none" stroke="#000"/>']
    if log:
        out.append(f'<circle class="threshold" cx="{cx}" cy="{cy}" r="{rad(threshold):.2f}" '
                   f'fill="none" stroke="#555" stroke-dasharray="6,4"/>')
    for i, (label, theta, vals) in enumerate(series):
        pts = " ".join(
            f"{cx + rad(v) * math.sin(math.radians(t)):.2f},{cy - rad(v) * math.cos(math.radians(t)):.2f}"
            for t, v in zip(theta, vals))
        out.append(f'<polyline class="series" data-label="{escape(label)}" fill="none" '
                   f'stroke="{_COLORS[i % len(_COLORS)]}" points="{pts}"/>')
        out.append(f'<text x="{W - 10}" y="{20 + 14 * i}" font-size="11" text-anchor="end" '
                   f'fill="{_COLORS[i % len(_COLORS)]}">{escape(label)}</text>')
    out.append(f'<text x="10" y="20" font-size="13">{escape(title)}</text>')
    return W, H, out


def sweep_svg(series, metric: str = "ber", threshold: float = 1e-3,
              title: str = "", polar: bool = False) -> str:
    """Render ``[(label, theta_deg, values), ...]`` as an SVG document.

    One ``<polyline class="series">`` is emitted per entry.  BER is drawn
    on a log axis floored at 1e-6 with a dashed line at ``threshold``.
    """
    if metric not in _LABELS:
        raise ValueError(f"metric must be one of {sorted(_LABELS)}")
    W, H, body = (_polar if polar else _cartesian)(series, metric, threshold, title)
    head = (f'<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
            f'viewBox="0 0 {W} {H}">\n<rect width="100%" height="100%" fill="#fff"/>\n')
    return head + "\n".join(body) + "\n</svg>\n"
