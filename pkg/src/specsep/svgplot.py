"""Minimal static SVG output: polylines and histograms, no dependencies."""

from __future__ import annotations

import html
from typing import Sequence

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN = 56
COLORS = ("#1f4e9c", "#c0392b", "#27864a", "#8e44ad", "#d68910")


def _frame(x0, x1, y0, y1, title, xlabel, ylabel, ox=0, oy=0, w=WIDTH, h=HEIGHT) -> list[str]:
    px0, px1 = ox + MARGIN, ox + w - MARGIN / 2
    py0, py1 = oy + h - MARGIN, oy + MARGIN / 2
    out = [
        f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" height="{py0 - py1}" fill="none" stroke="#444"/>',
        f'<text x="{(px0 + px1) / 2}" y="{oy + 18}" text-anchor="middle" font-size="14">{html.escape(title)}</text>',
        f'<text x="{(px0 + px1) / 2}" y="{oy + h - 14}" text-anchor="middle" font-size="12">{html.escape(xlabel)}</text>',
        f'<text x="{ox + 14}" y="{(py0 + py1) / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 {ox + 14} {(py0 + py1) / 2})">{html.escape(ylabel)}</text>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv = x0 + frac * (x1 - x0)
        yv = y0 + frac * (y1 - y0)
        out.append(f'<text x="{px0 + frac * (px1 - px0)}" y="{py0 + 16}" text-anchor="middle" font-size="10">{xv:.4g}</text>')
        out.append(f'<text x="{px0 - 4}" y="{py0 - frac * (py0 - py1) + 3}" text-anchor="end" font-size="10">{yv:.4g}</text>')
    return out


def _mapper(x0, x1, y0, y1, ox=0, oy=0, w=WIDTH, h=HEIGHT):
    px0, px1 = ox + MARGIN, ox + w - MARGIN / 2
    py0, py1 = oy + h - MARGIN, oy + MARGIN / 2
    sx = (px1 - px0) / ((x1 - x0) or 1.0)
    sy = (py0 - py1) / ((y1 - y0) or 1.0)
    return lambda x, y: (px0 + (x - x0) * sx, py0 - (y - y0) * sy)


def _document(body: list[str], metadata: str, width=WIDTH, height=HEIGHT) -> str:
    return "\n".join(
        [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
            f"<metadata>{html.escape(metadata)}</metadata>",
            '<rect width="100%" height="100%" fill="white"/>',
            *body,
            "</svg>",
            "",
        ]
    )


def line_plot(series: Sequence[tuple[str, np.ndarray, np.ndarray]], title: str, xlabel: str, ylabel: str, metadata: str = "") -> str:
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = min(0.0, float(ys.min())), float(ys.max()) * 1.05 or 1.0
    body = _frame(x0, x1, y0, y1, title, xlabel, ylabel)
    to_px = _mapper(x0, x1, y0, y1)
    for k, (label, x, y) in enumerate(series):
        pts = " ".join("{:.2f},{:.2f}".format(*to_px(a, b)) for a, b in zip(x, y))
        color = COLORS[k % len(COLORS)]
        body.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        body.append(f'<text x="{WIDTH - MARGIN}" y="{MARGIN + 14 * k}" text-anchor="end" font-size="11" fill="{color}">{html.escape(label)}</text>')
    return _document(body, metadata)


def histogram_panels(
    panels: Sequence[tuple[str, np.ndarray, tuple[np.ndarray, np.ndarray] | None]],
    bins: int = 60,
    xlabel: str = "eigenvalue",
    metadata: str = "",
) -> str:
    """One density-normalized histogram per panel, optional overlay curve ``(x, f)``."""
    h = HEIGHT // 1.25
    total_h = int(h * len(panels))
    body: list[str] = []
    for k, (title, values, curve) in enumerate(panels):
        values = np.asarray(values, float)
        counts, edges = np.histogram(values, bins=bins, density=True)
        x0, x1 = float(edges[0]), float(edges[-1])
        ymax = float(counts.max())
        if curve is not None:
            ymax = max(ymax, float(np.max(curve[1])))
        oy = k * h
        body += _frame(x0, x1, 0.0, ymax * 1.05, title, xlabel, "density", oy=oy, h=h)
        to_px = _mapper(x0, x1, 0.0, ymax * 1.05, oy=oy, h=h)
        for c, a, b in zip(counts, edges[:-1], edges[1:]):
            (xa, ya), (xb, yb) = to_px(a, c), to_px(b, 0.0)
            body.append(f'<rect x="{xa:.2f}" y="{ya:.2f}" width="{max(xb - xa, 0.5):.2f}" height="{yb - ya:.2f}" fill="#9db4d9" stroke="none"/>')
        if curve is not None:
            cx, cy = curve
            keep = (cx >= x0) & (cx <= x1)
            pts = " ".join("{:.2f},{:.2f}".format(*to_px(a, b)) for a, b in zip(cx[keep], cy[keep]))
            body.append(f'<polyline points="{pts}" fill="none" stroke="{COLORS[1]}" stroke-width="1.5"/>')
    return _document(body, metadata, height=total_h)
