"""Minimal deterministic SVG plotter for reports and point-cloud views.

No plotting dependency: output is plain SVG 1.1 text whose bytes depend
only on the data (plus an optional generation-time comment).
"""

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#555555")


@dataclass
class Series:
    x: list
    y: list
    label: str = ""
    color: str = None
    dash: str = None  # e.g. "6,3"
    marker: str = None  # "circle" | "diamond" | "square"
    line: bool = True


@dataclass
class Figure:
    width: int = 720
    height: int = 480
    margin: tuple = (64, 16, 28, 52)  # left, right, top, bottom
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logy: bool = False
    series: list = field(default_factory=list)

    def add(self, series):
        self.series.append(series)


def _fmt(v):
    return f"{v:.6g}"


def _nice_ticks(lo, hi, target=6):
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _log_ticks(lo, hi):
    d0 = math.floor(math.log10(lo))
    d1 = math.ceil(math.log10(hi))
    return [10.0**d for d in range(int(d0), int(d1) + 1) if lo <= 10.0**d <= hi]


def _marker_svg(shape, x, y, color):
    if shape == "circle":
        return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3.5" fill="{color}"/>'
    if shape == "square":
        return f'<rect x="{x - 3:.2f}" y="{y - 3:.2f}" width="6" height="6" fill="{color}"/>'
    pts = f"{x:.2f},{y - 4.2:.2f} {x + 4.2:.2f},{y:.2f} {x:.2f},{y + 4.2:.2f} {x - 4.2:.2f},{y:.2f}"
    return f'<polygon points="{pts}" fill="{color}"/>'


def render_figure(fig, timestamp=True):
    """Render a Figure to an SVG string."""
    ml, mr, mt, mb = fig.margin
    pw = fig.width - ml - mr
    ph = fig.height - mt - mb

    xs = [x for s in fig.series for x in s.x]
    ys = [y for s in fig.series for y in s.y if math.isfinite(y)]
    if fig.logy:
        ys = [y for y in ys if y > 0]
    if not xs or not ys:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if fig.logy:
        y0 = max(y0, 1e-12)
        if y1 <= y0:
            y1 = y0 * 10
        ly0, ly1 = math.log10(y0), math.log10(y1)
        pad = 0.05 * (ly1 - ly0) or 0.5
        ly0 -= pad
        ly1 += pad

        def ty(v):
            return mt + ph * (1 - (math.log10(v) - ly0) / (ly1 - ly0))

        yticks = _log_ticks(10**ly0, 10**ly1)
    else:
        pad = 0.06 * (y1 - y0) or 1.0
        y0 -= pad
        y1 += pad

        def ty(v):
            return mt + ph * (1 - (v - y0) / (y1 - y0))

        yticks = _nice_ticks(y0, y1)
    xpad = 0.04 * (x1 - x0)
    x0 -= xpad
    x1 += xpad

    def tx(v):
        return ml + pw * (v - x0) / (x1 - x0)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{fig.width}" '
        f'height="{fig.height}" viewBox="0 0 {fig.width} {fig.height}">',
    ]
    if timestamp:
        now = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        out.append(f"<!-- generated {now} -->")
    out.append(f'<rect width="{fig.width}" height="{fig.height}" fill="white"/>')
    if fig.title:
        out.append(
            f'<text x="{fig.width / 2:.1f}" y="{mt - 9}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{fig.title}</text>'
        )
    # grid + ticks
    for v in _nice_ticks(x0, x1):
        px = tx(v)
        out.append(
            f'<line x1="{px:.2f}" y1="{mt}" x2="{px:.2f}" y2="{mt + ph}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px:.2f}" y="{mt + ph + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(v)}</text>'
        )
    for v in yticks:
        py = ty(v)
        out.append(
            f'<line x1="{ml}" y1="{py:.2f}" x2="{ml + pw}" y2="{py:.2f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{ml - 6}" y="{py + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(v)}</text>'
        )
    out.append(
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#333333"/>'
    )
    if fig.xlabel:
        out.append(
            f'<text x="{ml + pw / 2:.1f}" y="{fig.height - 10}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{fig.xlabel}</text>'
        )
    if fig.ylabel:
        cx, cy = 16, mt + ph / 2
        out.append(
            f'<text x="{cx}" y="{cy:.1f}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" '
            f'transform="rotate(-90 {cx} {cy:.1f})">{fig.ylabel}</text>'
        )

    legend_items = []
    for i, s in enumerate(fig.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        pts = [
            (tx(px), ty(py))
            for px, py in zip(s.x, s.y)
            if math.isfinite(py) and (not fig.logy or py > 0)
        ]
        if s.line and len(pts) > 1:
            path = " ".join(f"{px:.2f},{py:.2f}" for px, py in pts)
            dash = f' stroke-dasharray="{s.dash}"' if s.dash else ""
            out.append(
                f'<polyline points="{path}" fill="none" stroke="{color}" '
                f'stroke-width="1.8"{dash}/>'
            )
        if s.marker:
            for px, py in pts:
                out.append(_marker_svg(s.marker, px, py, color))
        if s.label:
            legend_items.append((s.label, color, s.dash, s.marker))
    for j, (label, color, dash, marker) in enumerate(legend_items):
        ly = mt + 14 + 18 * j
        lx = ml + pw - 150
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 26}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.8"{dash_attr}/>'
        )
        if marker:
            out.append(_marker_svg(marker, lx + 13, ly - 4, color))
        out.append(
            f'<text x="{lx + 32}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def birdseye_svg(points_xz, grid_spacing=1.0, size=640, title="", timestamp=True):
    """Top-down (x, z) scatter of a point cloud with a metric grid.

    Equal-aspect axes; ``grid_spacing`` is in meters (1.0 or 2.5 are the
    usual choices).
    """
    xs = [p[0] for p in points_xz]
    zs = [p[1] for p in points_xz]
    if not xs:
        xs, zs = [0.0], [1.0]
    x0, x1 = min(xs), max(xs)
    z0, z1 = min(zs), max(zs)
    x0 = min(x0, -grid_spacing) - 0.5
    x1 = max(x1, grid_spacing) + 0.5
    z0 = min(z0, 0.0)
    z1 = z1 + 0.5
    span = max(x1 - x0, z1 - z0)
    margin = 34
    scale = (size - 2 * margin) / span

    def px(x):
        return margin + (x - x0) * scale

    def pz(z):
        return size - margin - (z - z0) * scale

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    if timestamp:
        now = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        out.append(f"<!-- generated {now} -->")
    out.append(f'<rect width="{size}" height="{size}" fill="white"/>')
    if title:
        out.append(
            f'<text x="{size / 2}" y="18" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{title}</text>'
        )
    gx = math.ceil(x0 / grid_spacing) * grid_spacing
    while gx <= x1:
        out.append(
            f'<line x1="{px(gx):.2f}" y1="{margin}" x2="{px(gx):.2f}" '
            f'y2="{size - margin}" stroke="#cccccc" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{px(gx):.2f}" y="{size - margin + 14}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{_fmt(gx)}</text>'
        )
        gx += grid_spacing
    gz = math.ceil(z0 / grid_spacing) * grid_spacing
    while gz <= z1:
        out.append(
            f'<line x1="{margin}" y1="{pz(gz):.2f}" x2="{size - margin}" '
            f'y2="{pz(gz):.2f}" stroke="#cccccc" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{margin - 4}" y="{pz(gz) + 3:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_fmt(gz)}</text>'
        )
        gz += grid_spacing
    for x, z in points_xz:
        out.append(f'<circle cx="{px(x):.2f}" cy="{pz(z):.2f}" r="1" fill="#1f77b4"/>')
    out.append(
        f'<text x="{size / 2}" y="{size - 4}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">x (m)</text>'
    )
    out.append(
        f'<text x="12" y="{size / 2}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="11" transform="rotate(-90 12 {size / 2})">z (m)</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
