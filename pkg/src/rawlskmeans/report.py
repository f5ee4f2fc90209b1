"""Plot data readers and a small deterministic SVG renderer for MAG-LAG plots."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

from .scan import POINT_COLUMNS
from .traverse import TRAJECTORY_COLUMNS

W, H = 640, 640
MARGIN = 70
TRAJ_COLORS = ("#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class PlotPoint:
    mag: float
    lag: float
    overall: float
    label: str = ""


def _read_csv(path, columns: Sequence[str]) -> list[dict]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ReportError(f"{path}:1: empty file")
        missing = [c for c in columns if c not in header]
        if missing:
            raise ReportError(f"{path}:1: missing column(s) {', '.join(missing)}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ReportError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            rec = dict(zip(header, row))
            try:
                for c in ("U0", "U1", "lag", "mag", "overall"):
                    rec[c] = float(rec[c])
            except ValueError:
                raise ReportError(f"{path}:{lineno}: non-numeric utility value") from None
            rows.append(rec)
    return rows


def read_points(path) -> list[PlotPoint]:
    return [PlotPoint(r["mag"], r["lag"], r["overall"], r["seed"]) for r in _read_csv(path, POINT_COLUMNS)]


def read_trajectory(path) -> list[PlotPoint]:
    rows = _read_csv(path, TRAJECTORY_COLUMNS)
    if not rows:
        raise ReportError(f"{path}:2: trajectory has no start row")
    return [PlotPoint(r["mag"], r["lag"], r["overall"], r["iteration"]) for r in rows]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _shade(t: float) -> str:
    # light to dark blue, darker = higher overall utility
    lo, hi = (198, 219, 239), (8, 48, 107)
    c = [round(a + (b - a) * t) for a, b in zip(lo, hi)]
    return "#%02x%02x%02x" % tuple(c)


def _plus(x: float, y: float, color: str, size: float = 9) -> str:
    return (
        f'<path d="M{_fmt(x - size)},{_fmt(y)}H{_fmt(x + size)}M{_fmt(x)},{_fmt(y - size)}'
        f'V{_fmt(y + size)}" stroke="{color}" stroke-width="3"/>'
    )


def render_svg(
    scatter: Sequence[PlotPoint] = (),
    trajectories: Sequence[Sequence[PlotPoint]] = (),
    title: str = "",
) -> str:
    """MAG on x, LAG on y, with the lag = mag reference line.

    Scatter points are shaded by overall utility; the best-overall and best-LAG
    scatter points get blue and olive plus markers. Each trajectory is a
    polyline starting from a ring marker.
    """
    pts = list(scatter) + [p for t in trajectories for p in t]
    if not pts:
        raise ReportError("nothing to plot")
    xs = [p.mag for p in pts]
    ys = [p.lag for p in pts]
    lo = min(min(xs), min(ys))
    hi = max(max(xs), max(ys))
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, (hi - lo) * 1e-3, 1e-9)
    pad = 0.08 * span
    x0, x1, y0, y1 = x0 - pad, x1 + pad, y0 - pad, y1 + pad
    if x1 - x0 < span:
        x1 = x0 + span + 2 * pad
    if y1 - y0 < span:
        y1 = y0 + span + 2 * pad

    def sx(v):
        return MARGIN + (v - x0) / (x1 - x0) * (W - 2 * MARGIN)

    def sy(v):
        return H - MARGIN - (v - y0) / (y1 - y0) * (H - 2 * MARGIN)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<rect x="{MARGIN}" y="{MARGIN}" width="{W - 2 * MARGIN}" height="{H - 2 * MARGIN}" '
        'fill="none" stroke="black"/>',
    ]
    if title:
        out.append(f'<text x="{W // 2}" y="30" text-anchor="middle" font-size="16">{title}</text>')
    for i in range(6):
        vx = x0 + (x1 - x0) * i / 5
        vy = y0 + (y1 - y0) * i / 5
        out.append(f'<text x="{_fmt(sx(vx))}" y="{H - MARGIN + 18}" text-anchor="middle" '
                   f'font-size="10">{vx:.5f}</text>')
        out.append(f'<text x="{MARGIN - 6}" y="{_fmt(sy(vy) + 3)}" text-anchor="end" '
                   f'font-size="10">{vy:.5f}</text>')
    out.append(f'<text x="{W // 2}" y="{H - 20}" text-anchor="middle" font-size="13">MAG utility</text>')
    out.append(f'<text x="20" y="{H // 2}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 20 {H // 2})">LAG utility</text>')

    # lag = mag, clipped to the plot box
    a, b = max(x0, y0), min(x1, y1)
    if a < b:
        out.append(f'<line x1="{_fmt(sx(a))}" y1="{_fmt(sy(a))}" x2="{_fmt(sx(b))}" y2="{_fmt(sy(b))}" '
                   'stroke="red" stroke-dasharray="6,4"/>')

    if scatter:
        ov = [p.overall for p in scatter]
        omin, omax = min(ov), max(ov)
        for p in sorted(scatter, key=lambda q: q.overall):
            t = (p.overall - omin) / (omax - omin) if omax > omin else 1.0
            out.append(f'<circle cx="{_fmt(sx(p.mag))}" cy="{_fmt(sy(p.lag))}" r="3" '
                       f'fill="{_shade(t)}" fill-opacity="0.8"/>')
        util = max(scatter, key=lambda q: q.overall)
        rawls = max(scatter, key=lambda q: q.lag)
        out.append(_plus(sx(util.mag), sy(util.lag), "#1f77b4"))
        out.append(_plus(sx(rawls.mag), sy(rawls.lag), "#808000"))

    for i, traj in enumerate(trajectories):
        color = TRAJ_COLORS[i % len(TRAJ_COLORS)]
        if len(traj) > 1:
            coords = " ".join(f"{_fmt(sx(p.mag))},{_fmt(sy(p.lag))}" for p in traj)
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
            for p in traj[1:]:
                out.append(f'<circle cx="{_fmt(sx(p.mag))}" cy="{_fmt(sy(p.lag))}" r="2" fill="{color}"/>')
        s = traj[0]
        out.append(f'<circle cx="{_fmt(sx(s.mag))}" cy="{_fmt(sy(s.lag))}" r="6" fill="none" '
                   f'stroke="{color}" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
