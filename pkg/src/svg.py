"""Self-contained SVG charts for time series, heatmaps and dividing lines."""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.analysis import ContourSet, HeatmapData, InflowCurve
from src.dynamics import TimeSeries

WIDTH, HEIGHT = 640, 440
MARGIN = {"left": 64, "right": 120, "top": 36, "bottom": 52}

SERIES_COLOURS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]
LEVEL_COLOURS = {0.1: "purple", 0.5: "green", 0.9: "red"}
EXTRA_LEVEL_COLOURS = ["#ff7f0e", "#1f77b4", "#8c564b", "#e377c2"]

# heatmap colour ramp, P = 0 -> P = 1
LOW_RGB = (247, 251, 255)
HIGH_RGB = (8, 48, 107)


def _num(v: float) -> str:
    return f"{v:.2f}"


class _Frame:
    """Maps data coordinates onto the plotting area."""

    def __init__(self, x_range: Tuple[float, float], y_range: Tuple[float, float]):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0
        self.left = MARGIN["left"]
        self.right = WIDTH - MARGIN["right"]
        self.top = MARGIN["top"]
        self.bottom = HEIGHT - MARGIN["bottom"]

    def px(self, x: float) -> float:
        return self.left + (x - self.x0) / (self.x1 - self.x0) * (self.right - self.left)

    def py(self, y: float) -> float:
        return self.bottom - (y - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)

    def points(self, xs: Sequence[float], ys: Sequence[float]) -> str:
        return " ".join(f"{_num(self.px(x))},{_num(self.py(y))}" for x, y in zip(xs, ys))


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    return np.linspace(lo, hi, n + 1)


def _header(title: str) -> List[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" style="fill:#ffffff"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">{title}</text>',
    ]


def _axes(frame: _Frame, xlabel: str, ylabel: str) -> List[str]:
    parts = [
        '<g id="axes" stroke="#000000" stroke-width="1">',
        f'<line x1="{frame.left}" y1="{frame.bottom}" x2="{frame.right}" y2="{frame.bottom}"/>',
        f'<line x1="{frame.left}" y1="{frame.bottom}" x2="{frame.left}" y2="{frame.top}"/>',
        '</g>',
        '<g id="ticks" font-size="10">',
    ]
    for x in _ticks(frame.x0, frame.x1):
        px = _num(frame.px(x))
        parts.append(f'<line x1="{px}" y1="{frame.bottom}" x2="{px}" y2="{frame.bottom + 4}" stroke="#000000"/>')
        parts.append(f'<text x="{px}" y="{frame.bottom + 16}" text-anchor="middle">{x:g}</text>')
    for y in _ticks(frame.y0, frame.y1):
        py = _num(frame.py(y))
        parts.append(f'<line x1="{frame.left - 4}" y1="{py}" x2="{frame.left}" y2="{py}" stroke="#000000"/>')
        parts.append(f'<text x="{frame.left - 8}" y="{py}" text-anchor="end" dominant-baseline="middle">{y:.2g}</text>')
    parts.append('</g>')
    mid_x = (frame.left + frame.right) / 2
    mid_y = (frame.top + frame.bottom) / 2
    parts.append(f'<text x="{mid_x:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="16" y="{mid_y:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {mid_y:.1f})">{ylabel}</text>')
    return parts


def _legend(entries: List[Tuple[str, str, bool]]) -> List[str]:
    """entries: (label, colour, dashed)"""
    x = WIDTH - MARGIN["right"] + 16
    parts = ['<g id="legend">']
    for n, (label, colour, dashed) in enumerate(entries):
        y = MARGIN["top"] + 8 + 18 * n
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        parts.append(f'<line x1="{x}" y1="{y}" x2="{x + 22}" y2="{y}" stroke="{colour}" stroke-width="2"{dash}/>')
        parts.append(f'<text x="{x + 28}" y="{y}" dominant-baseline="middle">{label}</text>')
    parts.append('</g>')
    return parts


def level_colour(level: float, n: int = 0) -> str:
    for known, colour in LEVEL_COLOURS.items():
        if abs(level - known) < 1e-9:
            return colour
    return EXTRA_LEVEL_COLOURS[n % len(EXTRA_LEVEL_COLOURS)]


def heat_colour(value: float) -> str:
    t = min(max(float(value), 0.0), 1.0)
    rgb = [round(lo + t * (hi - lo)) for lo, hi in zip(LOW_RGB, HIGH_RGB)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _line_chart(x: np.ndarray, curves: Dict[str, np.ndarray], title: str, xlabel: str,
                ylabel: str = "probability") -> str:
    x_range = (float(x[0]), float(x[-1])) if len(x) else (0.0, 1.0)
    frame = _Frame(x_range, (0.0, 1.0))
    parts = _header(title) + _axes(frame, xlabel, ylabel)
    if len(x):
        entries = []
        for n, (name, y) in enumerate(curves.items()):
            colour = SERIES_COLOURS[n % len(SERIES_COLOURS)]
            parts.append(f'<polyline id="series-{name}" fill="none" stroke="{colour}" stroke-width="1.5" '
                         f'points="{frame.points(x, y)}"/>')
            entries.append((name, colour, False))
        parts += _legend(entries)
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def render_time_series(series: TimeSeries, title: str = "Hydrogen-bond distribution") -> str:
    """One polyline per P_k against time; axes only for an empty series."""
    curves = {f"P{k}": series.probability(k) for k in range(series.m + 1)}
    return _line_chart(series.times, curves, f"{title} (m={series.m})", "t")


def render_inflow_curve(curve: InflowCurve, title: str = "Steady state against inflow") -> str:
    curves = {f"P{k}": curve.probability(k) for k in range(curve.m + 1)}
    return _line_chart(curve.mu, curves, f"{title} (m={curve.m})", f"mu_{curve.mode}")


def _contour_paths(frame: _Frame, contours: ContourSet, dashed: bool, tag: str) -> Tuple[List[str], List]:
    parts, entries = [], []
    dash = ' stroke-dasharray="6,4"' if dashed else ""
    for n, level in enumerate(contours.levels):
        colour = level_colour(level, n)
        parts.append(f'<g id="{tag}-{level:g}" fill="none" stroke="{colour}" stroke-width="2"{dash}>')
        for line in contours.polylines(level):
            parts.append(f'<polyline points="{frame.points(line[:, 0], line[:, 1])}"/>')
        parts.append('</g>')
        entries.append((f"{level:g}" + (" (coh)" if dashed else ""), colour, dashed))
    return parts, entries


def render_heatmap(heatmap: HeatmapData, contours: Optional[ContourSet] = None, k: Optional[int] = None,
                   title: Optional[str] = None) -> str:
    """Coloured cells of P_k with the dividing lines drawn on top."""
    k = heatmap.target if k is None else k
    x, y = heatmap.mu_hyd, heatmap.mu_dist
    dx = (x[-1] - x[0]) / max(len(x) - 1, 1)
    dy = (y[-1] - y[0]) / max(len(y) - 1, 1)
    frame = _Frame((x[0] - dx / 2, x[-1] + dx / 2), (y[0] - dy / 2, y[-1] + dy / 2))
    title = title or f"P{k} steady state, m={heatmap.m} {heatmap.coupling}"

    parts = _header(title)
    grid = heatmap.grid(k)
    parts.append('<g id="cells" stroke="none">')
    w = frame.px(dx) - frame.px(0.0)
    h = frame.py(0.0) - frame.py(dy)
    for j, yj in enumerate(y):
        for i, xi in enumerate(x):
            parts.append(f'<rect x="{_num(frame.px(xi - dx / 2))}" y="{_num(frame.py(yj + dy / 2))}" '
                         f'width="{_num(w)}" height="{_num(h)}" fill="{heat_colour(grid[j, i])}"/>')
    parts.append('</g>')
    parts += _axes(frame, "mu_hyd", "mu_dist")
    if contours is not None:
        lines, entries = _contour_paths(frame, contours, False, "contour")
        parts += lines + _legend(entries)
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def render_contour_overlay(incoherent: ContourSet, coherent: ContourSet, mu_max: float,
                           title: str = "Dividing lines, incoherent (solid) vs coherent (dashed)") -> str:
    frame = _Frame((0.0, mu_max), (0.0, mu_max))
    parts = _header(title) + _axes(frame, "mu_hyd", "mu_dist")
    solid, solid_entries = _contour_paths(frame, incoherent, False, "incoherent")
    dashed, dashed_entries = _contour_paths(frame, coherent, True, "coherent")
    parts += solid + dashed + _legend(solid_entries + dashed_entries)
    parts.append('</svg>')
    return "\n".join(parts) + "\n"


def render_svg(result, **kwargs) -> str:
    """SVG document for a TimeSeries, InflowCurve or HeatmapData."""
    if isinstance(result, TimeSeries):
        return render_time_series(result, **kwargs)
    if isinstance(result, InflowCurve):
        return render_inflow_curve(result, **kwargs)
    if isinstance(result, HeatmapData):
        return render_heatmap(result, **kwargs)
    raise TypeError(f"cannot render {type(result).__name__} as SVG")
