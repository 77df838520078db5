"""Dividing lines (level sets) of steady-state probability maps."""

import logging
import sys
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))
from config import DEFAULT_LEVELS
from src.analysis.sweep import HeatmapData
from src.errors import ValidationError

logger = logging.getLogger(__name__)

Edge = Tuple[str, int, int]  # ("h", j, i) joins (j, i)-(j, i+1); ("v", j, i) joins (j, i)-(j+1, i)

REGION_NAMES = ("I", "II", "III", "IV")


@dataclass
class ContourSet:
    """Polylines per level in (mu_hyd, mu_dist) coordinates."""

    levels: Tuple[float, ...]
    lines: Dict[float, List[np.ndarray]] = field(default_factory=dict)
    k: Optional[int] = None

    def polylines(self, level: float) -> List[np.ndarray]:
        return self.lines.get(level, [])

    def count(self) -> int:
        return sum(len(lines) for lines in self.lines.values())

    def to_json(self) -> List[Dict]:
        return [
            {"level": float(level),
             "polylines": [[[float(x), float(y)] for x, y in line] for line in self.polylines(level)]}
            for level in self.levels
        ]


def check_levels(levels: Sequence[float]) -> Tuple[float, ...]:
    levels = tuple(float(level) for level in levels)
    bad = [level for level in levels if not 0 < level < 1]
    if bad or not levels:
        raise ValidationError([("LEVEL_OUT_OF_RANGE", f"contour levels must lie in (0, 1), got {list(levels)}")])
    return levels


def _crossing(x: np.ndarray, y: np.ndarray, z: np.ndarray, level: float, edge: Edge) -> Tuple[float, float]:
    kind, j, i = edge
    j2, i2 = (j, i + 1) if kind == "h" else (j + 1, i)
    t = (level - z[j, i]) / (z[j2, i2] - z[j, i])
    return (float(x[i] + t * (x[i2] - x[i])), float(y[j] + t * (y[j2] - y[j])))


def _cell_segments(z: np.ndarray, above: np.ndarray, level: float, j: int, i: int) -> List[Tuple[Edge, Edge]]:
    bottom, top = ("h", j, i), ("h", j + 1, i)
    left, right = ("v", j, i), ("v", j, i + 1)
    a00, a01 = above[j, i], above[j, i + 1]
    a10, a11 = above[j + 1, i], above[j + 1, i + 1]

    crossed = []
    if a00 != a01:
        crossed.append(bottom)
    if a01 != a11:
        crossed.append(right)
    if a10 != a11:
        crossed.append(top)
    if a00 != a10:
        crossed.append(left)

    if len(crossed) == 2:
        return [(crossed[0], crossed[1])]
    if len(crossed) == 4:
        # saddle: the centre value decides which diagonal is connected
        centre = 0.25 * (z[j, i] + z[j, i + 1] + z[j + 1, i] + z[j + 1, i + 1])
        if (centre >= level) == a00:
            return [(bottom, right), (top, left)]
        return [(left, bottom), (right, top)]
    return []


def _walk(start: Edge, graph: Dict[Edge, List[Edge]], used: set) -> List[Edge]:
    path = [start]
    current = start
    while True:
        step = next((n for n in graph[current] if frozenset((current, n)) not in used), None)
        if step is None:
            return path
        used.add(frozenset((current, step)))
        path.append(step)
        current = step
        if current == start:
            return path


def contour_lines(x: np.ndarray, y: np.ndarray, z: np.ndarray, level: float) -> List[np.ndarray]:
    """
    Marching squares with linear interpolation along cell edges.

    z is indexed [j, i] with j along y and i along x. Open lines start at
    the grid boundary, closed loops repeat their first point at the end.
    Vertex order is fixed by the sorted edge ids.

    Returns:
        List of (n, 2) arrays of (x, y) points
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.asarray(z, dtype=float)
    if z.shape != (len(y), len(x)):
        raise ValueError(f"z has shape {z.shape}, expected {(len(y), len(x))}")

    above = z >= level
    graph: Dict[Edge, List[Edge]] = defaultdict(list)
    for j in range(len(y) - 1):
        for i in range(len(x) - 1):
            for a, b in _cell_segments(z, above, level, j, i):
                graph[a].append(b)
                graph[b].append(a)

    used: set = set()
    paths = []
    for edge in sorted(e for e, n in graph.items() if len(n) == 1):
        if all(frozenset((edge, n)) in used for n in graph[edge]):
            continue
        paths.append(_walk(edge, graph, used))
    for edge in sorted(graph):
        if any(frozenset((edge, n)) not in used for n in graph[edge]):
            paths.append(_walk(edge, graph, used))

    return [np.array([_crossing(x, y, z, level, e) for e in path]) for path in paths]


def extract_contours(heatmap: HeatmapData, levels: Sequence[float] = DEFAULT_LEVELS,
                     k: Optional[int] = None) -> ContourSet:
    """
    Dividing lines of P_k over the inflow plane.

    A level outside the data range gives an empty list, not an error.
    """
    levels = check_levels(levels)
    k = heatmap.target if k is None else k
    if not heatmap.all_converged:
        logger.warning("extracting contours from a heatmap with %d unconverged cells",
                       int((~heatmap.converged).sum()))
    z = heatmap.grid(k)
    lines = {level: contour_lines(heatmap.mu_hyd, heatmap.mu_dist, z, level) for level in levels}
    return ContourSet(levels, lines, k)


def classify_regions(heatmap: HeatmapData, k: Optional[int] = None,
                     levels: Sequence[float] = DEFAULT_LEVELS) -> np.ndarray:
    """
    Region number per cell: 1 below the lowest level up to len(levels) + 1
    at or above the highest (I-IV for the default levels).
    """
    levels = check_levels(levels)
    return np.digitize(heatmap.grid(k), levels) + 1
