"""Inflow sweeps, dividing lines and coupling comparisons."""

from .sweep import (
    HeatmapData,
    InflowCurve,
    heatmap_summary,
    inflow_axis,
    sweep_inflow,
    sweep_single_inflow,
)
from .contours import REGION_NAMES, ContourSet, check_levels, classify_regions, contour_lines, extract_contours
from .coherence import (
    SIGN_THRESHOLD,
    CoherenceComparison,
    CoherenceEffect,
    coherence_effect,
    compare_coherence,
    coupling_variants,
)

__all__ = [
    "HeatmapData",
    "InflowCurve",
    "heatmap_summary",
    "inflow_axis",
    "sweep_inflow",
    "sweep_single_inflow",
    "REGION_NAMES",
    "ContourSet",
    "check_levels",
    "classify_regions",
    "contour_lines",
    "extract_contours",
    "SIGN_THRESHOLD",
    "CoherenceComparison",
    "CoherenceEffect",
    "coherence_effect",
    "compare_coherence",
    "coupling_variants",
]
