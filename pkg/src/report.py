"""Console reports and result files (CSV, JSON, SVG)."""

import json
import os
import tempfile
from pathlib import Path
import sys
from typing import Dict, Iterable, List, Optional, Union

import pandas as pd

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import CSV_FLOAT_FORMAT, OUTPUT_DIR
from src.analysis import REGION_NAMES, CoherenceComparison, CoherenceEffect, HeatmapData, classify_regions
from src.darkstates import DarkBasis, DarkReport
from src.dynamics import SteadyStateResult, TimeSeries
from src.operators import block_entries

PathLike = Union[str, Path]


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write to a temporary file in the target directory, then rename over the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    return atomic_write_text(path, frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"))


def write_block_csv(matrix, path: PathLike) -> Path:
    """Non-zero entries of one block matrix as CSV (row, col, re, im)."""
    return write_csv(block_entries(matrix), path)


def write_json(data, path: PathLike) -> Path:
    return atomic_write_text(path, json.dumps(data, indent=2, sort_keys=False) + "\n")


def sidecar_path(command: str, out: Optional[PathLike] = None) -> Path:
    """Where the resolved configuration of a run is echoed."""
    if out is None:
        return OUTPUT_DIR / f"{command}.config.json"
    out = Path(out)
    return out.with_name(out.name + ".config.json")


def write_sidecar(command: str, resolved: Dict, out: Optional[PathLike] = None) -> Path:
    return write_json({"command": command, **resolved}, sidecar_path(command, out))


def banner(title: str, *lines: str):
    print(f"\n{'='*60}")
    print(title)
    for line in lines:
        print(line)
    print('='*60)


def format_ratio(ratio: float) -> str:
    """Memory ratio as a percentage with three decimals."""
    return f"{100 * ratio:.3f}%"


def print_blocks_table(rows: Iterable[Dict]):
    """Rows of partition summaries, with m and coupling."""
    banner("BLOCK STRUCTURE")
    print(f"{'m':>3} {'coupling':<12} {'org_dim':>9} {'num_bls':>8} {'max_dim_bl':>11} {'memory':>9}")
    print("-" * 60)
    for row in rows:
        print(f"{row['m']:>3} {row['coupling']:<12} {row['org_dim']:>9} {row['num_bls']:>8} "
              f"{row['max_dim_bl']:>11} {format_ratio(row['memory_ratio']):>9}")


def print_distribution(result: SteadyStateResult, title: str = "STEADY STATE"):
    status = "converged" if result.converged else "NOT CONVERGED"
    time = "-" if result.time is None else f"{result.time:g}"
    banner(title, f"Method: {result.method} | {status} | distance {result.distance:.3e} | t = {time}")
    print(f"{'k':>3} {'P_k':>16}")
    print("-" * 20)
    for k, p in enumerate(result.distribution):
        print(f"{k:>3} {p:>16.12f}")
    print(f"\n<n_hyd> = {result.n_hyd:.6g}   <n_dist> = {result.n_dist:.6g}   min eig = {result.min_eig:.3e}")


def print_time_series(series: TimeSeries):
    banner("TIME EVOLUTION", f"Samples: {len(series)} | t = 0 .. {series.times[-1]:g}")
    print(f"{'k':>3} {'final P_k':>16} {'max P_k':>16}")
    print("-" * 37)
    for k in range(series.m + 1):
        p = series.probability(k)
        print(f"{k:>3} {p[-1]:>16.12f} {p.max():>16.12f}")
    print(f"\nmax |trace - 1| = {abs(series.trace - 1).max():.3e}   min eig = {series.min_eig.min():.3e}")


def dark_json(basis: DarkBasis, reports: List[DarkReport]) -> Dict:
    return {
        "m": basis.m,
        "sectors": [
            {"n2": sector.n2, "dimension": sector.dimension,
             "basis": [[[label, c] for label, c in v.kets()] for v in sector.vectors]}
            for sector in basis.sectors
        ],
        "verification": [report.to_dict() for report in reports],
    }


def print_dark_report(basis: DarkBasis, reports: List[DarkReport]):
    banner(f"DARK STATES (m={basis.m}, coherent)", f"Dark dimension: {basis.dimension}")
    if not basis.dimension:
        print("\nNo dark states.")
    for sector in basis.sectors:
        if sector.dimension:
            print(f"\nn2 = {sector.n2}: {sector.dimension} vector(s)")
    if reports:
        print(f"\n{'Vector':<20} {'hyd':>4} {'dist':>5} {'energy':>10} {'lindblad':>10} {'ok':>4}")
        print("-" * 60)
        for r in reports:
            ok = "yes" if r.passed else "NO"
            print(f"{r.name:<20} {r.hyd_residual:>4} {r.dist_residual:>5} "
                  f"{r.energy_spread:>10.2e} {r.lindblad_residual:>10.2e} {ok:>4}")


def print_sweep_summary(heatmap: HeatmapData, summary: Dict):
    banner(f"INFLOW SWEEP (m={heatmap.m}, {heatmap.coupling})",
           f"Grid: {len(heatmap.mu_hyd)} x {len(heatmap.mu_dist)} | target P{heatmap.target} | "
           f"converged {summary['converged']}/{summary['cells']}")
    for corner, value in summary["corners"].items():
        print(f"  P{heatmap.target}{corner:<12} {value:.6f}")
    regions = classify_regions(heatmap)
    print(f"\n{'Region':<8} {'cells':>6}")
    print("-" * 15)
    for n, name in enumerate(REGION_NAMES, 1):
        print(f"{name:<8} {int((regions == n).sum()):>6}")


def print_comparison(comparison: CoherenceComparison, effect: Optional[CoherenceEffect] = None):
    banner(f"COHERENT vs INCOHERENT (m={comparison.m})")
    print(f"{'k':>3} {'incoherent':>14} {'coherent':>14} {'diff':>12} {'sign':>5}")
    print("-" * 52)
    rows = zip(comparison.incoherent.distribution, comparison.coherent.distribution,
               comparison.differences, comparison.signs())
    for k, (a, b, d, s) in enumerate(rows):
        print(f"{k:>3} {a:>14.8f} {b:>14.8f} {d:>12.2e} {s:>5}")
    if effect is not None:
        verdict = "insignificant" if effect.insignificant else "significant"
        print(f"\nP{effect.k}: max |coh - incoh| = {effect.max_difference:.3e}, "
              f"max one-step change = {effect.max_step_variation:.3e} ({verdict})")
