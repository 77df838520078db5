"""Command-line front end: python -m src.run <subcommand> [options]."""

import argparse
import logging
from datetime import datetime
from pathlib import Path
import sys
from typing import Dict, List, Optional

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config import DEFAULT_GRID, DEFAULT_LEVELS, DEFAULT_MU_MAX, OUTPUT_DIR
from src.analysis import (
    coherence_effect,
    compare_coherence,
    coupling_variants,
    extract_contours,
    heatmap_summary,
    sweep_inflow,
    sweep_single_inflow,
)
from src.basis import enumerate_states, partition_blocks
from src.darkstates import dark_basis, known_dark_vectors, verify_dark
from src.database import get_cached_steady_state, log_run, store_steady_state
from src.dynamics import build_system, default_closure, evolve, steady_state
from src.errors import ConvergenceError, HbqedError, ValidationError
from src.model import ClusterSpec, Coupling, apply_overrides, build_config, config_to_dict, load_config
from src.operators import build_jump_operators, hamiltonian_matrix
from src.report import (
    atomic_write_text,
    banner,
    dark_json,
    print_blocks_table,
    print_comparison,
    print_dark_report,
    print_distribution,
    print_sweep_summary,
    print_time_series,
    write_block_csv,
    write_csv,
    write_json,
    write_sidecar,
)
from src.svg import render_contour_overlay, render_heatmap, render_inflow_curve, render_time_series

# flag -> configuration keys it sets
FLAG_KEYS = {
    "m": ["model.m"],
    "coupling": ["model.coupling"],
    "mu_hyd": ["rates.mu_hyd"],
    "mu_dist": ["rates.mu_dist"],
    "g": ["model.g_hyd", "model.g_dist"],
    "gamma": ["rates.gamma_hyd", "rates.gamma_dist"],
    "dt": ["evolve.dt"],
    "t_max": ["evolve.t_max"],
}


def parse_levels(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be comma-separated numbers, got {text!r}")


def resolve_config(args: argparse.Namespace):
    """Config file, then --set overrides, then the explicit model flags."""
    raw = load_config(args.config)
    raw = apply_overrides(raw, args.set or [])
    flags = []
    for name, keys in FLAG_KEYS.items():
        value = getattr(args, name, None)
        if value is not None:
            flags.extend(f"{key}={value}" for key in keys)
    return build_config(apply_overrides(raw, flags))


def _write_svg(path: Optional[str], svg: str):
    if path:
        atomic_write_text(path, svg)
        print(f"SVG saved to: {path}")


def cmd_simulate(args, config) -> Dict:
    series = evolve(config, workers=args.workers, progress=True)
    print_time_series(series)
    if args.out:
        write_csv(series.to_frame(), args.out)
        print(f"Time series saved to: {args.out}")
    _write_svg(args.svg, render_time_series(series))
    return {}


def cmd_steady(args, config) -> Dict:
    result = None
    if args.cache:
        result = get_cached_steady_state(config, args.method, db_path=args.cache)
        if result is not None:
            print("Using cached steady state")
    if result is None:
        result = steady_state(config, method=args.method, strict=False,
                              workers=args.workers, progress=True)
        if args.cache:
            store_steady_state(config, result, args.method, db_path=args.cache)
    if args.strict and not result.converged:
        raise ConvergenceError(
            f"steady state ({result.method}) not converged: distance "
            f"{result.distance:.3e} above {config.evolve.steady_tol:g}",
            result=result,
        )
    print_distribution(result)
    if args.out:
        write_json(result.to_dict(), args.out)
        print(f"Result saved to: {args.out}")
    return {"method": args.method}


def _block_row(config):
    space = enumerate_states(config.spec, default_closure(config))
    operators = build_jump_operators(space, config.rates)
    partition = partition_blocks(space, hamiltonian_matrix(space, config.params), operators)
    return {"m": config.m, "coupling": config.spec.coupling.value, **partition.summary()}, partition


def cmd_blocks(args, config) -> Dict:
    if args.table:
        configs = []
        for m in range(1, args.table + 1):
            for coupling in Coupling:
                if coupling is Coupling.COHERENT and m < 2:
                    continue
                configs.append(config.with_spec(ClusterSpec(m=m, coupling=coupling)))
    else:
        configs = [config]

    rows = []
    for item in configs:
        row, _ = _block_row(item)
        rows.append(row)
    print_blocks_table(rows)

    if args.dump_block is not None:
        _, partition = _block_row(config)
        if not 0 <= args.dump_block < partition.num_blocks:
            raise ValidationError([("BLOCK_OUT_OF_RANGE",
                                    f"block index must be in 0..{partition.num_blocks - 1}, got {args.dump_block}")])
        idx = partition.blocks[args.dump_block]
        h = hamiltonian_matrix(partition.space, config.params)[idx][:, idx]
        target = Path(args.out).with_name(f"block_{args.dump_block}.csv") if args.out \
            else OUTPUT_DIR / f"block_{args.dump_block}.csv"
        write_block_csv(h, target)
        print(f"Block {args.dump_block} saved to: {target}")
    if args.out:
        write_json(rows, args.out)
        print(f"Block table saved to: {args.out}")
    return {"table": args.table}


def cmd_dark(args, config) -> Dict:
    if not 2 <= config.m <= 6:
        raise ValidationError([("M_OUT_OF_RANGE", f"dark states are computed for 2 <= m <= 6, got m={config.m}")])
    if not config.spec.is_coherent:
        print("Dark states exist only with shared modes; using the coherent cluster")
        config = config.with_spec(ClusterSpec(m=config.m, coupling=Coupling.COHERENT))

    basis = dark_basis(config.m)
    candidates = basis.vectors + known_dark_vectors(config.m)
    reports = []
    if candidates:
        system = build_system(config)
        reports = [verify_dark(vector, system) for vector in candidates]
    print_dark_report(basis, reports)
    if args.out:
        write_json(dark_json(basis, reports), args.out)
        print(f"Dark basis saved to: {args.out}")
    failed = [r.name for r in reports if not r.passed]
    if failed:
        raise HbqedError(f"dark-state verification failed for {', '.join(failed)}", code="DARK_CHECK_FAILED")
    return {}


def cmd_sweep(args, config) -> Dict:
    options = dict(grid=args.grid, mu_max=args.mu_max, workers=args.workers,
                   cache=args.cache, progress=True, method=args.method)
    if args.single:
        curve = sweep_single_inflow(config, mode=args.single, **options)
        banner(f"SINGLE INFLOW (m={config.m}, mu_{args.single})")
        print(f"{'mu':>6} " + " ".join(f"{'P' + str(k):>10}" for k in range(config.m + 1)))
        print("-" * 60)
        for mu, row in zip(curve.mu, curve.values):
            print(f"{mu:>6.3f} " + " ".join(f"{p:>10.6f}" for p in row))
        if args.out:
            write_csv(curve.to_frame(), args.out)
            print(f"Curve saved to: {args.out}")
        _write_svg(args.svg, render_inflow_curve(curve))
        return {"single": args.single, "grid": args.grid, "mu_max": args.mu_max, "method": args.method}

    heatmap = sweep_inflow(config, target=args.target, **options)
    contours = extract_contours(heatmap, args.levels)
    print_sweep_summary(heatmap, heatmap_summary(heatmap))
    if args.out:
        write_csv(heatmap.to_frame(), args.out)
        print(f"Heatmap saved to: {args.out}")
    if args.contours:
        write_json(contours.to_json(), args.contours)
        print(f"Contours saved to: {args.contours}")
    _write_svg(args.svg, render_heatmap(heatmap, contours))
    return {"target": args.target, "levels": list(args.levels), "grid": args.grid,
            "mu_max": args.mu_max, "method": args.method}


def cmd_compare(args, config) -> Dict:
    comparison = compare_coherence(config, method=args.method, strict=args.strict,
                                   workers=args.workers, progress=True)
    effect = None
    overlay = None
    if args.sweep:
        options = dict(grid=args.grid, mu_max=args.mu_max, target=args.target, workers=args.workers,
                       cache=args.cache, progress=True)
        maps = [sweep_inflow(variant, **options) for variant in coupling_variants(config)]
        effect = coherence_effect(*maps)
        contours = [extract_contours(heatmap, args.levels) for heatmap in maps]
        overlay = render_contour_overlay(contours[0], contours[1], args.mu_max)
    print_comparison(comparison, effect)
    if args.out:
        data = comparison.to_dict()
        if effect is not None:
            data["effect"] = effect.to_dict()
        write_json(data, args.out)
        print(f"Comparison saved to: {args.out}")
    if overlay is not None:
        _write_svg(args.svg, overlay)
    return {"method": args.method, "sweep": args.sweep}


HANDLERS = {
    "simulate": cmd_simulate,
    "steady": cmd_steady,
    "blocks": cmd_blocks,
    "dark": cmd_dark,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", type=str, help="JSON configuration file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="Override a configuration key, e.g. rates.mu_hyd=0.3 (repeatable)")
    common.add_argument("--m", type=int, help="Number of hydrogen-bonded units")
    common.add_argument("--coupling", choices=[c.value for c in Coupling], help="Phonon mode sharing")
    common.add_argument("--mu-hyd", type=float, help="Inflow ratio of the hyd mode")
    common.add_argument("--mu-dist", type=float, help="Inflow ratio of the dist mode")
    common.add_argument("--g", type=float, help="Coupling strength of both modes")
    common.add_argument("--gamma", type=float, help="Leakage rate of both modes")
    common.add_argument("--dt", type=float, help="Time step")
    common.add_argument("--t-max", type=float, help="Evolution horizon")
    common.add_argument("--out", "-o", type=str, help="Result file (CSV or JSON by command)")
    common.add_argument("--svg", type=str, help="SVG chart file")
    common.add_argument("--strict", action="store_true", help="Fail with exit code 2 if not converged")
    common.add_argument("--workers", "-w", type=int, help="Worker threads (default: $HBQED_WORKERS or 1)")
    common.add_argument("--cache", type=str, help="SQLite file for cached steady states and the run log")
    common.add_argument("--verbose", "-v", action="store_true", help="Log progress messages")

    sweep_options = argparse.ArgumentParser(add_help=False)
    sweep_options.add_argument("--grid", type=int, default=DEFAULT_GRID,
                               help=f"Points per inflow axis (default: {DEFAULT_GRID})")
    sweep_options.add_argument("--mu-max", type=float, default=DEFAULT_MU_MAX,
                               help=f"Largest inflow ratio (default: {DEFAULT_MU_MAX})")
    sweep_options.add_argument("--target", type=int, default=1, help="k of the mapped P_k (default: 1)")
    sweep_options.add_argument("--levels", type=parse_levels, default=list(DEFAULT_LEVELS),
                               help="Comma-separated contour levels (default: 0.1,0.5,0.9)")

    parser = argparse.ArgumentParser(description="Open-system dynamics of hydrogen-bonded water clusters")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("simulate", parents=[common], help="Evolve from the all-excited state")

    steady = sub.add_parser("steady", parents=[common], help="Steady hydrogen-bond distribution")
    steady.add_argument("--method", choices=["evolve", "direct", "auto"], default="evolve",
                        help="Steady-state method (default: evolve)")

    blocks = sub.add_parser("blocks", parents=[common], help="State-space and block statistics")
    blocks.add_argument("--table", type=int, metavar="M_MAX",
                        help="Print rows for m = 1..M_MAX and both couplings")
    blocks.add_argument("--dump-block", type=int, metavar="INDEX", help="Write one Hamiltonian block as CSV")

    sub.add_parser("dark", parents=[common], help="Exact dark states of the coherent cluster")

    sweep = sub.add_parser("sweep", parents=[common, sweep_options], help="Steady states over inflow ratios")
    sweep.add_argument("--method", choices=["evolve", "direct", "auto"], default="auto",
                       help="Steady-state method per cell (default: auto)")
    sweep.add_argument("--contours", type=str, help="Contour JSON file")
    sweep.add_argument("--single", choices=["hyd", "dist"], help="Sweep one inflow ratio with the other at zero")

    compare = sub.add_parser("compare", parents=[common, sweep_options],
                             help="Coherent vs incoherent steady states")
    compare.add_argument("--method", choices=["evolve", "direct", "auto"], default="auto",
                         help="Steady-state method (default: auto)")
    compare.add_argument("--sweep", action="store_true", help="Also compare inflow heatmaps and dividing lines")
    return parser


def run_cli(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Returns:
        0 on success, 1 on a configuration error, 2 on any other
        simulator error (argparse usage errors also exit with 2)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)

    started_at = datetime.now()
    resolved: Dict = {}
    status = "error"
    try:
        config = resolve_config(args)
        resolved = config_to_dict(config)
        extra = HANDLERS[args.command](args, config) or {}
        resolved["cli"] = {k: v for k, v in extra.items() if v is not None}
        sidecar = write_sidecar(args.command, resolved, args.out)
        print(f"Configuration saved to: {sidecar}")
        status = "ok"
        return 0
    except ValidationError as e:
        status = "invalid"
        print(f"\nERROR {e.code}: {e}", file=sys.stderr)
        return 1
    except HbqedError as e:
        print(f"\nERROR {e.code}: {e.args[0]}", file=sys.stderr)
        return 2
    finally:
        if args.cache:
            log_run(args.command, resolved, status, started_at, db_path=args.cache)


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
