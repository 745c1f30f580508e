"""Command-line entry point: ``qgridpath {solve,oracle,sweep,make-grid}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .errors import QGPError, TooLarge
from .experiments import PRESETS, ExperimentSpec, load_spec, oracle_block, resolve_grid, run_sweep, with_overrides
from .grid import as_fraction, dump_grid, paper_grid, uniform_grid
from .optimizer import OptimizerConfig
from .oracle import optimal_path, shortest_path_crosscheck
from .pipeline import solve_parallel, solve_serial


def _shots(value: str) -> Optional[int]:
    if value.lower() == "exact":
        return None
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("shots must be positive")
    return n


def _theta(value: str) -> float:
    t = float(value)
    if not 0.0 <= t <= 1.0:
        raise argparse.ArgumentTypeError("theta must lie in [0, 1]")
    return t


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _write_json(path: Path, data: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2) + "\n")


def _path_text(decoded) -> str:
    if not decoded.is_path:
        return decoded.status
    cost = decoded.cost
    cost = int(cost) if cost.denominator == 1 else float(cost)
    return " -> ".join(map(str, decoded.nodes)) + f" (cost {cost})"


def cmd_solve(args) -> int:
    grid = resolve_grid(args.grid)
    config = OptimizerConfig(
        restarts=args.restarts, max_iters=args.max_iters, gradient_method=args.gradient, learning_rate=args.lr
    )
    shots = None if args.exact else args.shots
    if args.mode == "parallel":
        report = solve_parallel(grid, args.p, args.theta, shots, args.seed, config)
    else:
        report = solve_serial(grid, args.p, args.theta, shots, args.seed, config, objective=args.objective)

    print(f"argmax: {report.argmax_ket}  p={float(report.distribution[report.argmax_index]):.6f}")
    if len(report.ties) > 1:
        print(f"ties: {' '.join(report.ties)}")
    print(f"decoded: {_path_text(report.decoded)}")
    if args.verify:
        try:
            oracle = optimal_path(grid)
        except TooLarge as exc:
            print(f"oracle: skipped ({exc})")
        else:
            report.oracle = oracle_block(report, oracle)
            print(f"oracle: optimal {oracle.optimal_ket} cost {report.oracle['optimal_cost']}")
            print(f"oracle-match: {str(report.oracle['match']).lower()}")

    out = Path(args.out)
    _write_json(out / "report.json", report.to_dict())
    (out / "distribution.csv").write_text(report.distribution_csv())
    print(f"report: {out / 'report.json'}")
    return 0


def cmd_oracle(args) -> int:
    grid = resolve_grid(args.grid)
    result = optimal_path(grid)
    data = result.to_dict()
    if result.decoded.is_path:
        route, cost = shortest_path_crosscheck(grid)
        data["shortest_path"] = {"nodes": route, "cost": str(cost), "agrees": cost == result.optimal_cost}
    print(f"optimal: {result.optimal_ket}  {_path_text(result.decoded)}")
    print(f"feasible patterns: {len(result.feasible)}")
    if "shortest_path" in data:
        print(f"shortest-path cross-check: {'agrees' if data['shortest_path']['agrees'] else 'DISAGREES'}")
    out = Path(args.out)
    _write_json(out / "oracle.json", data)
    print(f"result: {out / 'oracle.json'}")
    return 0


def cmd_sweep(args) -> int:
    if args.spec and args.preset:
        raise ValueError("give either a spec file or --preset, not both")
    if args.spec:
        spec = load_spec(args.spec)
    elif args.preset:
        spec = ExperimentSpec.from_dict(PRESETS[args.preset])
    else:
        spec = ExperimentSpec()
    spec = with_overrides(
        spec,
        grid=args.grid,
        mode=args.mode,
        thetas=args.theta,
        ps=args.p,
        shots=args.shots,
        rounds=args.rounds,
        base_seed=args.seed,
        out=args.out,
        restarts=args.restarts,
        max_iters=args.max_iters,
        serial_objective=args.objective,
    )
    spec = ExperimentSpec.from_dict(spec.to_dict())  # re-validate after overrides
    total = len(spec.cells()) * spec.rounds

    def progress(cell, round_, record):
        if not args.quiet:
            status = record["status"]
            extra = record.get("argmax_ket", record.get("error", ""))
            print(f"cell {cell} round {round_}: {status} {extra}", file=sys.stderr)

    out = run_sweep(spec, workers=args.workers, progress=progress)
    print(f"{total} runs; summary: {out / 'summary.csv'}")
    return 0


def cmd_make_grid(args) -> int:
    if args.paper:
        grid = paper_grid()
    else:
        if None in (args.rows, args.cols, args.start, args.target):
            raise ValueError("--rows, --cols, --start and --target are required without --paper")
        overrides = {}
        for item in args.edge or []:
            pair, _, cost = item.partition("=")
            a, _, b = pair.partition(",")
            overrides[f"c{int(a)}_{int(b)}"] = as_fraction(cost)
        grid = uniform_grid(args.rows, args.cols, args.start, args.target, as_fraction(args.cost), **overrides)
    dump_grid(grid, args.out)
    print(f"grid: {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgridpath", description="Grid path planning with parallel QAOA circuits.")
    sub = parser.add_subparsers(dest="command", required=True)

    def optimizer_flags(p, defaults=True):
        p.add_argument("--restarts", type=_positive, default=20 if defaults else None)
        p.add_argument("--max-iters", type=_positive, default=500 if defaults else None)

    solve = sub.add_parser("solve", help="solve one grid instance")
    solve.add_argument("--grid", required=True, help="grid JSON file, or 'paper' for the 2x3 instance")
    solve.add_argument("--p", type=_positive, default=1, help="QAOA layers per circuit")
    solve.add_argument("--theta", type=_theta, default=0.05, help="filter threshold")
    solve.add_argument("--shots", type=_shots, default=200_000)
    solve.add_argument("--exact", action="store_true", help="use exact probabilities instead of sampling")
    solve.add_argument("--seed", type=int, default=None)
    solve.add_argument("--mode", choices=("parallel", "serial"), default="parallel")
    solve.add_argument("--objective", choices=("blockwise", "joint"), default="blockwise",
                       help="how the serial circuit is trained")
    solve.add_argument("--gradient", choices=("adjoint", "finite_difference", "parameter_shift"), default="adjoint")
    solve.add_argument("--lr", type=float, default=0.05, help="learning rate")
    solve.add_argument("--verify", action="store_true", help="compare against the brute-force oracle")
    solve.add_argument("--out", default=".", help="directory for report.json and distribution.csv")
    optimizer_flags(solve)
    solve.set_defaults(func=cmd_solve)

    oracle = sub.add_parser("oracle", help="brute-force optimum of a small grid")
    oracle.add_argument("--grid", required=True)
    oracle.add_argument("--out", default=".")
    oracle.set_defaults(func=cmd_oracle)

    sweep = sub.add_parser("sweep", help="run a seeded (theta, p, shots) experiment grid")
    sweep.add_argument("spec", nargs="?", help="experiment spec JSON")
    sweep.add_argument("--preset", choices=sorted(PRESETS))
    sweep.add_argument("--grid")
    sweep.add_argument("--mode", choices=("parallel", "serial"))
    sweep.add_argument("--objective", choices=("blockwise", "joint"))
    sweep.add_argument("--theta", type=_theta, nargs="+")
    sweep.add_argument("--p", type=_positive, nargs="+")
    sweep.add_argument("--shots", type=_shots, nargs="+", help="shot counts; 'exact' for exact probabilities")
    sweep.add_argument("--rounds", type=_positive)
    sweep.add_argument("--seed", type=int, help="base seed")
    sweep.add_argument("--out")
    sweep.add_argument("--workers", type=_positive, default=1)
    sweep.add_argument("--quiet", action="store_true")
    optimizer_flags(sweep, defaults=False)
    sweep.set_defaults(func=cmd_sweep)

    make = sub.add_parser("make-grid", help="write a grid JSON file")
    make.add_argument("--paper", action="store_true", help="the 2x3 instance from the paper")
    make.add_argument("--rows", type=int)
    make.add_argument("--cols", type=int)
    make.add_argument("--start", type=int)
    make.add_argument("--target", type=int)
    make.add_argument("--cost", default="1", help="cost of every edge not given by --edge")
    make.add_argument("--edge", action="append", metavar="A,B=C", help="cost override for one edge")
    make.add_argument("--out", required=True)
    make.set_defaults(func=cmd_make_grid)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (QGPError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
