"""Command line entry point: ``edd solve|validate|gen|sweep|fixtures``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import yaml

from . import fixtures
from .exact import DEFAULT_NODE_BUDGET, BudgetExceeded
from .graph import InstanceError, validate_solution
from .harness import ALGORITHMS, SweepConfig, generate_instance, run_sweep, solve, summarize
from .io import dump_instance, dump_solution, load_instance, load_solution


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_solve(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    try:
        solution = solve(args.algo, instance, args.seed, args.exact_budget)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    _write(dump_solution(solution), args.output)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    instance = load_instance(args.instance)
    solution = load_solution(args.solution)
    violations = validate_solution(instance, solution)
    if not violations:
        print(f"ok: cost {solution.cost:g}")
        return 0
    for v in violations:
        print(v)
    return 1


def cmd_gen(args: argparse.Namespace) -> int:
    instance = generate_instance(args.n, args.r, args.delta, args.gamma, args.d_limit, args.seed)
    _write(dump_instance(instance), args.output)
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    data = yaml.safe_load(Path(args.config).read_text(encoding="utf-8")) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{args.config}: sweep config must be a mapping")
    if args.exact_budget is not None:
        data["exact_budget"] = args.exact_budget
    if args.workers is not None:
        data["workers"] = args.workers
    config = SweepConfig.from_mapping(data)
    rows = run_sweep(config, args.output)
    print(f"{'n':>6} {'r':>5} {'d_limit':>7} {'algo':>8} {'runs':>5} {'mean_cost':>10}")
    for s in summarize(rows):
        mean = "-" if s["mean_cost"] is None else f"{s['mean_cost']:.2f}"
        print(f"{s['n']:>6} {s['r']:>5} {s['d_limit']:>7} {s['algo']:>8} {s['runs']:>5} {mean:>10}")
    return 0


def cmd_fixtures(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, make in fixtures.BUILTIN.items():
        path = out_dir / f"{name}.json"
        path.write_text(dump_instance(make()), encoding="utf-8")
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edd", description="Edge data distribution solvers")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance")
    p.add_argument("--algo", choices=ALGORITHMS, default="nste")
    p.add_argument("--seed", type=int, default=0, help="seed for --algo random")
    p.add_argument("--exact-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("validate", help="check a solution against an instance")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("gen", help="generate a random connected instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--delta", type=float, default=1.5)
    p.add_argument("--gamma", type=float, default=20.0)
    p.add_argument("--d-limit", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sweep", help="run an experiment grid from a YAML/JSON config")
    p.add_argument("config")
    p.add_argument("-o", "--output", required=True, help="CSV file (appended to)")
    p.add_argument("--exact-budget", type=int)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fixtures", help="write the built-in instances as JSON")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (InstanceError, ValueError, OSError, yaml.YAMLError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
