"""Command-line entry point.

Exit codes: 0 success, 1 infeasible or invalid input, 2 usage error,
3 runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .errors import FairTTError, FormatError, Infeasible
from .evaluator import check_hard, penalty_allocation, shifted_allocation, total_penalty
from .fairness import ENERGY_KINDS, jain_index
from .harness import (
    SIGNIFICANCE,
    default_jobs,
    format_allocation,
    pareto_report,
    read_batch_column,
    run_batch,
    wilcoxon_one_sided,
)
from .instance_io import load_instance, load_solution, write_solution
from .jfi_solver import ObjectivePair, export_archive, objective, read_archive_points, solve_jfi
from .mmf_solver import SAParams, solve_mmf
from .neighborhood import build_initial

EXIT_OK, EXIT_INVALID, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3

log = logging.getLogger("fairtt")


def _sa_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta-max", type=float, default=None, help="initial temperature (5 mmf, 20 jfi)")
    p.add_argument("--theta-min", type=float, default=0.01)
    p.add_argument("--timeout-s", type=float, default=192.0)
    p.add_argument("--delta", type=float, default=1e-3)
    p.add_argument("--energy", choices=ENERGY_KINDS, default="cw")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--start", type=Path, help="initial solution file (default: greedy construction)")


def _params(args, mode: str) -> SAParams:
    theta_max = args.theta_max if args.theta_max is not None else (5.0 if mode == "mmf" else 20.0)
    return SAParams(theta_max, args.theta_min, args.timeout_s, args.delta, args.energy, args.seed)


def _start(inst, args):
    if args.start:
        return load_solution(args.start, inst)
    return build_initial(inst, args.seed)


def _jain_text(alloc) -> str:
    try:
        return f"{jain_index(shifted_allocation(alloc)):.4f}"
    except ZeroDivisionError:
        return "-"


def cmd_validate(args) -> int:
    inst = load_instance(args.instance)
    print(f"instance {inst.name}: {len(inst.courses)} courses, {inst.total_lectures} lectures, "
          f"{len(inst.rooms)} rooms, {inst.days}x{inst.periods_per_day} periods, {len(inst.curricula)} curricula")
    if args.solution is None:
        return EXIT_OK
    t = load_solution(args.solution, inst)
    violations = check_hard(inst, t)
    for v in violations:
        print(v)
    print("feasible" if not violations else f"infeasible: {len(violations)} violation(s)")
    return EXIT_OK if not violations else EXIT_INVALID


def cmd_evaluate(args) -> int:
    inst = load_instance(args.instance)
    t = load_solution(args.solution, inst)
    f = total_penalty(inst, t)
    alloc = penalty_allocation(inst, t)
    print(f"instance,curricula,total_penalty,jain_shifted,allocation")
    print(f"{inst.name},{len(inst.curricula)},{f},{_jain_text(alloc)},\"{format_allocation(alloc)}\"")
    return EXIT_OK


def cmd_solve_mmf(args) -> int:
    inst = load_instance(args.instance)
    p = _params(args, "mmf")
    best, trace = solve_mmf(inst, _start(inst, args), p)
    alloc = penalty_allocation(inst, best)
    if args.out:
        write_solution(args.out, best)
    if args.trace:
        Path(args.trace).write_text(trace.to_csv())
    print(f"total_penalty,allocation,iterations")
    print(f"{total_penalty(inst, best)},\"{format_allocation(alloc)}\",{trace.iterations}")
    return EXIT_OK


def cmd_solve_jfi(args) -> int:
    inst = load_instance(args.instance)
    p = _params(args, "jfi")
    run = solve_jfi(inst, _start(inst, args), p)
    out_dir = Path(args.out_dir)
    csv_path = export_archive(run.archive, out_dir)
    report = pareto_report(run.archive, run.seed_point)
    (out_dir / "pareto_report.csv").write_text(report)
    log.info("archive written to %s", csv_path)
    print(f"# seed point: jain={run.seed_point.jain:.6f} penalty={run.seed_point.penalty}")
    sys.stdout.write(report)
    return EXIT_OK


def cmd_batch(args) -> int:
    inst = load_instance(args.instance)
    p = _params(args, args.mode)
    start = _start(inst, args)
    violations = check_hard(inst, start)
    if violations:
        raise Infeasible(violations)
    result = run_batch(inst, start, p, args.runs, args.mode, jobs=args.jobs or default_jobs())
    text = result.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    failed = sum(1 for r in result.records if not r.ok)
    if failed:
        log.warning("%d of %d runs failed", failed, len(result.records))
    return EXIT_OK if failed < len(result.records) else EXIT_RUNTIME


def cmd_compare(args) -> int:
    a = read_batch_column(args.batch_a, args.column)
    b = read_batch_column(args.batch_b, args.column)
    rep = wilcoxon_one_sided(a, b)
    verdict = "A_better" if rep.significant(args.alpha) else "no_significant_difference"
    print("statistic,p_value,direction,exact,verdict")
    print(f"{rep.statistic},{rep.p_value:.6g},{rep.direction},{str(rep.exact).lower()},{verdict}")
    return EXIT_OK


def cmd_pareto(args) -> int:
    points = read_archive_points(args.archive)
    if args.seed_solution:
        if not args.instance:
            raise _Usage("--seed-solution needs --instance")
        inst = load_instance(args.instance)
        seed = objective(inst, load_solution(args.seed_solution, inst))
    elif args.seed_penalty is not None and args.seed_jain is not None:
        seed = ObjectivePair(args.seed_penalty, 1.0 - args.seed_jain)
    else:
        raise _Usage("give --seed-penalty and --seed-jain, or --instance and --seed-solution")
    sys.stdout.write(pareto_report(points, seed))
    return EXIT_OK


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fairtt", description="Fair curriculum-based course timetabling")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse an instance and optionally check a solution's hard constraints")
    p.add_argument("instance", type=Path)
    p.add_argument("solution", type=Path, nargs="?")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("evaluate", help="total penalty, per-curriculum allocation and Jain index")
    p.add_argument("instance", type=Path)
    p.add_argument("solution", type=Path)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("solve-mmf", help="max-min fair simulated annealing")
    p.add_argument("instance", type=Path)
    _sa_flags(p)
    p.add_argument("--out", type=Path, help="write best solution here")
    p.add_argument("--trace", type=Path, help="write run trace CSV here")
    p.set_defaults(func=cmd_solve_mmf)

    p = sub.add_parser("solve-jfi", help="penalty vs Jain-index Pareto search")
    p.add_argument("instance", type=Path)
    _sa_flags(p)
    p.add_argument("--out-dir", type=Path, required=True)
    p.set_defaults(func=cmd_solve_jfi)

    p = sub.add_parser("batch", help="independent seeded runs, one CSV row each")
    p.add_argument("instance", type=Path)
    _sa_flags(p)
    p.add_argument("--mode", choices=("mmf", "jfi"), default="mmf")
    p.add_argument("--runs", type=int, default=50)
    p.add_argument("--jobs", type=int, default=None, help="worker processes (env FAIRTT_JOBS)")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("compare", help="one-sided Wilcoxon rank-sum test between two batch CSVs")
    p.add_argument("batch_a", type=Path)
    p.add_argument("batch_b", type=Path)
    p.add_argument("--column", default="worst_penalty")
    p.add_argument("--alpha", type=float, default=SIGNIFICANCE)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("pareto", help="tradeoff-line report for an exported archive")
    p.add_argument("archive", type=Path)
    p.add_argument("--seed-penalty", type=int)
    p.add_argument("--seed-jain", type=float)
    p.add_argument("--instance", type=Path)
    p.add_argument("--seed-solution", type=Path)
    p.set_defaults(func=cmd_pareto)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        print(f"fairtt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, Infeasible) as exc:
        print(f"fairtt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (FairTTError, OSError, ValueError, KeyError) as exc:
        print(f"fairtt: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
