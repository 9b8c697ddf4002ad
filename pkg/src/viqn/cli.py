"""Benchmark harness: run solvers over the problem suite, emit CSV tables.

Subcommands:

  run      solve selected problems (all registered initial points unless
           --x0 narrows them) with irqn, inm, or both; write one CSV row per
           (problem, x0, solver) combination.
  list     enumerate the registry: names, dimensions, initial points, known
           solutions, repaired flags.
  compare  align two result CSVs row by row and flag iteration regressions.

Exit code 0 means every requested run reached a terminal status, including
reported non-convergence; nonzero signals harness errors only.
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
from dataclasses import dataclass, field
from typing import Optional

from .core import SolverConfig, Status, load_config
from .errors import KeyMismatch, UnknownProblem, ViqnError
from .problems import build_problem, list_problems, make_spec
from .solvers import inm_solve, irqn_solve

CSV_COLUMNS = [
    "problem", "n", "x0", "solver", "iter", "time_s", "res", "status",
    "unit_steps", "hyperplane_steps", "linesearch_steps", "seed", "repaired",
]


@dataclass
class RunRequest:
    problems: list[str]
    n: Optional[int] = None
    x0: Optional[str] = None
    solver: str = "both"
    seed: Optional[int] = None
    config: SolverConfig = field(default_factory=SolverConfig)
    out: Optional[str] = None
    reps: int = 3


@dataclass(frozen=True)
class ResultRow:
    problem: str
    n: int
    x0: str
    solver: str
    iter: int
    time_s: float
    res: float
    status: str
    unit_steps: int
    hyperplane_steps: int
    linesearch_steps: int
    seed: str
    repaired: bool

    def csv_values(self) -> list[str]:
        return [
            self.problem, str(self.n), self.x0, self.solver, str(self.iter),
            repr(self.time_s), repr(self.res), self.status,
            str(self.unit_steps), str(self.hyperplane_steps),
            str(self.linesearch_steps), self.seed,
            "true" if self.repaired else "false",
        ]


def _solve_once(problem, x0, solver, cfg):
    if solver == "irqn":
        return irqn_solve(problem, x0, cfg)
    return inm_solve(problem, x0, cfg)


def run(request: RunRequest) -> list[ResultRow]:
    """Execute the request; per-run solver failures become status values."""
    solvers = ["irqn", "inm"] if request.solver == "both" else [request.solver]
    rows: list[ResultRow] = []
    for name in request.problems:
        spec = make_spec(name, n=request.n, seed=request.seed)
        problem = build_problem(spec)
        points = spec.x0_choices
        if request.x0 is not None:
            points = tuple(
                (lab, vec) for lab, vec in points if lab == request.x0
            )
            if not points:
                raise UnknownProblem(f"{name} has no initial point {request.x0!r}")
        for label, x0 in points:
            for solver in solvers:
                times = []
                report = None
                for _ in range(max(request.reps, 1)):
                    report = _solve_once(problem, x0, solver, request.config)
                    times.append(report.wall_time)
                from .core import Branch  # local to keep module import light

                rows.append(ResultRow(
                    problem=name,
                    n=spec.n,
                    x0=label,
                    solver=solver,
                    iter=report.iterations,
                    time_s=statistics.median(times),
                    res=report.final_res,
                    status=report.status.value,
                    unit_steps=report.count(Branch.UNIT_STEP),
                    hyperplane_steps=report.count(Branch.HYPERPLANE),
                    linesearch_steps=report.count(Branch.LINESEARCH_HYPERPLANE),
                    seed="" if spec.seed is None else str(spec.seed),
                    repaired=spec.repaired,
                ))
    if request.out:
        write_csv(request.out, rows)
    return rows


def write_csv(path, rows: list[ResultRow]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.csv_values())


def read_csv(path) -> list[ResultRow]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise KeyMismatch(f"unexpected CSV columns in {path}")
        for rec in reader:
            rows.append(ResultRow(
                problem=rec["problem"],
                n=int(rec["n"]),
                x0=rec["x0"],
                solver=rec["solver"],
                iter=int(rec["iter"]),
                time_s=float(rec["time_s"]),
                res=float(rec["res"]),
                status=rec["status"],
                unit_steps=int(rec["unit_steps"]),
                hyperplane_steps=int(rec["hyperplane_steps"]),
                linesearch_steps=int(rec["linesearch_steps"]),
                seed=rec["seed"],
                repaired=rec["repaired"] == "true",
            ))
    return rows


def _pair_rows(rows_a, rows_b):
    """Pair rows across tables; solver is part of the key only when needed."""

    def keyed(rows, with_solver):
        out = {}
        for r in rows:
            key = (r.problem, r.n, r.x0, r.seed) + (
                (r.solver,) if with_solver else ()
            )
            if key in out:
                raise KeyMismatch(f"duplicate row {key} within one table")
            out[key] = r
        return out

    try:
        a = keyed(rows_a, with_solver=True)
        b = keyed(rows_b, with_solver=True)
        if a.keys() == b.keys():
            return [(a[k], b[k]) for k in sorted(a)]
    except KeyMismatch:
        pass
    a = keyed(rows_a, with_solver=False)
    b = keyed(rows_b, with_solver=False)
    only_a = sorted(a.keys() - b.keys())
    only_b = sorted(b.keys() - a.keys())
    if only_a or only_b:
        missing = (only_a + only_b)[0]
        raise KeyMismatch(f"tables do not match; unpaired row {missing}")
    return [(a[k], b[k]) for k in sorted(a)]


def compare(csv_a, csv_b) -> tuple[str, int]:
    """Side-by-side table plus the number of flagged regressions.

    A pair is flagged when the right-hand run needs more than twice the
    iterations of the left-hand run.
    """
    pairs = _pair_rows(read_csv(csv_a), read_csv(csv_b))
    header = (
        f"{'problem':8} {'n':>5} {'x0':6} "
        f"{'solver':6} {'iter':>6} {'time_s':>10} {'res':>10}   "
        f"{'solver':6} {'iter':>6} {'time_s':>10} {'res':>10}  flag"
    )
    lines = [header, "-" * len(header)]
    regressions = 0
    for ra, rb in pairs:
        flag = ""
        if rb.iter > 2 * ra.iter:
            flag = "REGRESSION"
            regressions += 1
        lines.append(
            f"{ra.problem:8} {ra.n:>5} {ra.x0:6} "
            f"{ra.solver:6} {ra.iter:>6} {ra.time_s:>10.3e} {ra.res:>10.3e}   "
            f"{rb.solver:6} {rb.iter:>6} {rb.time_s:>10.3e} {rb.res:>10.3e}  {flag}"
        )
    lines.append(f"regressions: {regressions}")
    return "\n".join(lines), regressions


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viqn",
        description="benchmark harness for the variational-inequality solvers",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve problems and write a CSV")
    p_run.add_argument("--problem", action="append", required=True,
                       help="problem name (repeatable), e.g. ex1")
    p_run.add_argument("--n", type=int, default=None)
    p_run.add_argument("--x0", default=None, help="initial-point label, e.g. p0")
    p_run.add_argument("--solver", choices=["irqn", "inm", "both"],
                       default="both")
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--tol", type=float, default=None)
    p_run.add_argument("--max-iter", type=int, default=None)
    p_run.add_argument("--config", default=None,
                       help="flat key=value config file")
    p_run.add_argument("--out", default=None, help="CSV output path")
    p_run.add_argument("--reps", type=int, default=3,
                       help="timing repetitions (median reported)")

    sub.add_parser("list", help="enumerate registered problems")

    p_cmp = sub.add_parser("compare", help="align two result CSVs")
    p_cmp.add_argument("csv_a")
    p_cmp.add_argument("csv_b")
    return parser


def _cmd_run(args) -> int:
    cfg = SolverConfig() if args.config is None else load_config(args.config)
    overrides = {}
    if args.tol is not None:
        overrides["tol"] = args.tol
    if args.max_iter is not None:
        overrides["max_iter"] = args.max_iter
    if overrides:
        from dataclasses import replace

        cfg = replace(cfg, **overrides)
    request = RunRequest(
        problems=args.problem,
        n=args.n,
        x0=args.x0,
        solver=args.solver,
        seed=args.seed,
        config=cfg,
        out=args.out,
        reps=args.reps,
    )
    rows = run(request)
    for row in rows:
        print(
            f"{row.problem:6} n={row.n:<5} x0={row.x0:4} {row.solver:5} "
            f"iter={row.iter:<5} time={row.time_s:.3e} res={row.res:.3e} "
            f"{row.status}"
        )
    if args.out:
        print(f"wrote {args.out}")
    return 0


def _cmd_list(_args) -> int:
    for row in list_problems():
        dims = f"n={row['n']}" + (" (fixed)" if row["fixed_n"] else "")
        seeded = " seeded" if row["seeded"] else ""
        repaired = " repaired" if row["repaired"] else ""
        print(f"{row['name']:6} {dims:14}{seeded}{repaired}  {row['summary']}")
        print(f"       x0: {', '.join(row['x0_labels'])}")
        for sol in row["known_solutions"]:
            rounded = ", ".join(f"{v:g}" for v in sol)
            print(f"       known solution: ({rounded})")
    return 0


def _cmd_compare(args) -> int:
    table, _ = compare(args.csv_a, args.csv_b)
    print(table)
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list(args)
        return _cmd_compare(args)
    except (ViqnError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
