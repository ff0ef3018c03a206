"""Command-line interface.

Subcommands:
    analyze  print mu_max, convergence interval, optimal parameter/factor
    solve    run the stationary iteration or (preconditioned) GMRES
    sweep    stationary iteration counts over a list of parameters
    bench    reproduce one of the three benchmark tables

Problem specs: ``example1``, ``mtx:<path>:<c>``, ``pde:<n0>``.
Exit codes: 0 converged, 2 not converged, 1 usage or I/O error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bench import (
    DEFAULT_METHODS,
    alpha_sweep,
    example1_rows,
    example2_rows,
    example3_rows,
    format_rows,
    run_benchmark,
)
from .errors import IlsqError
from .gmres import GmresConfig, gmres
from .model import (
    Formulation,
    assemble_block_operator,
    hessian_is_spd,
    rel_error,
    reference_solution,
)
from .problems import parse_problem_spec
from .spectral import alpha_opt, mu_max, spectral_summary
from .splitting import BsPreconditioner, PbsPreconditioner, pbs_iterate

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ilsq",
        description="Indefinite least squares solvers and benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_problem(p):
        p.add_argument(
            "--problem",
            required=True,
            help="problem spec: example1 | mtx:<path>:<c> | pde:<n0>",
        )

    p_analyze = sub.add_parser("analyze", help="spectral quantities of a problem")
    add_problem(p_analyze)
    p_analyze.add_argument("--tol", type=float, default=1e-8, help="power-iteration tolerance")
    p_analyze.add_argument("--maxit", type=int, default=5000, help="power-iteration cap")

    p_solve = sub.add_parser("solve", help="solve one problem")
    add_problem(p_solve)
    p_solve.add_argument("--method", required=True, choices=("pbs", "gmres"))
    p_solve.add_argument(
        "--prec",
        default="pbs",
        choices=("pbs", "bs1", "bs2", "bs3", "none"),
        help="preconditioner for --method gmres",
    )
    p_solve.add_argument(
        "--alpha", default="1", help="splitting parameter (number or 'opt')"
    )
    p_solve.add_argument(
        "--restart", default="10", help="GMRES restart length or 'full'"
    )
    p_solve.add_argument("--tol", type=float, default=1e-11)
    p_solve.add_argument("--maxit", type=int, default=1000)

    p_sweep = sub.add_parser("sweep", help="iteration counts over alpha values")
    add_problem(p_sweep)
    p_sweep.add_argument(
        "--alphas", required=True, help="comma-separated list, e.g. 0.7,1,1.4"
    )
    p_sweep.add_argument("--tol", type=float, default=1e-11)
    p_sweep.add_argument("--maxit", type=int, default=1000)

    p_bench = sub.add_parser("bench", help="reproduce a benchmark table")
    p_bench.add_argument("--example", required=True, type=int, choices=(1, 2, 3))
    p_bench.add_argument("--a1", help="Matrix Market file for example 2")
    p_bench.add_argument("--c", type=float, default=6.0, help="identity shift for example 2")
    p_bench.add_argument("--n0", type=int, default=85, help="grid count for example 3")
    p_bench.add_argument("--alpha", type=float, default=1.0)
    p_bench.add_argument(
        "--methods",
        default=",".join(DEFAULT_METHODS),
        help="comma-separated subset of pbs,bs1,bs2,bs3,none (pbs:<a> overrides alpha)",
    )
    p_bench.add_argument("--format", default="table", choices=("table", "csv"))
    p_bench.add_argument("--tol", type=float, default=1e-11)
    p_bench.add_argument("--maxit", type=int, default=1000)
    return parser


def _resolve_alpha(spec: str, problem) -> float:
    if spec.strip().lower() == "opt":
        return alpha_opt(mu_max(problem))
    return float(spec)


def _cmd_analyze(args) -> int:
    problem = parse_problem_spec(args.problem)
    print(f"problem: {problem.m}x{problem.n} (p={problem.p}, q={problem.q}, n={problem.n})")
    spd = hessian_is_spd(problem)
    print(f"hessian SPD: {'yes' if spd else 'no'}")
    mu = mu_max(problem, tol=args.tol, maxit=args.maxit)
    print(f"mu_max      = {mu:.6f}")
    if mu < 1.0:
        summary = spectral_summary(problem, tol=args.tol, maxit=args.maxit)
        upper = "inf" if np.isinf(summary.alpha_upper) else f"{summary.alpha_upper:.6f}"
        print(f"alpha range = (0, {upper})")
        print(f"alpha_opt   = {summary.alpha_opt:.6f}")
        print(f"rho_opt     = {summary.rho_opt:.6f}")
    else:
        print("alpha range = empty (mu_max >= 1: splitting not convergent)")
    return 0


def _cmd_solve(args) -> int:
    problem = parse_problem_spec(args.problem)
    alpha = _resolve_alpha(args.alpha, problem)
    if args.method == "pbs":
        x_aug, report = pbs_iterate(problem, alpha, tol=args.tol, maxit=args.maxit)
        op = assemble_block_operator(problem, Formulation.PROJECTED)
    else:
        if args.prec == "pbs":
            op = assemble_block_operator(problem, Formulation.PROJECTED)
            prec = PbsPreconditioner(problem=problem, alpha=alpha)
        elif args.prec == "none":
            op = assemble_block_operator(problem, Formulation.PROJECTED)
            prec = None
        else:
            op = assemble_block_operator(problem, Formulation.RESIDUAL)
            prec = BsPreconditioner(problem=problem, kind=args.prec)
        restart = None if args.restart.strip().lower() == "full" else int(args.restart)
        config = GmresConfig(restart=restart, tol=args.tol, maxit=args.maxit)
        x_aug, report = gmres(op, op.rhs(), config, prec)
    if hessian_is_spd(problem):
        report.rel_error = rel_error(x_aug[op.x_slice], reference_solution(problem))
    print(report)
    return 0 if report.converged else 2


def _cmd_sweep(args) -> int:
    problem = parse_problem_spec(args.problem)
    alphas = [float(tok) for tok in args.alphas.split(",") if tok.strip()]
    result = alpha_sweep(problem, alphas, tol=args.tol, maxit=args.maxit)
    print("alpha       iterations  status")
    for pt in result.points:
        status = "converged" if pt.converged else pt.stop_reason
        print(f"{pt.alpha:<10.4f}  {pt.iterations:<10d}  {status}")
    if result.best_alpha is not None:
        print(f"best alpha: {result.best_alpha:.4f}")
    return 0 if all(pt.converged for pt in result.points) else 2


def _cmd_bench(args) -> int:
    methods = [tok.strip() for tok in args.methods.split(",") if tok.strip()]
    if args.example == 1:
        rows = example1_rows(tol=args.tol, maxit=args.maxit)
    elif args.example == 2:
        if not args.a1:
            raise IlsqError("bench --example 2 requires --a1 <path.mtx>")
        rows = example2_rows(
            args.a1,
            c=args.c,
            methods=methods,
            alpha=args.alpha,
            tol=args.tol,
            maxit=args.maxit,
        )
    else:
        rows = example3_rows(
            n0=args.n0,
            methods=methods,
            alpha=args.alpha,
            tol=args.tol,
            maxit=args.maxit,
        )
    print(format_rows(rows, args.format))
    return 0 if all(row.converged for row in rows) else 2


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help; fold the
        # former into the documented usage-error code 1.
        return 0 if exc.code == 0 else 1
    handlers = {
        "analyze": _cmd_analyze,
        "solve": _cmd_solve,
        "sweep": _cmd_sweep,
        "bench": _cmd_bench,
    }
    try:
        return handlers[args.command](args)
    except (IlsqError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
