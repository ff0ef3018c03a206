"""Benchmark harness: parameter sweeps, method comparisons, table output."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import HessianNotSPD, ZeroReference
from .gmres import GmresConfig, gmres
from .model import Formulation, IlsProblem, assemble_block_operator, rel_error, reference_solution
from .problems import PdeSpec, gen_identity_shifted, gen_pde_problem
from .splitting import BsPreconditioner, PbsPreconditioner, pbs_iterate

__all__ = [
    "BenchRow",
    "SweepPoint",
    "SweepResult",
    "alpha_sweep",
    "run_benchmark",
    "example1_rows",
    "example2_rows",
    "example3_rows",
    "format_rows",
    "DEFAULT_METHODS",
]

DEFAULT_METHODS = ("pbs", "bs1", "bs2", "bs3", "none")


@dataclass(frozen=True)
class BenchRow:
    """One table row: problem size, method, and solve outcome."""

    problem: str
    method: str
    iterations: int
    wall_seconds: float
    rel: float
    err: float
    converged: bool


@dataclass(frozen=True)
class SweepPoint:
    alpha: float
    iterations: int
    converged: bool
    stop_reason: str


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]

    @property
    def best_alpha(self) -> float | None:
        """Parameter with the fewest iterations among converged runs."""
        converged = [pt for pt in self.points if pt.converged]
        if not converged:
            return None
        return min(converged, key=lambda pt: pt.iterations).alpha


def alpha_sweep(
    problem: IlsProblem, alphas, tol: float = 1e-11, maxit: int = 1000
) -> SweepResult:
    """Run the stationary iteration for each parameter value."""
    points = []
    for alpha in alphas:
        _, report = pbs_iterate(problem, float(alpha), tol=tol, maxit=maxit)
        points.append(
            SweepPoint(
                alpha=float(alpha),
                iterations=report.iterations,
                converged=report.converged,
                stop_reason=report.stop_reason,
            )
        )
    return SweepResult(points=tuple(points))


def _problem_label(problem: IlsProblem) -> str:
    return f"{problem.m}x{problem.n}"


def _parse_method(spec: str, default_alpha: float) -> tuple[str, float]:
    name, _, alpha_str = spec.partition(":")
    name = name.strip().lower()
    alpha = float(alpha_str) if alpha_str else default_alpha
    if name not in DEFAULT_METHODS:
        raise ValueError(f"unknown method {spec!r}; choose from {DEFAULT_METHODS}")
    return name, alpha


def _reference_or_none(problem: IlsProblem) -> np.ndarray | None:
    try:
        return reference_solution(problem)
    except HessianNotSPD:
        return None


def run_benchmark(
    problem: IlsProblem,
    methods=DEFAULT_METHODS,
    config: GmresConfig = GmresConfig(restart=10),
    alpha: float = 1.0,
) -> list[BenchRow]:
    """GMRES comparison across preconditioners on one problem.

    ``pbs`` (optionally ``pbs:<alpha>``) runs on the projected formulation,
    the ``bs*`` methods on the residual formulation, ``none`` runs
    unpreconditioned on the projected formulation.  The error column is
    measured on the solution block against the direct reference solve.
    """
    label = _problem_label(problem)
    x_ref = _reference_or_none(problem)
    rows = []
    for spec in methods:
        name, alpha_eff = _parse_method(spec, alpha)
        if name == "pbs":
            op = assemble_block_operator(problem, Formulation.PROJECTED)
            prec = PbsPreconditioner(problem=problem, alpha=alpha_eff)
            method_label = f"pbs(alpha={alpha_eff:g})"
        elif name == "none":
            op = assemble_block_operator(problem, Formulation.PROJECTED)
            prec = None
            method_label = "none"
        else:
            op = assemble_block_operator(problem, Formulation.RESIDUAL)
            prec = BsPreconditioner(problem=problem, kind=name)
            method_label = name
        x, report = gmres(op, op.rhs(), config, prec)
        err = math.nan
        if x_ref is not None:
            try:
                err = rel_error(x[op.x_slice], x_ref)
            except ZeroReference:
                pass
        rows.append(
            BenchRow(
                problem=label,
                method=method_label,
                iterations=report.iterations,
                wall_seconds=report.wall_seconds,
                rel=report.final_rel_residual,
                err=err,
                converged=report.converged,
            )
        )
    return rows


def example1_rows(
    alphas=(0.7, 0.8, 1.0, None, 1.4, 1.6, 1.8),
    tol: float = 1e-11,
    maxit: int = 1000,
) -> list[BenchRow]:
    """Stationary-iteration counts over a parameter grid on the small
    benchmark problem; a None entry is replaced by the computed optimum."""
    from .model import augmented_reference
    from .problems import gen_example1
    from .spectral import alpha_opt, mu_max

    problem = gen_example1()
    label = _problem_label(problem)
    resolved = [alpha_opt(mu_max(problem)) if a is None else float(a) for a in alphas]
    ref = augmented_reference(problem, Formulation.PROJECTED)
    x_ref = reference_solution(problem)
    rows = []
    for alpha in resolved:
        v, report = pbs_iterate(problem, alpha, tol=tol, maxit=maxit, reference=ref)
        err = rel_error(v[: problem.n], x_ref)
        rows.append(
            BenchRow(
                problem=label,
                method=f"pbs(alpha={alpha:.4f})",
                iterations=report.iterations,
                wall_seconds=report.wall_seconds,
                rel=report.final_rel_residual,
                err=err,
                converged=report.converged,
            )
        )
    return rows


def example2_rows(
    a1_path,
    c: float = 6.0,
    methods=DEFAULT_METHODS,
    alpha: float = 1.0,
    restart: int | None = 10,
    tol: float = 1e-11,
    maxit: int = 1000,
) -> list[BenchRow]:
    """Square matrix from a Matrix Market file with A2 = c*I, GMRES(10)."""
    problem = gen_identity_shifted(a1_path, c)
    config = GmresConfig(restart=restart, tol=tol, maxit=maxit)
    return run_benchmark(problem, methods, config, alpha=alpha)


def example3_rows(
    n0: int = 85,
    a2_scale: float = 0.7,
    methods=DEFAULT_METHODS,
    alpha: float = 1.0,
    tol: float = 1e-11,
    maxit: int = 1000,
) -> list[BenchRow]:
    """Convection-diffusion problem with full (non-restarted) GMRES."""
    problem = gen_pde_problem(PdeSpec(n0=n0, a2_scale=a2_scale))
    config = GmresConfig(restart=None, tol=tol, maxit=maxit)
    return run_benchmark(problem, methods, config, alpha=alpha)


def format_rows(rows: list[BenchRow], fmt: str = "table") -> str:
    """Render rows as an aligned text table or CSV."""
    header = ("problem", "method", "iter", "cpu_s", "rel", "err", "converged")
    cells = [
        (
            row.problem,
            row.method,
            str(row.iterations),
            f"{row.wall_seconds:.3f}",
            f"{row.rel:.2e}",
            "nan" if math.isnan(row.err) else f"{row.err:.2e}",
            str(row.converged).lower(),
        )
        for row in rows
    ]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(header)
        writer.writerows(cells)
        return buf.getvalue().rstrip("\n")
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}; use 'table' or 'csv'")
    widths = [
        max(len(header[i]), *(len(c[i]) for c in cells)) if cells else len(header[i])
        for i in range(len(header))
    ]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    for c in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(c, widths)))
    return "\n".join(lines)
