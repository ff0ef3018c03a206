"""Restarted and full GMRES with optional left preconditioning.

Arnoldi with single-pass modified Gram-Schmidt; the small least-squares
problem is updated by Givens rotations.  Convergence is declared on the
true (unpreconditioned) relative residual, checked at every inner step by
default so iteration counts are comparable across preconditioners; a
cheaper cycle-end-only check is available via the config.  Iterations are
counted as total inner Arnoldi steps across restart cycles.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, DomainError, ZeroReference
from .model import BlockOperator, SolveReport
from .sparse import as_vector

__all__ = ["GmresConfig", "GmresDiagnostics", "gmres"]

# h_{j+1,j} at or below HAPPY_RTOL * ||rhs|| terminates the Arnoldi process
# with the exact solution of the current Krylov space.
HAPPY_RTOL = 1e-14


@dataclass(frozen=True)
class GmresConfig:
    """Solver options.

    restart=None runs full (non-restarted) GMRES; maxit counts total inner
    iterations across all cycles.
    """

    restart: int | None = None
    tol: float = 1e-11
    maxit: int = 1000
    track_true_residual: bool = True

    def __post_init__(self):
        if self.restart is not None and self.restart < 1:
            raise DomainError(f"restart must be >= 1, got {self.restart}")
        if not self.tol > 0.0:
            raise DomainError(f"tol must be positive, got {self.tol}")
        if self.maxit < 1:
            raise DomainError(f"maxit must be >= 1, got {self.maxit}")


@dataclass
class GmresDiagnostics:
    """Per-cycle internals captured for verification (test scale)."""

    bases: list[np.ndarray] = field(default_factory=list)
    givens_estimates: list[np.ndarray] = field(default_factory=list)


def _resolve_preconditioner(prec):
    if prec is None:
        return lambda r: r
    if hasattr(prec, "apply"):
        return prec.apply
    if callable(prec):
        return prec
    raise TypeError(f"preconditioner {prec!r} is neither callable nor has .apply")


def gmres(
    operator: BlockOperator,
    rhs,
    config: GmresConfig = GmresConfig(),
    prec=None,
    diagnostics: GmresDiagnostics | None = None,
) -> tuple[np.ndarray, SolveReport]:
    """Solve operator x = rhs from the zero start.

    ``prec`` is an object with ``.apply`` (or a callable) realizing the
    left preconditioner solve; None runs unpreconditioned GMRES.  Returns
    the solution and a :class:`SolveReport` whose residual history holds
    true relative residuals (per inner step, or per cycle end when
    ``track_true_residual`` is off).
    """
    apply_m = _resolve_preconditioner(prec)
    dim = operator.dim
    rhs = as_vector(rhs, dim, "rhs")
    t0 = time.perf_counter()

    b_norm = np.linalg.norm(rhs)
    x = np.zeros(dim)
    if b_norm == 0.0:
        return x, SolveReport(
            iterations=0,
            converged=True,
            rel_residual_history=np.zeros(0),
            final_rel_residual=0.0,
            wall_seconds=time.perf_counter() - t0,
        )

    happy_floor = HAPPY_RTOL * b_norm
    history: list[float] = []
    total = 0
    converged = False
    reason = "max_iterations"
    true_rel = 1.0

    while total < config.maxit and not converged:
        r = rhs - operator.matvec(x)
        true_rel = np.linalg.norm(r) / b_norm
        if true_rel <= config.tol:
            converged, reason = True, "converged"
            break
        z = apply_m(r)
        beta = np.linalg.norm(z)
        if beta == 0.0:
            # Preconditioned residual vanished without meeting the true
            # tolerance; nothing further can be extracted.
            reason = "stagnated"
            break
        k_max = min(config.restart or dim, dim, config.maxit - total)
        basis = [z / beta]
        h = np.zeros((k_max + 1, k_max))
        cs = np.zeros(k_max)
        sn = np.zeros(k_max)
        g = np.zeros(k_max + 1)
        g[0] = beta
        estimates = np.empty(0)
        j_last = -1
        x_cand = x

        for j in range(k_max):
            w = apply_m(operator.matvec(basis[j]))
            for i in range(j + 1):
                h[i, j] = basis[i] @ w
                w -= h[i, j] * basis[i]
            h[j + 1, j] = np.linalg.norm(w)
            happy = h[j + 1, j] <= happy_floor
            if not happy:
                basis.append(w / h[j + 1, j])
            for i in range(j):
                h[i, j], h[i + 1, j] = (
                    cs[i] * h[i, j] + sn[i] * h[i + 1, j],
                    -sn[i] * h[i, j] + cs[i] * h[i + 1, j],
                )
            denom = np.hypot(h[j, j], h[j + 1, j])
            cs[j], sn[j] = h[j, j] / denom, h[j + 1, j] / denom
            h[j, j] = denom
            h[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            total += 1
            j_last = j
            estimates = np.append(estimates, abs(g[j + 1]))

            last_in_cycle = happy or j == k_max - 1 or total >= config.maxit
            if config.track_true_residual or last_in_cycle:
                y = scipy.linalg.solve_triangular(h[: j + 1, : j + 1], g[: j + 1])
                x_cand = x + np.column_stack(basis[: j + 1]) @ y
                true_rel = np.linalg.norm(rhs - operator.matvec(x_cand)) / b_norm
                history.append(float(true_rel))
                if true_rel <= config.tol:
                    converged = True
                    reason = "happy_breakdown" if happy else "converged"
                    break
            if happy:
                # Exact termination of Arnoldi: the Krylov space contains
                # the exact preconditioned solution.
                converged, reason = True, "happy_breakdown"
                break

        x = x_cand
        if diagnostics is not None:
            diagnostics.bases.append(np.column_stack(basis[: j_last + 2]))
            diagnostics.givens_estimates.append(estimates)

    report = SolveReport(
        iterations=total,
        converged=converged,
        rel_residual_history=np.asarray(history),
        final_rel_residual=float(history[-1]) if history else float(true_rel),
        wall_seconds=time.perf_counter() - t0,
        stop_reason=reason,
    )
    return x, report
