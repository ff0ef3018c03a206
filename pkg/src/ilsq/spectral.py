"""Spectral analysis of the block splitting.

The contraction behaviour of the stationary iteration is governed by the
eigenvalues mu of Q = (A1^T A1)^{-1} (A2^T A2), all of which lie in [0, 1)
when the Hessian is SPD.  Every nonzero eigenvalue lambda of the iteration
matrix solves the scalar quadratic

    lambda^2 - alpha*mu*lambda + (alpha - 1)*mu = 0

for some eigenvalue mu of Q, which yields closed forms for the convergence
interval (0, 1 + 1/mu_max), the optimal parameter 2/(1 + sqrt(1 - mu_max)),
and the optimal convergence factor mu_max/(1 + sqrt(1 - mu_max)).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError
from .model import Formulation, IlsProblem, assemble_block_operator

__all__ = [
    "SpectralSummary",
    "PowerIterationResult",
    "largest_q_eigenvalue",
    "mu_max",
    "convergence_interval",
    "alpha_opt",
    "rho_opt",
    "quad_roots",
    "q_spectrum",
    "predicted_rho",
    "spectral_summary",
    "EigenpairCaseReport",
    "verify_eigenpair_forms",
]

_POWER_SEED = 20240117
_EIGENPAIR_MAX_DIM = 200


@dataclass(frozen=True)
class SpectralSummary:
    """Closed-form convergence quantities derived from mu_max."""

    mu_max: float
    alpha_upper: float  # +inf when mu_max == 0
    alpha_opt: float
    rho_opt: float


@dataclass(frozen=True)
class PowerIterationResult:
    value: float
    converged: bool
    iterations: int


def largest_q_eigenvalue(
    problem: IlsProblem, tol: float = 1e-8, maxit: int = 5000
) -> PowerIterationResult:
    """Largest eigenvalue of Q = P^{-1} A2^T A2 by power iteration.

    Q itself is non-symmetric; iterating on the similar symmetric PSD
    operator L^{-1} A2^T A2 L^{-T} (L from P's Cholesky) makes the Ritz
    values real, non-negative, and monotonically convergent.  Stops when
    successive estimates differ by at most ``tol`` relatively.
    """
    a2, factor = problem.a2, problem.P_factor

    def apply(u):
        w = factor.solve_lower_t(u)
        return factor.solve_lower(a2.rmatvec(a2.matvec(w)))

    rng = np.random.default_rng(_POWER_SEED)
    v = rng.standard_normal(problem.n)
    v /= np.linalg.norm(v)
    theta = 0.0
    for k in range(1, maxit + 1):
        w = apply(v)
        new_theta = float(v @ w)
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0 or new_theta <= 0.0:
            # A2 (or its action along v) vanishes: spectrum is {0}.
            return PowerIterationResult(0.0, True, k)
        converged = abs(new_theta - theta) <= tol * new_theta
        theta = new_theta
        v = w / norm_w
        if converged:
            return PowerIterationResult(theta, True, k)
    return PowerIterationResult(theta, False, maxit)


def mu_max(problem: IlsProblem, tol: float = 1e-8, maxit: int = 5000) -> float:
    """Convenience wrapper around :func:`largest_q_eigenvalue`."""
    result = largest_q_eigenvalue(problem, tol=tol, maxit=maxit)
    if not result.converged:
        warnings.warn(
            f"power iteration did not reach tol={tol} in {maxit} iterations; "
            "returning best estimate",
            RuntimeWarning,
            stacklevel=2,
        )
    return result.value


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not 0.0 <= mu < 1.0:
        raise DomainError(f"mu_max must lie in [0, 1), got {mu}")
    return mu


def convergence_interval(mu: float) -> tuple[float, float]:
    """Open interval of parameters for which the iteration converges."""
    mu = _check_mu(mu)
    return (0.0, np.inf if mu == 0.0 else 1.0 + 1.0 / mu)


def alpha_opt(mu: float) -> float:
    """Parameter minimizing the convergence factor."""
    mu = _check_mu(mu)
    return 2.0 / (1.0 + np.sqrt(1.0 - mu))


def rho_opt(mu: float) -> float:
    """Convergence factor at the optimal parameter."""
    mu = _check_mu(mu)
    return mu / (1.0 + np.sqrt(1.0 - mu))


def quad_roots(alpha: float, mu: float) -> tuple[complex, complex]:
    """Both roots of lambda^2 - alpha*mu*lambda + (alpha-1)*mu = 0.

    A discriminant within 1e-14*(alpha^2 mu^2 + 1) of zero is treated as
    an exact double root so the tangent parameter value does not produce
    a spurious conjugate pair.
    """
    alpha = float(alpha)
    mu = float(mu)
    b = alpha * mu
    disc = b * b - 4.0 * (alpha - 1.0) * mu
    if abs(disc) <= 1e-14 * (b * b + 1.0):
        return (complex(b / 2.0), complex(b / 2.0))
    if disc > 0.0:
        s = np.sqrt(disc)
        return (complex((b + s) / 2.0), complex((b - s) / 2.0))
    s = np.sqrt(-disc)
    return (complex(b / 2.0, s / 2.0), complex(b / 2.0, -s / 2.0))


def q_spectrum(problem: IlsProblem) -> np.ndarray:
    """All eigenvalues of Q = P^{-1} A2^T A2 via the dense symmetric pencil.

    Test/desk-scale routine: densifies two n x n matrices.
    """
    k = problem.a2.gram().to_dense()
    p = problem.P.to_dense()
    return scipy.linalg.eigh(k, p, eigvals_only=True)


def predicted_rho(problem: IlsProblem, alpha: float, mus=None) -> float:
    """Spectral radius of the iteration matrix predicted by the quadratic.

    ``mus`` may supply a precomputed spectrum of Q; otherwise the dense
    pencil is solved.  The structural zero eigenvalues never change the
    maximum but are included for completeness.
    """
    if mus is None:
        mus = q_spectrum(problem)
    radius = 0.0
    for mu in np.atleast_1d(mus):
        r1, r2 = quad_roots(alpha, mu)
        radius = max(radius, abs(r1), abs(r2))
    return radius


def spectral_summary(
    problem: IlsProblem, tol: float = 1e-8, maxit: int = 5000
) -> SpectralSummary:
    mu = mu_max(problem, tol=tol, maxit=maxit)
    return SpectralSummary(
        mu_max=mu,
        alpha_upper=convergence_interval(mu)[1],
        alpha_opt=alpha_opt(mu),
        rho_opt=rho_opt(mu),
    )


# -- eigenpair structure of the preconditioned matrix -----------------------


@dataclass(frozen=True)
class EigenpairCaseReport:
    """Verification record for one structural eigenpair family."""

    case: str
    checked: int
    max_defect: float
    skipped: bool = False
    reason: str = ""


def _apply_complex(apply_real, v: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(v):
        return apply_real(v.real) + 1j * apply_real(v.imag)
    return apply_real(v)


def verify_eigenpair_forms(
    problem: IlsProblem, alpha: float, rng_seed: int = 7, n_random: int = 5
) -> list[EigenpairCaseReport]:
    """Check the three structural eigenvector families of the
    preconditioned matrix at desk scale.

    * general: for each eigenvalue lambda != 1 the eigenvector is
      ((1/(lambda-1)) P^{-1} A2^T y; y; A2^T y) where y is its middle block;
    * unit parameter: at alpha = 1 every (x; y; 0) has eigenvalue 1;
    * kernel: at alpha != 1 every (x; y; 0) with A2 x = 0 has eigenvalue 1
      (skipped, not failed, when A2 has trivial null space).

    Defects are ||C v - lambda v|| / ||v|| with C applied matrix-free.
    """
    from .splitting import PbsPreconditioner  # local import to avoid a cycle

    op = assemble_block_operator(problem, Formulation.PROJECTED)
    if op.dim > _EIGENPAIR_MAX_DIM:
        raise DomainError(
            f"eigenpair verification is test-scale only (dim {op.dim} > {_EIGENPAIR_MAX_DIM})"
        )
    prec = PbsPreconditioner(problem=problem, alpha=alpha)

    def apply_c(v):
        return _apply_complex(lambda u: prec.apply(op.matvec(u)), v)

    n, q = problem.n, problem.q
    a2_dense = problem.a2.to_dense()
    dense_c = np.empty((op.dim, op.dim))
    e = np.zeros(op.dim)
    for j in range(op.dim):
        e[j] = 1.0
        dense_c[:, j] = prec.apply(op.matvec(e))
        e[j] = 0.0
    eigvals, eigvecs = np.linalg.eig(dense_c)

    def defect(v, lam):
        return float(np.linalg.norm(apply_c(v) - lam * v) / np.linalg.norm(v))

    reports = []

    # general case: lambda != 1
    worst, checked = 0.0, 0
    for lam, w in zip(eigvals, eigvecs.T):
        if abs(lam - 1.0) <= 1e-6:
            continue
        y = w[n : n + q]
        z = _apply_complex(a2_dense.T.__matmul__, y)
        x = _apply_complex(problem.P_factor.solve, z) / (lam - 1.0)
        v = np.concatenate([x, y, z])
        worst = max(worst, defect(v, lam))
        checked += 1
    reports.append(EigenpairCaseReport("general", checked, worst))

    rng = np.random.default_rng(rng_seed)
    if abs(alpha - 1.0) <= 1e-14:
        worst = 0.0
        for _ in range(n_random):
            v = np.concatenate(
                [rng.standard_normal(n), rng.standard_normal(q), np.zeros(n)]
            )
            worst = max(worst, defect(v, 1.0))
        reports.append(EigenpairCaseReport("unit_parameter", n_random, worst))
        reports.append(
            EigenpairCaseReport("kernel", 0, 0.0, skipped=True, reason="alpha == 1")
        )
        return reports

    reports.append(
        EigenpairCaseReport("unit_parameter", 0, 0.0, skipped=True, reason="alpha != 1")
    )
    _, svals, vt = np.linalg.svd(a2_dense if q else np.zeros((1, n)))
    smax = svals.max(initial=0.0)
    null_mask = np.ones(n, dtype=bool)
    null_mask[: svals.size] = svals <= 1e-10 * max(smax, 1.0)
    kernel = vt[null_mask]
    if kernel.shape[0] == 0:
        reports.append(
            EigenpairCaseReport(
                "kernel", 0, 0.0, skipped=True, reason="A2 has full column rank"
            )
        )
        return reports
    worst, checked = 0.0, 0
    for kvec in kernel:
        for _ in range(max(1, n_random // 2)):
            v = np.concatenate([kvec, rng.standard_normal(q), np.zeros(n)])
            worst = max(worst, defect(v, 1.0))
            checked += 1
    reports.append(EigenpairCaseReport("kernel", checked, worst))
    return reports
