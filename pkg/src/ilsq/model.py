"""Partitioned indefinite least squares problems and their block formulations.

The problem data is a row-partitioned matrix (A1 over A2) and right-hand
side (b1; b2), with the sign matrix weighting the A1 rows positively and
the A2 rows negatively.  A unique minimizer exists iff the Hessian
H = A1^T A1 - A2^T A2 is SPD.

Two equivalent augmented linear systems are assembled as matrix-free
block operators:

* ``PROJECTED`` (order 2n+q), unknowns (x; r2; A1^T r1):

      [ P    0    I ] [x  ]   [A1^T b1]
      [ A2   I    0 ] [r2 ] = [b2     ]
      [ 0  -A2^T  I ] [r1h]   [0      ]

  with P = A1^T A1.  This is the form the parameterized block splitting
  and its preconditioner act on.

* ``RESIDUAL`` (order p+n+q), unknowns (r1; x; r2):

      [ I   A1    0  ] [r1]   [b1     ]
      [ 0   P   A2^T ] [x ] = [A1^T b1]
      [ 0   A2   I   ] [r2]   [b2     ]

  This is the form the three comparison block preconditioners act on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatch,
    HessianNotSPD,
    NotPositiveDefinite,
    RankDeficientA1,
    ZeroReference,
)
from .sparse import CholeskyFactor, SparseMatrix, as_vector, cholesky_factor

__all__ = [
    "IlsProblem",
    "Formulation",
    "BlockOperator",
    "SolveReport",
    "build_problem",
    "hessian_is_spd",
    "assemble_block_operator",
    "reference_solution",
    "augmented_reference",
    "rel_residual",
    "rel_error",
]

# Matrix-free operators are only densified for test-scale oracles.
DENSE_OPERATOR_MAX = 2048


@dataclass(frozen=True, eq=False)
class IlsProblem:
    """Partitioned problem data with the cached Gram matrix P = A1^T A1."""

    a1: SparseMatrix
    a2: SparseMatrix
    b1: np.ndarray
    b2: np.ndarray
    P: SparseMatrix = field(repr=False)
    P_factor: CholeskyFactor = field(repr=False)

    @property
    def n(self) -> int:
        return self.a1.ncols

    @property
    def p(self) -> int:
        return self.a1.nrows

    @property
    def q(self) -> int:
        return self.a2.nrows

    @property
    def m(self) -> int:
        return self.p + self.q

    @cached_property
    def b1_hat(self) -> np.ndarray:
        """A1^T b1, the projected upper right-hand side."""
        return self.a1.rmatvec(self.b1)

    @cached_property
    def hessian(self) -> SparseMatrix:
        """H = A1^T A1 - A2^T A2."""
        return self.P.sub(self.a2.gram())

    @cached_property
    def hessian_factor(self) -> CholeskyFactor:
        try:
            return cholesky_factor(self.hessian)
        except NotPositiveDefinite as exc:
            raise HessianNotSPD(
                "A1^T A1 - A2^T A2 is not SPD; the problem has no unique minimizer"
            ) from exc

    def __repr__(self) -> str:
        return f"IlsProblem(p={self.p}, q={self.q}, n={self.n})"


def build_problem(a1, a2, b1, b2) -> IlsProblem:
    """Validate dimensions, factor P = A1^T A1, and assemble the problem.

    Dense arrays are accepted for convenience and converted to CSR.
    Raises :class:`RankDeficientA1` when A1 has deficient column rank.
    """
    if isinstance(a1, np.ndarray):
        a1 = SparseMatrix.from_dense(a1)
    if isinstance(a2, np.ndarray):
        a2 = SparseMatrix.from_dense(a2)
    if a1.ncols != a2.ncols:
        raise DimensionMismatch(
            f"A1 has {a1.ncols} columns but A2 has {a2.ncols}"
        )
    n = a1.ncols
    if n < 1:
        raise DimensionMismatch("problem must have at least one unknown")
    if a1.nrows < n:
        raise DimensionMismatch(
            f"A1 is {a1.nrows}x{n}; full column rank needs at least {n} rows"
        )
    b1 = as_vector(b1, a1.nrows, "b1")
    b2 = as_vector(b2, a2.nrows, "b2")
    gram = a1.gram()
    try:
        factor = cholesky_factor(gram)
    except NotPositiveDefinite as exc:
        raise RankDeficientA1("A1 is not of full column rank") from exc
    return IlsProblem(a1=a1, a2=a2, b1=b1, b2=b2, P=gram, P_factor=factor)


def hessian_is_spd(problem: IlsProblem) -> bool:
    """True iff the Hessian A1^T A1 - A2^T A2 passes Cholesky."""
    try:
        problem.hessian_factor
    except HessianNotSPD:
        return False
    return True


class Formulation(enum.Enum):
    """Which augmented block system a :class:`BlockOperator` represents."""

    PROJECTED = "projected"  # order 2n+q, unknowns (x; r2; A1^T r1)
    RESIDUAL = "residual"    # order p+n+q, unknowns (r1; x; r2)


def _coerce_formulation(kind) -> Formulation:
    if isinstance(kind, Formulation):
        return kind
    return Formulation(str(kind).lower())


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """Matrix-free augmented operator over an :class:`IlsProblem`."""

    problem: IlsProblem
    formulation: Formulation

    @property
    def dim(self) -> int:
        pb = self.problem
        if self.formulation is Formulation.PROJECTED:
            return 2 * pb.n + pb.q
        return pb.p + pb.n + pb.q

    @property
    def block_sizes(self) -> tuple[int, int, int]:
        pb = self.problem
        if self.formulation is Formulation.PROJECTED:
            return (pb.n, pb.q, pb.n)
        return (pb.p, pb.n, pb.q)

    @property
    def x_slice(self) -> slice:
        """Location of the solution block inside the augmented vector."""
        if self.formulation is Formulation.PROJECTED:
            return slice(0, self.problem.n)
        return slice(self.problem.p, self.problem.p + self.problem.n)

    def split(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        s1, s2, _ = self.block_sizes
        return v[:s1], v[s1 : s1 + s2], v[s1 + s2 :]

    def matvec(self, v) -> np.ndarray:
        v = as_vector(v, self.dim, "v")
        pb = self.problem
        if self.formulation is Formulation.PROJECTED:
            x, r2, r1h = self.split(v)
            return np.concatenate(
                [
                    pb.P.matvec(x) + r1h,
                    pb.a2.matvec(x) + r2,
                    -pb.a2.rmatvec(r2) + r1h,
                ]
            )
        r1, x, r2 = self.split(v)
        return np.concatenate(
            [
                r1 + pb.a1.matvec(x),
                pb.P.matvec(x) + pb.a2.rmatvec(r2),
                pb.a2.matvec(x) + r2,
            ]
        )

    def rhs(self) -> np.ndarray:
        pb = self.problem
        if self.formulation is Formulation.PROJECTED:
            return np.concatenate([pb.b1_hat, pb.b2, np.zeros(pb.n)])
        return np.concatenate([pb.b1, pb.b1_hat, pb.b2])

    def dense(self) -> np.ndarray:
        """Assemble the operator column by column (test-scale oracle only)."""
        if self.dim > DENSE_OPERATOR_MAX:
            raise DimensionMismatch(
                f"refusing to densify operator of order {self.dim} (limit {DENSE_OPERATOR_MAX})"
            )
        out = np.empty((self.dim, self.dim))
        e = np.zeros(self.dim)
        for j in range(self.dim):
            e[j] = 1.0
            out[:, j] = self.matvec(e)
            e[j] = 0.0
        return out


def assemble_block_operator(problem: IlsProblem, kind) -> BlockOperator:
    """Matrix-free operator for one of the two augmented formulations."""
    return BlockOperator(problem=problem, formulation=_coerce_formulation(kind))


def reference_solution(problem: IlsProblem) -> np.ndarray:
    """Solve H x = A1^T b1 - A2^T b2 by Cholesky of the Hessian."""
    rhs = problem.b1_hat - problem.a2.rmatvec(problem.b2)
    return problem.hessian_factor.solve(rhs)


def augmented_reference(problem: IlsProblem, kind) -> np.ndarray:
    """Exact augmented solution for the requested formulation."""
    x = reference_solution(problem)
    r2 = problem.b2 - problem.a2.matvec(x)
    if _coerce_formulation(kind) is Formulation.PROJECTED:
        return np.concatenate([x, r2, problem.a2.rmatvec(r2)])
    r1 = problem.b1 - problem.a1.matvec(x)
    return np.concatenate([r1, x, r2])


@dataclass
class SolveReport:
    """Outcome of one solver run (stationary iteration or GMRES)."""

    iterations: int
    converged: bool
    rel_residual_history: np.ndarray
    final_rel_residual: float
    rel_error: float | None = None
    wall_seconds: float = 0.0
    stop_reason: str = "converged"
    error_history: np.ndarray | None = None

    def __str__(self) -> str:
        status = self.stop_reason if not self.converged else "converged"
        err = f", err={self.rel_error:.2e}" if self.rel_error is not None else ""
        return (
            f"{status} in {self.iterations} iterations"
            f" (rel={self.final_rel_residual:.2e}{err}, {self.wall_seconds:.3f}s)"
        )


def rel_residual(operator: BlockOperator, rhs, x) -> float:
    """||rhs - A x||_2 / ||rhs||_2, with the zero-start convention r0 = rhs."""
    rhs = as_vector(rhs, operator.dim, "rhs")
    denom = np.linalg.norm(rhs)
    if denom == 0.0:
        raise ZeroReference("relative residual undefined for zero right-hand side")
    return float(np.linalg.norm(rhs - operator.matvec(x)) / denom)


def rel_error(x, x_ref) -> float:
    """||x - x_ref||_2 / ||x_ref||_2."""
    x = np.asarray(x, dtype=np.float64)
    x_ref = np.asarray(x_ref, dtype=np.float64)
    if x.shape != x_ref.shape:
        raise DimensionMismatch(f"shape {x.shape} vs reference {x_ref.shape}")
    denom = np.linalg.norm(x_ref)
    if denom == 0.0:
        raise ZeroReference("relative error undefined for zero reference")
    return float(np.linalg.norm(x - x_ref) / denom)
