"""Problem generators for the benchmark experiments and tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, NonSquare
from .model import IlsProblem, build_problem
from .sparse import SparseMatrix, read_matrix_market

__all__ = [
    "PdeSpec",
    "gen_example1",
    "gen_identity_shifted",
    "pde_matrix",
    "gen_pde_problem",
    "gen_random_problem",
    "parse_problem_spec",
]


def gen_example1() -> IlsProblem:
    """Small dense benchmark problem with known spectral quantities.

    3x3 upper block, 4x3 lower block, all-ones right-hand sides; the
    Hessian is SPD and mu_max is about 0.4976.
    """
    a1 = np.array(
        [
            [6.0, 1.0, 1.0],
            [2.0, 4.0, 5.0],
            [1.0, 1.0, 5.0],
        ]
    )
    a2 = np.array(
        [
            [2.0, 1.0, 1.0],
            [1.0, 1.0, 1.0],
            [1.0, 2.0, 2.0],
            [0.0, 1.0, 1.0],
        ]
    )
    return build_problem(a1, a2, np.ones(3), np.ones(4))


def gen_identity_shifted(path, c: float) -> IlsProblem:
    """Load a square matrix as A1 and pair it with A2 = c * I.

    Right-hand sides are all ones, so p = q = n.
    """
    a1 = read_matrix_market(path)
    if a1.nrows != a1.ncols:
        raise NonSquare(f"{path}: expected a square matrix, got {a1.nrows}x{a1.ncols}")
    n = a1.nrows
    a2 = SparseMatrix.identity(n, scale=float(c))
    return build_problem(a1, a2, np.ones(n), np.ones(n))


@dataclass(frozen=True)
class PdeSpec:
    """Convection-diffusion-reaction test problem on the unit square.

    The operator is -Lap(u) + sin(x+y) u_x + cos(x-y) u_y + 50(x+y) u with
    Dirichlet boundary, discretized by second-order central differences on
    an n0 x n0 interior grid with mesh size h = 1/(n0+1).
    """

    n0: int
    a2_scale: float = 0.7

    def __post_init__(self):
        if self.n0 < 1:
            raise DomainError(f"n0 must be >= 1, got {self.n0}")

    @property
    def h(self) -> float:
        return 1.0 / (self.n0 + 1)


def pde_matrix(spec: PdeSpec) -> SparseMatrix:
    """Central-difference matrix of order n0^2, lexicographic ordering.

    Node (i, j) (1-based, x-index i fastest) maps to row (j-1)*n0 + (i-1).
    """
    n0, h = spec.n0, spec.h
    inv_h2 = 1.0 / (h * h)
    inv_2h = 1.0 / (2.0 * h)
    jj, ii = np.meshgrid(np.arange(1, n0 + 1), np.arange(1, n0 + 1), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    x, y = ii * h, jj * h
    k = np.arange(n0 * n0, dtype=np.int64)
    conv_x = np.sin(x + y) * inv_2h
    conv_y = np.cos(x - y) * inv_2h

    rows = [k]
    cols = [k]
    vals = [4.0 * inv_h2 + 50.0 * (x + y)]
    east = ii < n0
    rows.append(k[east])
    cols.append(k[east] + 1)
    vals.append(-inv_h2 + conv_x[east])
    west = ii > 1
    rows.append(k[west])
    cols.append(k[west] - 1)
    vals.append(-inv_h2 - conv_x[west])
    north = jj < n0
    rows.append(k[north])
    cols.append(k[north] + n0)
    vals.append(-inv_h2 + conv_y[north])
    south = jj > 1
    rows.append(k[south])
    cols.append(k[south] - n0)
    vals.append(-inv_h2 - conv_y[south])

    triplets = (np.concatenate(rows), np.concatenate(cols), np.concatenate(vals))
    return SparseMatrix.from_triplets(triplets, n0 * n0, n0 * n0)


def gen_pde_problem(spec: PdeSpec) -> IlsProblem:
    """Discretized PDE matrix as A1, scaled identity as A2, all-ones rhs."""
    a1 = pde_matrix(spec)
    n = a1.nrows
    a2 = SparseMatrix.identity(n, scale=spec.a2_scale)
    return build_problem(a1, a2, np.ones(n), np.ones(n))


def gen_random_problem(
    n: int,
    p: int,
    q: int,
    mu_target: float | None = None,
    seed: int = 0,
    null_dim: int = 0,
    b_entries: str = "random",
) -> IlsProblem:
    """Well-conditioned random problem, optionally with a prescribed mu_max.

    ``mu_target`` in (0, 1) rescales A2 so the largest eigenvalue of
    P^{-1} A2^T A2 hits the target (which also guarantees an SPD Hessian).
    ``null_dim`` forces A2 to have a null space of at least that dimension.
    """
    if p < n:
        raise DomainError(f"need p >= n, got p={p}, n={n}")
    rng = np.random.default_rng(seed)
    a1 = 0.3 * rng.standard_normal((p, n))
    a1[:n, :n] += np.diag(rng.uniform(1.5, 2.5, size=n))
    if null_dim > 0:
        rank = max(1, n - null_dim)
        a2 = rng.standard_normal((q, rank)) @ rng.standard_normal((rank, n))
    else:
        a2 = rng.standard_normal((q, n))
    if mu_target is not None:
        if not 0.0 < mu_target < 1.0:
            raise DomainError(f"mu_target must lie in (0, 1), got {mu_target}")
        mu_cur = scipy.linalg.eigh(
            a2.T @ a2, a1.T @ a1, eigvals_only=True
        )[-1]
        if mu_cur <= 0.0:
            raise DomainError("A2 vanished; cannot rescale to mu_target")
        a2 *= np.sqrt(mu_target / mu_cur)
    if b_entries == "ones":
        b1, b2 = np.ones(p), np.ones(q)
    else:
        b1, b2 = rng.standard_normal(p), rng.standard_normal(q)
    return build_problem(a1, a2, b1, b2)


def parse_problem_spec(spec: str) -> IlsProblem:
    """Build a problem from a CLI spec string.

    Grammar: ``example1`` | ``mtx:<path>:<c>`` | ``pde:<n0>``.
    """
    spec = spec.strip()
    if spec == "example1":
        return gen_example1()
    if spec.startswith("mtx:"):
        rest = spec[len("mtx:") :]
        path, sep, c_str = rest.rpartition(":")
        if not sep or not path:
            raise ValueError(f"expected mtx:<path>:<c>, got {spec!r}")
        try:
            c = float(c_str)
        except ValueError as exc:
            raise ValueError(f"bad shift value in {spec!r}") from exc
        return gen_identity_shifted(path, c)
    if spec.startswith("pde:"):
        try:
            n0 = int(spec[len("pde:") :])
        except ValueError as exc:
            raise ValueError(f"bad grid count in {spec!r}") from exc
        return gen_pde_problem(PdeSpec(n0=n0))
    raise ValueError(
        f"unrecognized problem spec {spec!r}; use example1, mtx:<path>:<c>, or pde:<n0>"
    )
