"""CSR sparse matrices, Cholesky factorization, and Matrix Market I/O.

Everything downstream (problem assembly, splittings, GMRES) is written
against the small surface defined here: an immutable CSR matrix, plain
1-D float64 numpy vectors, and a Cholesky factor that exposes both the
full solve and the two triangular half-solves.

Heavy kernels (sparse matvec, sparse-sparse products, LAPACK Cholesky)
are delegated to scipy; the types, canonicalization rules, and error
semantics are owned by this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.csgraph import reverse_cuthill_mckee

from .errors import (
    DimensionMismatch,
    EntryOutOfBounds,
    IndexOutOfRange,
    MalformedHeader,
    MatrixMarketError,
    NonFiniteInput,
    NonNumericEntry,
    NonSquare,
    NotPositiveDefinite,
    NotSymmetric,
    UnsupportedFormat,
)

__all__ = [
    "SparseMatrix",
    "CholeskyFactor",
    "as_vector",
    "cholesky_factor",
    "read_matrix_market",
    "DENSE_CHOLESKY_MAX",
    "SPD_PIVOT_RTOL",
]

# Cholesky uses dense LAPACK storage up to this order, banded (with a
# bandwidth-reducing permutation) above it.
DENSE_CHOLESKY_MAX = 2048

# A pivot at or below SPD_PIVOT_RTOL * max(diag) is treated as rank
# deficiency rather than roundoff.
SPD_PIVOT_RTOL = 1e-13


def as_vector(x, size: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce to a finite 1-D float64 array, checking length when given."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {v.shape}")
    if size is not None and v.size != size:
        raise DimensionMismatch(f"{name} has length {v.size}, expected {size}")
    if v.size and not np.all(np.isfinite(v)):
        raise NonFiniteInput(f"{name} contains NaN or Inf entries")
    return v


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Immutable CSR matrix in canonical form.

    Canonical means: within each row the column indices are strictly
    increasing, duplicates have been summed, and explicit zeros dropped.
    All constructors enforce this; the arrays are write-protected.
    """

    nrows: int
    ncols: int
    row_ptr: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        rp, ci, vals = self.row_ptr, self.col_idx, self.values
        if rp.shape != (self.nrows + 1,) or rp[0] != 0 or rp[-1] != vals.size:
            raise DimensionMismatch("row_ptr inconsistent with nrows/nnz")
        if ci.size != vals.size:
            raise DimensionMismatch("col_idx and values lengths differ")
        if np.any(np.diff(rp) < 0):
            raise DimensionMismatch("row_ptr must be non-decreasing")
        if ci.size:
            if ci.min() < 0 or ci.max() >= self.ncols:
                raise IndexOutOfRange("column index outside [0, ncols)")
            row_of = np.repeat(np.arange(self.nrows), np.diff(rp))
            same_row = row_of[1:] == row_of[:-1]
            if not np.all(np.diff(ci)[same_row] > 0):
                raise DimensionMismatch("column indices not strictly increasing within rows")
        for arr in (rp, ci, vals):
            arr.flags.writeable = False

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_triplets(cls, triplets, nrows: int, ncols: int) -> "SparseMatrix":
        """Build from (row, col, value) entries; duplicates are summed,
        explicit zeros dropped.

        ``triplets`` is either an iterable of (row, col, value) tuples or
        a tuple of three parallel arrays (rows, cols, values).
        """
        if (
            isinstance(triplets, tuple)
            and len(triplets) == 3
            and isinstance(triplets[0], np.ndarray)
        ):
            rows, cols, vals = triplets
        else:
            entries = list(triplets)
            if entries:
                rows, cols, vals = (np.asarray(a) for a in zip(*entries))
            else:
                rows = cols = np.zeros(0, dtype=np.int64)
                vals = np.zeros(0)
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if not (rows.size == cols.size == vals.size):
            raise DimensionMismatch("triplet arrays must have equal length")
        if nrows < 0 or ncols < 0:
            raise DimensionMismatch("matrix dimensions must be non-negative")
        if rows.size:
            if rows.min() < 0 or rows.max() >= nrows:
                raise IndexOutOfRange(f"row index outside [0, {nrows})")
            if cols.min() < 0 or cols.max() >= ncols:
                raise IndexOutOfRange(f"col index outside [0, {ncols})")
            if not np.all(np.isfinite(vals)):
                raise NonFiniteInput("triplet values contain NaN or Inf")
        coo = scipy.sparse.coo_matrix((vals, (rows, cols)), shape=(nrows, ncols))
        return cls._from_scipy(coo.tocsr(), nrows, ncols)

    @classmethod
    def from_dense(cls, a) -> "SparseMatrix":
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2:
            raise DimensionMismatch(f"expected 2-D array, got shape {a.shape}")
        if a.size and not np.all(np.isfinite(a)):
            raise NonFiniteInput("dense input contains NaN or Inf")
        return cls._from_scipy(scipy.sparse.csr_matrix(a), *a.shape)

    @classmethod
    def identity(cls, n: int, scale: float = 1.0) -> "SparseMatrix":
        idx = np.arange(n, dtype=np.int64)
        return cls.from_triplets((idx, idx, np.full(n, scale)), n, n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "SparseMatrix":
        return cls.from_triplets([], nrows, ncols)

    @classmethod
    def _from_scipy(cls, mat, nrows: int, ncols: int) -> "SparseMatrix":
        csr = mat.tocsr()
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        return cls(
            nrows,
            ncols,
            np.asarray(csr.indptr, dtype=np.int64),
            np.asarray(csr.indices, dtype=np.int64),
            np.asarray(csr.data, dtype=np.float64).copy(),
        )

    # -- views and exports -------------------------------------------------

    @cached_property
    def _csr(self):
        """scipy CSR view sharing this matrix's arrays (compute kernel)."""
        return scipy.sparse.csr_matrix(
            (self.values, self.col_idx, self.row_ptr), shape=(self.nrows, self.ncols)
        )

    @property
    def nnz(self) -> int:
        return int(self.values.size)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def to_dense(self) -> np.ndarray:
        return self._csr.toarray()

    def to_triplets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (rows, cols, values) arrays in canonical CSR order."""
        rows = np.repeat(np.arange(self.nrows, dtype=np.int64), np.diff(self.row_ptr))
        return rows, self.col_idx.copy(), self.values.copy()

    def diagonal(self) -> np.ndarray:
        return self._csr.diagonal()

    # -- linear algebra ----------------------------------------------------

    def matvec(self, x) -> np.ndarray:
        """y = A x."""
        x = as_vector(x, self.ncols, "x")
        return np.asarray(self._csr @ x)

    def rmatvec(self, y) -> np.ndarray:
        """x = A^T y, computed on the CSR data without materializing A^T."""
        y = as_vector(y, self.nrows, "y")
        return np.asarray(self._csr.T @ y)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix._from_scipy(self._csr.T, self.ncols, self.nrows)

    def gram(self) -> "SparseMatrix":
        """A^T A in canonical CSR, symmetrized so that S[i,j] == S[j,i] bitwise."""
        g = (self._csr.T @ self._csr).tocsr()
        sym = (g + g.T) * 0.5
        return SparseMatrix._from_scipy(sym, self.ncols, self.ncols)

    def scaled(self, c: float) -> "SparseMatrix":
        return SparseMatrix._from_scipy(self._csr * c, self.nrows, self.ncols)

    def sub(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot subtract {other.shape} from {self.shape}")
        return SparseMatrix._from_scipy(self._csr - other._csr, self.nrows, self.ncols)

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


@dataclass(frozen=True, eq=False)
class CholeskyFactor:
    """Cholesky factorization S = (P^T L)(P^T L)^T of an SPD matrix.

    ``perm`` is the (possibly identity) bandwidth-reducing permutation;
    dense factors store L as a full lower-triangular array, banded ones
    in LAPACK lower-band layout ``band[k, j] = L[j+k, j]``.
    """

    n: int
    kind: str  # "dense" | "banded"
    lower: np.ndarray | None = None
    band: np.ndarray | None = None
    bandwidth: int = 0
    perm: np.ndarray | None = None

    def __post_init__(self):
        for arr in (self.lower, self.band, self.perm):
            if arr is not None:
                arr.flags.writeable = False

    def _permute(self, w: np.ndarray) -> np.ndarray:
        return w if self.perm is None else w[self.perm]

    def _unpermute(self, w: np.ndarray) -> np.ndarray:
        if self.perm is None:
            return w
        out = np.empty_like(w)
        out[self.perm] = w
        return out

    def solve_lower(self, w) -> np.ndarray:
        """Apply (P^T L)^{-1}, i.e. solve the lower-triangular half."""
        w = as_vector(w, self.n, "w")
        wp = self._permute(w)
        if self.kind == "dense":
            return scipy.linalg.solve_triangular(self.lower, wp, lower=True)
        return scipy.linalg.solve_banded((self.bandwidth, 0), self.band, wp)

    def solve_lower_t(self, w) -> np.ndarray:
        """Apply (P^T L)^{-T}, the transposed half of :meth:`solve_lower`."""
        w = as_vector(w, self.n, "w")
        if self.kind == "dense":
            return self._unpermute(
                scipy.linalg.solve_triangular(self.lower, w, lower=True, trans="T")
            )
        return self._unpermute(
            scipy.linalg.solve_banded((0, self.bandwidth), self._band_t, w)
        )

    def solve(self, w) -> np.ndarray:
        """Solve S z = w using the two triangular half-solves."""
        return self.solve_lower_t(self.solve_lower(w))

    @cached_property
    def _band_t(self) -> np.ndarray:
        """Upper-band layout of L^T for :func:`scipy.linalg.solve_banded`."""
        bw, n = self.bandwidth, self.n
        ab = np.zeros((bw + 1, n))
        for d in range(bw + 1):
            ab[bw - d, d:] = self.band[d, : n - d]
        ab.flags.writeable = False
        return ab

    def lower_matrix(self) -> np.ndarray:
        """Densified P^T L (test/diagnostic use; O(n^2) memory)."""
        if self.kind == "dense":
            lp = self.lower
        else:
            lp = np.zeros((self.n, self.n))
            for d in range(self.bandwidth + 1):
                idx = np.arange(self.n - d)
                lp[idx + d, idx] = self.band[d, : self.n - d]
        return self._unpermute(lp)


def _check_square_symmetric(s: SparseMatrix) -> None:
    if s.nrows != s.ncols:
        raise NonSquare(f"expected square matrix, got {s.nrows}x{s.ncols}")
    diff = s._csr - s._csr.T
    scale = np.abs(s.values).max() if s.nnz else 0.0
    if diff.nnz and np.abs(diff.data).max() > 1e-12 * max(scale, 1.0):
        raise NotSymmetric("matrix is not symmetric")


def _check_pivots(pivots: np.ndarray, diag_max: float) -> None:
    if pivots.size and pivots.min() <= SPD_PIVOT_RTOL * max(diag_max, 0.0):
        raise NotPositiveDefinite("pivot below rank-deficiency tolerance")


def cholesky_factor(
    s: SparseMatrix, dense_threshold: int = DENSE_CHOLESKY_MAX
) -> CholeskyFactor:
    """Factor a symmetric positive definite matrix; doubles as the SPD test.

    Raises :class:`NotPositiveDefinite` when a pivot is non-positive or
    falls at or below ``SPD_PIVOT_RTOL * max(diag)``.
    """
    _check_square_symmetric(s)
    n = s.nrows
    diag_max = float(s.diagonal().max(initial=0.0))
    if diag_max <= 0.0:
        raise NotPositiveDefinite("diagonal has no positive entry")

    if n <= dense_threshold:
        try:
            lower = scipy.linalg.cholesky(s.to_dense(), lower=True)
        except scipy.linalg.LinAlgError as exc:
            raise NotPositiveDefinite(str(exc)) from exc
        _check_pivots(np.diag(lower) ** 2, diag_max)
        return CholeskyFactor(n=n, kind="dense", lower=lower)

    perm = np.asarray(reverse_cuthill_mckee(s._csr, symmetric_mode=True), dtype=np.int64)
    sp = s._csr[perm, :][:, perm].tocoo()
    bw = int(np.abs(sp.row - sp.col).max(initial=0))
    ab = np.zeros((bw + 1, n))
    mask = sp.row >= sp.col
    ab[sp.row[mask] - sp.col[mask], sp.col[mask]] = sp.data[mask]
    try:
        band = scipy.linalg.cholesky_banded(ab, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    _check_pivots(band[0, :] ** 2, diag_max)
    return CholeskyFactor(n=n, kind="banded", band=band, bandwidth=bw, perm=perm)


# -- Matrix Market reader ---------------------------------------------------


def _mm_tokenize_header(line: str) -> list[str]:
    tokens = line.strip().lower().split()
    if len(tokens) != 5 or tokens[0] != "%%matrixmarket":
        raise MalformedHeader(f"unrecognized Matrix Market banner: {line.strip()!r}")
    return tokens


def read_matrix_market(path) -> SparseMatrix:
    """Read a coordinate real general/symmetric Matrix Market file.

    1-based indices are converted to 0-based canonical CSR; symmetric
    storage is expanded to the full matrix. Pattern/complex/integer
    fields and other symmetries are rejected rather than coerced.
    """
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline()
        if not header:
            raise MalformedHeader("empty file")
        _, obj, fmt, field, symmetry = _mm_tokenize_header(header)
        if obj != "matrix" or fmt != "coordinate":
            raise UnsupportedFormat(f"only coordinate matrices are supported, got {obj}/{fmt}")
        if field != "real":
            raise UnsupportedFormat(f"field {field!r} is not supported (real only)")
        if symmetry not in ("general", "symmetric"):
            raise UnsupportedFormat(f"symmetry {symmetry!r} is not supported")

        size_line = None
        for line in fh:
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            size_line = stripped
            break
        if size_line is None:
            raise MalformedHeader("missing size line")
        parts = size_line.split()
        if len(parts) != 3:
            raise MalformedHeader(f"size line must have 3 fields: {size_line!r}")
        try:
            nrows, ncols, nnz = (int(p) for p in parts)
        except ValueError as exc:
            raise MalformedHeader(f"non-integer size line: {size_line!r}") from exc
        if nrows < 0 or ncols < 0 or nnz < 0:
            raise MalformedHeader("negative dimension in size line")

        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz)
        k = 0
        for line in fh:
            stripped = line.strip()
            if not stripped or stripped.startswith("%"):
                continue
            if k >= nnz:
                raise MatrixMarketError(f"more than the declared {nnz} entries")
            parts = stripped.split()
            if len(parts) != 3:
                raise NonNumericEntry(f"expected 'i j value', got {stripped!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
                v = float(parts[2])
            except ValueError as exc:
                raise NonNumericEntry(f"non-numeric entry line: {stripped!r}") from exc
            if not (1 <= i <= nrows and 1 <= j <= ncols):
                raise EntryOutOfBounds(f"entry ({i}, {j}) outside {nrows}x{ncols}")
            rows[k], cols[k], vals[k] = i - 1, j - 1, v
            k += 1
        if k != nnz:
            raise MatrixMarketError(f"declared {nnz} entries, found {k}")

    if symmetry == "symmetric":
        off = rows != cols
        rows, cols = (
            np.concatenate([rows, cols[off]]),
            np.concatenate([cols, rows[off]]),
        )
        vals = np.concatenate([vals, vals[off]])
    return SparseMatrix.from_triplets((rows, cols, vals), nrows, ncols)
