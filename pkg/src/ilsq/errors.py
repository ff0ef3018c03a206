"""Exception hierarchy shared by all ilsq modules."""


class IlsqError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(IlsqError):
    """Operands have incompatible shapes."""


class IndexOutOfRange(IlsqError):
    """A row or column index lies outside the declared matrix shape."""


class NonFiniteInput(IlsqError):
    """An input vector or matrix contains NaN or Inf entries."""


class NotSymmetric(IlsqError):
    """A matrix required to be symmetric is not (beyond roundoff)."""


class NotPositiveDefinite(IlsqError):
    """Cholesky factorization hit a non-positive (or negligible) pivot."""


class RankDeficientA1(IlsqError):
    """The upper block of the partitioned matrix is not of full column rank."""


class HessianNotSPD(IlsqError):
    """The problem Hessian is not symmetric positive definite; no unique solution."""


class ZeroReference(IlsqError):
    """A relative quantity was requested against a zero reference."""


class DomainError(IlsqError, ValueError):
    """A scalar argument lies outside its mathematically valid domain."""


class NonSquare(IlsqError):
    """A square matrix was expected."""


class MatrixMarketError(IlsqError):
    """Base class for Matrix Market parsing failures."""


class MalformedHeader(MatrixMarketError):
    """The banner or size line of a Matrix Market file could not be parsed."""


class UnsupportedFormat(MatrixMarketError):
    """The Matrix Market file is valid but uses an unsupported field/symmetry."""


class NonNumericEntry(MatrixMarketError):
    """A coordinate data line contains a token that is not a number."""


class EntryOutOfBounds(MatrixMarketError):
    """A coordinate entry lies outside the bounds declared in the size line."""
