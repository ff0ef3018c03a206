"""Indefinite least squares solvers built on a parameterized block splitting.

The package provides the partitioned problem model, a stationary iteration
with a tunable coupling parameter, the induced left preconditioner for
GMRES, three comparison block preconditioners, spectral analysis of the
iteration (convergence interval, optimal parameter, convergence factor),
and a benchmark harness with a CLI.
"""

from .bench import (
    BenchRow,
    SweepPoint,
    SweepResult,
    alpha_sweep,
    example1_rows,
    example2_rows,
    example3_rows,
    format_rows,
    run_benchmark,
)
from .errors import (
    DimensionMismatch,
    DomainError,
    EntryOutOfBounds,
    HessianNotSPD,
    IlsqError,
    IndexOutOfRange,
    MalformedHeader,
    MatrixMarketError,
    NonNumericEntry,
    NonSquare,
    NotPositiveDefinite,
    RankDeficientA1,
    UnsupportedFormat,
    ZeroReference,
)
from .gmres import GmresConfig, GmresDiagnostics, gmres
from .model import (
    BlockOperator,
    Formulation,
    IlsProblem,
    SolveReport,
    assemble_block_operator,
    augmented_reference,
    build_problem,
    hessian_is_spd,
    rel_error,
    rel_residual,
    reference_solution,
)
from .problems import (
    PdeSpec,
    gen_example1,
    gen_identity_shifted,
    gen_pde_problem,
    gen_random_problem,
    parse_problem_spec,
    pde_matrix,
)
from .sparse import CholeskyFactor, SparseMatrix, cholesky_factor, read_matrix_market
from .spectral import (
    EigenpairCaseReport,
    SpectralSummary,
    alpha_opt,
    convergence_interval,
    largest_q_eigenvalue,
    mu_max,
    predicted_rho,
    q_spectrum,
    quad_roots,
    rho_opt,
    spectral_summary,
    verify_eigenpair_forms,
)
from .splitting import (
    BsPreconditioner,
    PbsPreconditioner,
    apply_bs,
    apply_pbs,
    pbs_iterate,
    pbs_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "BenchRow",
    "BlockOperator",
    "BsPreconditioner",
    "CholeskyFactor",
    "DimensionMismatch",
    "DomainError",
    "EigenpairCaseReport",
    "EntryOutOfBounds",
    "Formulation",
    "GmresConfig",
    "GmresDiagnostics",
    "HessianNotSPD",
    "IlsProblem",
    "IlsqError",
    "IndexOutOfRange",
    "MalformedHeader",
    "MatrixMarketError",
    "NonNumericEntry",
    "NonSquare",
    "NotPositiveDefinite",
    "PbsPreconditioner",
    "PdeSpec",
    "RankDeficientA1",
    "SolveReport",
    "SparseMatrix",
    "SpectralSummary",
    "SweepPoint",
    "SweepResult",
    "UnsupportedFormat",
    "ZeroReference",
    "alpha_opt",
    "alpha_sweep",
    "apply_bs",
    "apply_pbs",
    "assemble_block_operator",
    "augmented_reference",
    "build_problem",
    "cholesky_factor",
    "convergence_interval",
    "example1_rows",
    "example2_rows",
    "example3_rows",
    "format_rows",
    "gen_example1",
    "gen_identity_shifted",
    "gen_pde_problem",
    "gen_random_problem",
    "gmres",
    "hessian_is_spd",
    "largest_q_eigenvalue",
    "mu_max",
    "parse_problem_spec",
    "pbs_iterate",
    "pbs_sweep",
    "pde_matrix",
    "predicted_rho",
    "q_spectrum",
    "quad_roots",
    "read_matrix_market",
    "rel_error",
    "rel_residual",
    "reference_solution",
    "rho_opt",
    "run_benchmark",
    "spectral_summary",
    "verify_eigenpair_forms",
]
