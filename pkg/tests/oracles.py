"""Independent dense oracles for the matrix-free code paths.

Everything here is assembled explicitly from dense blocks with np.block,
never through the library's matvec/apply routines, so agreement checks
compare two genuinely different computations.
"""

import numpy as np


def blocks(problem):
    return (
        problem.a1.to_dense(),
        problem.a2.to_dense(),
        problem.P.to_dense(),
        problem.p,
        problem.q,
        problem.n,
    )


def dense_projected(problem):
    """Explicit matrix of the 2n+q formulation."""
    _, a2, p_mat, _, q, n = blocks(problem)
    return np.block(
        [
            [p_mat, np.zeros((n, q)), np.eye(n)],
            [a2, np.eye(q), np.zeros((q, n))],
            [np.zeros((n, n)), -a2.T, np.eye(n)],
        ]
    )


def dense_projected_rhs(problem):
    a1 = problem.a1.to_dense()
    return np.concatenate([a1.T @ problem.b1, problem.b2, np.zeros(problem.n)])


def dense_residual(problem):
    """Explicit matrix of the p+n+q formulation."""
    a1, a2, p_mat, p, q, n = blocks(problem)
    return np.block(
        [
            [np.eye(p), a1, np.zeros((p, q))],
            [np.zeros((n, p)), p_mat, a2.T],
            [np.zeros((q, p)), a2, np.eye(q)],
        ]
    )


def dense_residual_rhs(problem):
    a1 = problem.a1.to_dense()
    return np.concatenate([problem.b1, a1.T @ problem.b1, problem.b2])


def dense_splitting_matrix(problem, alpha):
    """Explicit M_alpha for the projected formulation."""
    _, a2, p_mat, _, q, n = blocks(problem)
    return np.block(
        [
            [p_mat, np.zeros((n, q)), np.zeros((n, n))],
            [alpha * a2, np.eye(q), np.zeros((q, n))],
            [np.zeros((n, n)), -a2.T, np.eye(n)],
        ]
    )


def dense_bs_matrix(problem, kind):
    """Explicit M_1/M_2/M_3 for the residual formulation."""
    a1, a2, p_mat, p, q, n = blocks(problem)
    z_pn, z_pq = np.zeros((p, n)), np.zeros((p, q))
    z_np, z_nq = np.zeros((n, p)), np.zeros((n, q))
    z_qp, z_qn = np.zeros((q, p)), np.zeros((q, n))
    if kind == "bs1":
        return np.block(
            [[np.eye(p), z_pn, z_pq], [z_np, p_mat, z_nq], [z_qp, z_qn, np.eye(q)]]
        )
    if kind == "bs2":
        return np.block(
            [[np.eye(p), z_pn, z_pq], [z_np, p_mat, a2.T], [z_qp, z_qn, np.eye(q)]]
        )
    if kind == "bs3":
        return np.block(
            [[np.eye(p), a1, z_pq], [z_np, p_mat, z_nq], [z_qp, z_qn, np.eye(q)]]
        )
    raise ValueError(kind)


def dense_iteration_matrix(problem, alpha):
    """I - M_alpha^{-1} A, fully dense."""
    a = dense_projected(problem)
    m = dense_splitting_matrix(problem, alpha)
    return np.eye(a.shape[0]) - np.linalg.solve(m, a)


def spectral_radius(m):
    return float(np.abs(np.linalg.eigvals(m)).max())
