import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from ilsq.errors import (
    EntryOutOfBounds,
    IndexOutOfRange,
    MalformedHeader,
    MatrixMarketError,
    NonNumericEntry,
    NotPositiveDefinite,
    UnsupportedFormat,
)
from ilsq.sparse import SparseMatrix, cholesky_factor, read_matrix_market

# Example-1 blocks, also used to pin a handful of hand-computed values.
A1_ROWS = [[6.0, 1.0, 1.0], [2.0, 4.0, 5.0], [1.0, 1.0, 5.0]]
A2_ROWS = [[2.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 2.0, 2.0], [0.0, 1.0, 1.0]]


def triplets_of(rows):
    out = []
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out.append((i, j, v))
    return out


# -- construction ------------------------------------------------------------


def test_empty_matrix():
    m = SparseMatrix.from_triplets([], 2, 2)
    assert m.shape == (2, 2)
    assert m.nnz == 0
    assert np.array_equal(m.to_dense(), np.zeros((2, 2)))


def test_duplicates_are_summed():
    m = SparseMatrix.from_triplets([(0, 0, 1.0), (0, 0, 2.0)], 1, 1)
    assert m.nnz == 1
    assert m.values[0] == 3.0


def test_explicit_zeros_dropped():
    # the 4x3 lower block of the example problem has a zero at (3, 0)
    m = SparseMatrix.from_triplets(triplets_of(A2_ROWS), 4, 3)
    assert m.nnz == 11
    assert np.array_equal(m.to_dense(), np.array(A2_ROWS))


def test_index_out_of_range():
    with pytest.raises(IndexOutOfRange):
        SparseMatrix.from_triplets([(2, 0, 1.0)], 2, 2)
    with pytest.raises(IndexOutOfRange):
        SparseMatrix.from_triplets([(0, 5, 1.0)], 2, 2)


def test_arrays_are_immutable():
    m = SparseMatrix.identity(3)
    with pytest.raises(ValueError):
        m.values[0] = 7.0


# -- products ----------------------------------------------------------------


def test_matvec_identity():
    m = SparseMatrix.identity(3)
    x = np.array([1.0, 2.0, 3.0])
    assert np.array_equal(m.matvec(x), x)


def test_matvec_zero_matrix():
    m = SparseMatrix.zeros(4, 3)
    assert np.array_equal(m.matvec(np.ones(3)), np.zeros(4))


def test_matvec_row_sums():
    # hand row sums of the 3x3 example block: 6+1+1, 2+4+5, 1+1+5
    m = SparseMatrix.from_triplets(triplets_of(A1_ROWS), 3, 3)
    assert np.allclose(m.matvec(np.ones(3)), [8.0, 11.0, 7.0])


def test_rmatvec_identity():
    m = SparseMatrix.identity(4)
    x = np.arange(4.0)
    assert np.array_equal(m.rmatvec(x), x)


def test_rmatvec_column_sums():
    # hand column sums of the 4x3 example block
    m = SparseMatrix.from_triplets(triplets_of(A2_ROWS), 4, 3)
    assert np.allclose(m.rmatvec(np.ones(4)), [4.0, 5.0, 5.0])


def test_rmatvec_matches_explicit_transpose(rng):
    for _ in range(5):
        a = SparseMatrix.from_dense(rng.standard_normal((10, 7)))
        x = rng.standard_normal(10)
        direct = a.rmatvec(x)
        via_transpose = a.transpose().matvec(x)
        assert np.allclose(direct, via_transpose, rtol=1e-14, atol=1e-14)


@given(
    st.lists(
        st.tuples(
            st.integers(0, 5),
            st.integers(0, 4),
            st.floats(-10, 10, allow_nan=False),
        ),
        max_size=30,
    ),
    st.integers(0, 100),
)
def test_adjoint_identity(entries, seed):
    a = SparseMatrix.from_triplets(entries, 6, 5)
    r = np.random.default_rng(seed)
    x, y = r.standard_normal(5), r.standard_normal(6)
    lhs = a.matvec(x) @ y
    rhs = x @ a.rmatvec(y)
    assert lhs == pytest.approx(rhs, rel=1e-13, abs=1e-13)


@given(
    st.lists(
        st.tuples(
            st.integers(0, 7),
            st.integers(0, 6),
            st.floats(-1e6, 1e6, allow_nan=False),
        ),
        max_size=40,
    )
)
def test_triplet_round_trip(entries):
    a = SparseMatrix.from_triplets(entries, 8, 7)
    b = SparseMatrix.from_triplets(a.to_triplets(), 8, 7)
    assert np.array_equal(a.row_ptr, b.row_ptr)
    assert np.array_equal(a.col_idx, b.col_idx)
    assert np.array_equal(a.values, b.values)


# -- gram --------------------------------------------------------------------


def test_gram_identity():
    g = SparseMatrix.identity(3).gram()
    assert np.array_equal(g.to_dense(), np.eye(3))


def test_gram_difference_of_example_blocks():
    a1 = SparseMatrix.from_triplets(triplets_of(A1_ROWS), 3, 3)
    a2 = SparseMatrix.from_triplets(triplets_of(A2_ROWS), 4, 3)
    h = a1.gram().sub(a2.gram())
    expected = np.array([[35.0, 10.0, 16.0], [10.0, 11.0, 19.0], [16.0, 19.0, 44.0]])
    assert np.array_equal(h.to_dense(), expected)


def test_gram_single_column():
    g = SparseMatrix.from_dense(np.array([[1.0], [2.0]])).gram()
    assert np.array_equal(g.to_dense(), [[5.0]])


def test_gram_bitwise_symmetric(rng):
    a = SparseMatrix.from_dense(rng.standard_normal((9, 6)))
    g = a.gram().to_dense()
    assert np.array_equal(g, g.T)


# -- cholesky ----------------------------------------------------------------


def test_cholesky_identity():
    f = cholesky_factor(SparseMatrix.identity(3))
    assert np.allclose(f.lower_matrix(), np.eye(3))


def test_cholesky_2x2_by_hand():
    # [[4,2],[2,5]] = [[2,0],[1,2]] [[2,1],[0,2]]
    f = cholesky_factor(SparseMatrix.from_dense(np.array([[4.0, 2.0], [2.0, 5.0]])))
    assert np.allclose(f.lower_matrix(), [[2.0, 0.0], [1.0, 2.0]])


def test_cholesky_zero_pivot():
    with pytest.raises(NotPositiveDefinite):
        cholesky_factor(SparseMatrix.from_dense(np.array([[0.0, 0.0], [0.0, 1.0]])))


def test_cholesky_solve_identity():
    f = cholesky_factor(SparseMatrix.identity(4))
    w = np.array([1.0, -2.0, 3.0, 0.5])
    assert np.allclose(f.solve(w), w)


def test_cholesky_solve_constructed():
    f = cholesky_factor(SparseMatrix.from_dense(np.array([[4.0, 2.0], [2.0, 5.0]])))
    assert np.allclose(f.solve(np.array([6.0, 7.0])), [1.0, 1.0])


def test_cholesky_solve_residual(rng):
    a = rng.standard_normal((30, 20))
    s = SparseMatrix.from_dense(a.T @ a + np.eye(20))
    f = cholesky_factor(s)
    w = rng.standard_normal(20)
    z = f.solve(w)
    assert np.linalg.norm(s.to_dense() @ z - w) <= 1e-12 * np.linalg.norm(w)


def test_cholesky_banded_path_matches_dense(rng):
    # force the banded code path with a tiny threshold
    a = rng.standard_normal((40, 25))
    s = SparseMatrix.from_dense(a.T @ a + 2.0 * np.eye(25))
    dense_f = cholesky_factor(s)
    band_f = cholesky_factor(s, dense_threshold=4)
    assert band_f.kind == "banded"
    w = rng.standard_normal(25)
    assert np.allclose(band_f.solve(w), dense_f.solve(w), rtol=1e-12, atol=1e-13)
    lo = band_f.lower_matrix()
    rec_err = np.linalg.norm(lo @ lo.T - s.to_dense()) / np.linalg.norm(s.to_dense())
    assert rec_err <= 1e-12


def test_cholesky_banded_path_detects_indefinite(rng):
    a = rng.standard_normal((20, 20))
    s = SparseMatrix.from_dense((a + a.T) / 2 - 30.0 * np.eye(20))
    with pytest.raises(NotPositiveDefinite):
        cholesky_factor(s, dense_threshold=4)


def test_factor_reconstruction(rng):
    a = rng.standard_normal((25, 15))
    s = SparseMatrix.from_dense(a.T @ a + 0.3 * np.eye(15))
    f = cholesky_factor(s)
    lo = f.lower_matrix()
    err = np.linalg.norm(lo @ lo.T - s.to_dense()) / np.linalg.norm(s.to_dense())
    assert err <= 1e-12


def test_spd_detection_matches_eigen_oracle(rng):
    # factorization succeeds iff the dense eigenvalue oracle says SPD
    for k in range(20):
        n = int(rng.integers(2, 50))
        b = rng.standard_normal((n, n))
        sym = (b + b.T) / 2
        shift = rng.uniform(-2.0, 2.0)
        mat = sym + shift * np.eye(n)
        eigs = scipy.linalg.eigvalsh(mat)
        if abs(eigs.min()) < 1e-6 * max(abs(eigs).max(), 1.0):
            continue  # skip near-singular draws where the two tests may disagree
        spd = eigs.min() > 0
        s = SparseMatrix.from_dense(mat)
        if spd:
            cholesky_factor(s)
        else:
            with pytest.raises(NotPositiveDefinite):
                cholesky_factor(s)


# -- matrix market -----------------------------------------------------------


def write_mm(tmp_path, text, name="m.mtx"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_mm_general(tmp_path):
    path = write_mm(
        tmp_path,
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n2 2 2.0\n",
    )
    m = read_matrix_market(path)
    assert np.array_equal(m.to_dense(), np.diag([1.0, 2.0]))


def test_mm_symmetric_expansion(tmp_path):
    path = write_mm(
        tmp_path,
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "% comment line\n2 2 2\n1 1 1.0\n2 1 3.0\n",
    )
    m = read_matrix_market(path)
    assert m.to_dense()[1, 0] == 3.0
    assert m.to_dense()[0, 1] == 3.0


def test_mm_malformed_header(tmp_path):
    path = write_mm(tmp_path, "%%NotMatrixMarket stuff\n1 1 0\n")
    with pytest.raises(MalformedHeader):
        read_matrix_market(path)


def test_mm_bad_size_line(tmp_path):
    path = write_mm(tmp_path, "%%MatrixMarket matrix coordinate real general\n2 2\n")
    with pytest.raises(MalformedHeader):
        read_matrix_market(path)


def test_mm_non_numeric_entry(tmp_path):
    path = write_mm(
        tmp_path,
        "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 abc\n",
    )
    with pytest.raises(NonNumericEntry):
        read_matrix_market(path)


def test_mm_entry_out_of_bounds(tmp_path):
    path = write_mm(
        tmp_path,
        "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
    )
    with pytest.raises(EntryOutOfBounds):
        read_matrix_market(path)


@pytest.mark.parametrize("field", ["pattern", "complex", "integer"])
def test_mm_rejects_non_real_fields(tmp_path, field):
    path = write_mm(
        tmp_path,
        f"%%MatrixMarket matrix coordinate {field} general\n1 1 1\n1 1 1\n",
    )
    with pytest.raises(UnsupportedFormat):
        read_matrix_market(path)


def test_mm_truncated(tmp_path):
    path = write_mm(
        tmp_path,
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
    )
    with pytest.raises(MatrixMarketError):
        read_matrix_market(path)
