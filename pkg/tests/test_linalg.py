import numpy as np
import pytest

from ncgeo.linalg import (
    Tolerance,
    adjoint,
    herm_eig,
    operator_norm,
    random_complex,
    random_hermitian,
    span_basis,
    span_residual,
    trace_inner,
)

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)


def power_iteration_norm(m, iters=2000, seed=11):
    rng = np.random.default_rng(seed)
    g = adjoint(m) @ m
    v = random_complex(rng, g.shape[0])
    v /= np.linalg.norm(v)
    for _ in range(iters):
        v = g @ v
        nv = np.linalg.norm(v)
        if nv == 0:
            return 0.0
        v /= nv
    return float(np.sqrt(np.real(np.vdot(v, g @ v))))


class TestHermEig:
    def test_identity(self):
        vals, vecs = herm_eig(np.eye(3))
        assert np.allclose(vals, [1, 1, 1])
        assert np.allclose(adjoint(vecs) @ vecs, np.eye(3))

    def test_diagonal(self):
        vals, _ = herm_eig(np.diag([2.0, -1.0]))
        assert np.allclose(vals, [-1.0, 2.0])

    def test_random_reconstruction(self):
        rng = np.random.default_rng(7)
        h = random_hermitian(rng, 12)
        vals, vecs = herm_eig(h)
        recon = vecs @ np.diag(vals) @ adjoint(vecs)
        assert operator_norm(recon - h) / operator_norm(h) < 1e-12

    def test_positive_matrix_eigenvalues(self):
        rng = np.random.default_rng(3)
        g = random_complex(rng, (9, 9))
        p = adjoint(g) @ g
        vals, _ = herm_eig(p)
        assert vals[0] >= -1e-10 * operator_norm(p)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            herm_eig(np.ones((2, 3)))

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            herm_eig(np.array([[0, 1], [0, 0]], dtype=complex))


class TestSpanBasis:
    def test_multiples_collapse(self):
        basis = span_basis([np.eye(2), 2 * np.eye(2)])
        assert len(basis) == 1

    def test_pauli_words_gram_rank(self):
        mats = [SIGMA1, SIGMA3, SIGMA1 @ SIGMA3]
        basis = span_basis(mats)
        gram = np.array([[trace_inner(a, b) for b in mats] for a in mats])
        assert len(basis) == np.linalg.matrix_rank(gram)
        assert len(basis) == 3

    def test_empty(self):
        assert span_basis([]) == []

    def test_idempotent(self):
        rng = np.random.default_rng(5)
        mats = [random_complex(rng, (3, 3)) for _ in range(5)]
        basis = span_basis(mats)
        again = span_basis(basis)
        assert len(again) == len(basis)

    def test_inputs_in_span(self):
        rng = np.random.default_rng(9)
        mats = [random_complex(rng, (4, 4)) for _ in range(3)]
        mats.append(mats[0] + 0.5 * mats[1])
        basis = span_basis(mats)
        assert len(basis) == 3
        for m in mats:
            assert span_residual(m, basis) < 1e-9


class TestOperatorNorm:
    def test_zero(self):
        assert operator_norm(np.zeros((3, 3))) == 0.0

    def test_diagonal(self):
        assert operator_norm(np.diag([3.0, -5.0])) == pytest.approx(5.0)

    def test_matches_power_iteration(self):
        rng = np.random.default_rng(21)
        m = random_complex(rng, (8, 8))
        assert operator_norm(m) == pytest.approx(power_iteration_norm(m), rel=1e-8)

    def test_adjoint_invariance(self):
        rng = np.random.default_rng(2)
        for k in range(5):
            m = random_complex(rng, (6, 6))
            assert abs(operator_norm(m) - operator_norm(adjoint(m))) <= 1e-12 * operator_norm(m)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(rel=0.0)
    with pytest.raises(ValueError):
        Tolerance(rank_cut=-1.0)
