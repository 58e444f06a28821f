import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qcorr.errors import DimensionError, InvalidStateError
from qcorr.linalg import tensor
from qcorr.operators import (
    BasisIndex,
    Observable,
    basis_indices,
    hermitian_basis,
    pauli,
    projector,
    rotated_qubit_pair,
    singlet_ket,
    singlet_projector,
)
from qcorr.sampling import random_hermitian, random_ket


def check_spectrum(obs: Observable, tol=1e-10):
    d = obs.dim
    assert_allclose(sum(obs.projectors), np.eye(d), atol=tol)
    for i, p in enumerate(obs.projectors):
        for j, q in enumerate(obs.projectors):
            assert_allclose(p @ q, p if i == j else np.zeros((d, d)), atol=tol)
    rebuilt = sum(v * p for v, p in zip(obs.eigenvalues, obs.projectors))
    assert_allclose(rebuilt, obs.matrix, atol=tol)


class TestHermitianBasis:
    def test_qubit_basis(self):
        ops = [o.matrix for o in hermitian_basis(2)]
        assert len(ops) == 4
        assert_allclose(ops[0], [[1, 0], [0, 0]])
        assert_allclose(ops[1], 0.5 * np.array([[0, 1], [1, 0]]))
        # (1/2i)(|0><1| - |1><0|) = sigma_y / 2
        assert_allclose(ops[2], 0.5 * np.array([[0, -1j], [1j, 0]]))
        assert_allclose(ops[3], [[0, 0], [0, 1]])

    def test_enumeration_order(self):
        assert [str(b) for b in basis_indices(3)] == [
            "Ar(0,0)", "Ar(0,1)", "Ai(0,1)", "Ar(0,2)", "Ai(0,2)",
            "Ar(1,1)", "Ar(1,2)", "Ai(1,2)", "Ar(2,2)",
        ]

    def test_qutrit(self):
        basis = hermitian_basis(3)
        assert len(basis) == 9
        for idx, obs in zip(basis_indices(3), basis):
            assert_allclose(obs.matrix, obs.matrix.conj().T)
            if idx.mu == idx.nu:
                assert np.trace(obs.matrix).real == pytest.approx(1.0)
            check_spectrum(obs)

    @pytest.mark.parametrize("d", [2, 3, 4])
    def test_spans_hermitian_matrices(self, rng, d):
        mats = np.array([o.matrix for o in hermitian_basis(d)])
        gram = np.einsum("aij,bji->ab", mats, mats).real
        assert np.linalg.matrix_rank(gram) == d * d
        h = random_hermitian(rng, d)
        # real least squares over the stacked real and imaginary parts
        a = np.concatenate([mats.reshape(d * d, -1).T.real, mats.reshape(d * d, -1).T.imag])
        b = np.concatenate([h.reshape(-1).real, h.reshape(-1).imag])
        coeffs, *_ = np.linalg.lstsq(a, b, rcond=None)
        assert np.max(np.abs(np.einsum("a,aij->ij", coeffs, mats) - h)) <= 1e-12

    def test_rejects_small_dimension(self):
        with pytest.raises(DimensionError):
            hermitian_basis(1)

    def test_basis_index_rules(self):
        with pytest.raises(ValueError):
            BasisIndex(1, 1, "imag")
        with pytest.raises(ValueError):
            BasisIndex(2, 1)


class TestPauli:
    def test_z(self):
        assert_allclose(pauli("z").matrix, np.diag([1, -1]))
        assert pauli("z").eigenvalues == pytest.approx((1.0, -1.0))

    def test_involution(self):
        for a in "xyz":
            m = pauli(a).matrix
            assert_allclose(m @ m, np.eye(2))
            check_spectrum(pauli(a))

    def test_trace_orthogonality(self):
        for a in "xyz":
            for b in "xyz":
                tr = np.trace(pauli(a).matrix @ pauli(b).matrix)
                assert tr == pytest.approx(2.0 if a == b else 0.0)

    def test_unknown_axis(self):
        with pytest.raises(ValueError):
            pauli("w")


class TestSinglet:
    def test_idempotent_rank_one(self):
        p = singlet_projector().matrix
        assert np.max(np.abs(p @ p - p)) <= 1e-12
        assert np.trace(p).real == pytest.approx(1.0, abs=1e-15)
        assert_allclose(np.linalg.eigvalsh(p)[::-1], [1, 0, 0, 0], atol=1e-12)

    def test_fixes_singlet_ket(self):
        k = singlet_ket()
        assert_allclose(k, np.array([0, 1, -1, 0]) / math.sqrt(2))
        assert_allclose(singlet_projector().matrix @ k, k, atol=1e-15)


class TestRotatedPair:
    def test_zero(self):
        r, g = rotated_qubit_pair(0.0)
        assert_allclose(r, [1, 0])
        assert_allclose(g, [0, 1])

    def test_quarter_turn(self):
        r, g = rotated_qubit_pair(math.pi / 2)
        assert_allclose(r, [0, 1], atol=1e-16)
        assert_allclose(g, [-1, 0], atol=1e-16)

    @given(st.floats(-10, 10, allow_nan=False))
    def test_orthonormal(self, theta):
        r, g = rotated_qubit_pair(theta)
        assert abs(np.vdot(r, g)) < 1e-15
        assert abs(np.linalg.norm(r) - 1) < 1e-15


class TestProjector:
    def test_basis_vector(self):
        assert_allclose(projector([1, 0, 0]).matrix, np.diag([1, 0, 0]))

    def test_scale_invariant(self):
        assert_allclose(projector([2, 0]).matrix, np.diag([1, 0]))

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1), st.integers(2, 5))
    def test_unit_trace_idempotent(self, seed, d):
        from qcorr.sampling import make_rng

        k = random_ket(make_rng(seed), d) * 3.7
        p = projector(k).matrix
        assert np.trace(p).real == pytest.approx(1.0)
        assert np.max(np.abs(p @ p - p)) < 1e-12
        check_spectrum(projector(k))

    def test_zero_vector(self):
        with pytest.raises(InvalidStateError):
            projector([0, 0])


class TestObservable:
    def test_degenerate_eigenvalues_merge(self):
        obs = Observable.from_matrix(tensor(pauli("z").matrix, np.eye(2)))
        assert obs.eigenvalues == pytest.approx((1.0, -1.0))
        assert [np.trace(p).real for p in obs.projectors] == pytest.approx([2, 2])
        check_spectrum(obs)

    def test_from_projectors_validates(self):
        with pytest.raises(ValueError):
            Observable.from_projectors((1.0, 0.0), (np.diag([1, 0]), np.diag([1, 0])))

    def test_immutable(self):
        obs = pauli("x")
        with pytest.raises(ValueError):
            obs.matrix[0, 0] = 5
