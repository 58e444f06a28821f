import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from qcorr.errors import DimensionError, InvalidStateError, UndefinedConditionalError
from qcorr.linalg import partial_trace, tensor
from qcorr.operators import singlet_ket
from qcorr.sampling import random_density, random_hermitian, random_ket, random_unitary
from qcorr.states import density_from_ket, eigen_mixture, purity, relative_state, schmidt

BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)


class TestDensityFromKet:
    def test_basis(self):
        assert_allclose(density_from_ket([1, 0]), np.diag([1, 0]))

    def test_bell(self):
        w = density_from_ket(BELL)
        assert_allclose(w, np.outer(BELL, BELL))
        assert purity(w) == pytest.approx(1.0)

    def test_unnormalized(self):
        assert_allclose(density_from_ket([0, 3]), np.diag([0, 1]))

    def test_zero(self):
        with pytest.raises(InvalidStateError):
            density_from_ket([0, 0])


class TestPurity:
    def test_values(self):
        assert purity(np.diag([1.0, 0.0])) == 1.0
        assert purity(np.eye(2) / 2) == pytest.approx(0.5)
        # weights 1/3, 2/3 -> 1/9 + 4/9
        assert purity(np.diag([1 / 3, 2 / 3])) == pytest.approx(5 / 9, abs=1e-15)

    def test_bounds(self, rng):
        for d in (2, 3, 5):
            p = purity(random_density(rng, d))
            assert 1 / d - 1e-12 <= p <= 1 + 1e-12

    def test_pure_iff_top_projector(self, rng):
        for _ in range(10):
            pure = density_from_ket(random_ket(rng, 4))
            mixed = random_density(rng, 4)
            for w in (pure, mixed):
                vals, vecs = np.linalg.eigh(w)
                top = np.outer(vecs[:, -1], vecs[:, -1].conj())
                is_pure = abs(purity(w) - 1) <= 1e-10
                assert is_pure == (np.max(np.abs(w - top)) <= 1e-10)
            assert abs(purity(pure) - 1) <= 1e-10


class TestEigenMixture:
    def test_pure(self, rng):
        k = random_ket(rng, 3)
        terms = eigen_mixture(density_from_ket(k))
        assert len(terms) == 1
        assert terms[0][0] == pytest.approx(1.0)
        assert abs(abs(np.vdot(terms[0][1], k)) - 1) < 1e-12

    def test_diagonal(self):
        terms = eigen_mixture(np.diag([0.7, 0.3]))
        assert [t[0] for t in terms] == pytest.approx([0.7, 0.3])
        assert_allclose(terms[0][1], [1, 0], atol=1e-15)
        assert_allclose(terms[1][1], [0, 1], atol=1e-15)

    def test_reconstruction(self, rng):
        w = random_density(rng, 4)
        rebuilt = sum(p * np.outer(k, k.conj()) for p, k in eigen_mixture(w))
        assert np.linalg.norm(rebuilt - w) <= 1e-10

    def test_drops_zero_weights(self, rng):
        w = random_density(rng, 4, rank=2)
        assert len(eigen_mixture(w)) == 2

    def test_invalid(self):
        with pytest.raises(InvalidStateError):
            eigen_mixture(np.diag([1.5, -0.5]))


class TestSchmidt:
    def test_product(self):
        plus = np.array([1, 1]) / math.sqrt(2)
        form = schmidt(np.kron([1, 0], plus), [2, 2])
        assert_allclose(form.coefficients, [1.0])

    @pytest.mark.parametrize("psi", [BELL, singlet_ket()])
    def test_maximally_entangled(self, psi):
        form = schmidt(psi, [2, 2])
        assert_allclose(form.coefficients, [1 / math.sqrt(2)] * 2, atol=1e-15)
        assert np.linalg.norm(form.ket() - psi) <= 1e-10

    def test_random(self, rng):
        for dims in ([2, 3], [3, 3], [4, 2]):
            psi = random_ket(rng, int(np.prod(dims)))
            form = schmidt(psi, dims)
            assert np.linalg.norm(form.ket() - psi) <= 1e-10
            assert np.sum(form.coefficients ** 2) == pytest.approx(1.0)
            assert_allclose(form.left.conj().T @ form.left, np.eye(len(form)), atol=1e-10)
            assert_allclose(form.right.conj().T @ form.right, np.eye(len(form)), atol=1e-10)
            w = density_from_ket(psi)
            for keep in (0, 1):
                spectrum = np.sort(np.linalg.eigvalsh(partial_trace(w, dims, [keep])))[::-1]
                assert_allclose(spectrum[: len(form)], form.coefficients ** 2, atol=1e-10)
            # phase convention: largest left amplitude is real positive
            for k in range(len(form)):
                big = form.left[np.argmax(np.abs(form.left[:, k])), k]
                assert big.imag == 0 and big.real > 0

    def test_local_unitary_invariance(self, rng):
        psi = random_ket(rng, 6)
        u, v = random_unitary(rng, 2), random_unitary(rng, 3)
        moved = tensor(u, v) @ psi
        assert_allclose(schmidt(moved, [2, 3]).coefficients, schmidt(psi, [2, 3]).coefficients, atol=1e-10)

    def test_reduced_spectra_agree(self, rng):
        for _ in range(10):
            psi = random_ket(rng, 8)
            w = density_from_ket(psi)
            ea = np.sort(np.linalg.eigvalsh(partial_trace(w, [2, 4], [0])))
            eb = np.sort(np.linalg.eigvalsh(partial_trace(w, [2, 4], [1])))
            assert_allclose(ea, eb[-2:], atol=1e-10)
            assert_allclose(eb[:-2], 0, atol=1e-10)

    def test_requires_two_factors(self):
        with pytest.raises(DimensionError):
            schmidt(np.ones(8) / math.sqrt(8), [2, 2, 2])


class TestRelativeState:
    def test_product(self):
        phi = relative_state(np.kron([1, 0], [1, 0]), [1, 0], [2, 2])
        assert_allclose(phi, [1, 0])

    def test_singlet(self):
        phi = relative_state(singlet_ket(), [1, 0], [2, 2])
        # <0|_2 (|01> - |10>)/sqrt2 = -|1>/sqrt2 -> |1> after phase fixing
        assert_allclose(phi, [0, 1], atol=1e-15)

    def test_orthogonal_branch(self):
        with pytest.raises(UndefinedConditionalError):
            relative_state(np.kron([1, 0], [1, 0]), [0, 1], [2, 2])

    def test_mean_value_contract(self, rng):
        for _ in range(5):
            psi = random_ket(rng, 6)
            chi = random_ket(rng, 3)
            phi = relative_state(psi, chi, [2, 3])
            p = np.outer(chi, chi.conj())
            for _ in range(20):
                a = random_hermitian(rng, 2)
                lhs = np.vdot(phi, a @ phi).real
                num = np.vdot(psi, tensor(a, p) @ psi).real
                den = np.vdot(psi, tensor(np.eye(2), p) @ psi).real
                assert abs(lhs - num / den) <= 1e-9
