import numpy as np
import pytest

from corrgeo import linalg
from corrgeo.errors import NotAState
from corrgeo.states import bell_diagonal, closest_separable_w, random_state, w_state

from conftest import LOG2_27_12

SX = np.array([[0, 1], [1, 0]], dtype=complex)


class TestEigHermitian:
    def test_diagonal_sorted_descending(self):
        es = linalg.eig_hermitian(np.diag([0.2, 0.5, 0.3]))
        np.testing.assert_allclose(es.eigenvalues, [0.5, 0.3, 0.2])
        np.testing.assert_allclose(np.abs(es.eigenvectors), np.eye(3)[:, [1, 2, 0]])

    def test_pauli_x(self):
        es = linalg.eig_hermitian(SX)
        np.testing.assert_allclose(es.eigenvalues, [1, -1])
        np.testing.assert_allclose(es.eigenvectors[:, 0], np.array([1, 1]) / np.sqrt(2))

    def test_first_component_real_positive(self):
        for seed in range(20):
            vecs = linalg.eig_hermitian(random_state((2, 2), seed=seed).rho).eigenvectors
            for v in vecs.T:
                lead = v[np.flatnonzero(np.abs(v) > 1e-10)[0]]
                assert abs(lead.imag) < 1e-12 and lead.real > 0

    def test_reconstruction_and_orthonormality(self):
        for seed in range(50):
            rho = random_state((2, 3), seed=seed).rho
            vals, vecs = linalg.eig_hermitian(rho)
            assert np.max(np.abs(vecs @ np.diag(vals) @ vecs.conj().T - rho)) <= 1e-9
            assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(6))) <= 1e-10

    def test_degenerate_ordering_is_deterministic(self):
        rng = np.random.default_rng(3)
        u = linalg.haar_unitary(4, rng)
        m = u @ np.diag([0.4, 0.4, 0.1, 0.1]) @ u.conj().T
        a = linalg.eig_hermitian(m).eigenvectors
        b = linalg.eig_hermitian(m.copy()).eigenvectors
        np.testing.assert_array_equal(a, b)


class TestTensorAndPartialTrace:
    def test_kron_shape_and_values(self):
        a = np.array([[1, 2], [3, 4]])
        np.testing.assert_allclose(linalg.tensor_product(a, np.eye(2)), np.kron(a, np.eye(2)))
        assert linalg.tensor_product(np.eye(2), np.eye(3), np.eye(2)).shape == (12, 12)

    def test_w_marginals(self):
        rho = w_state().rho
        for k in range(3):
            np.testing.assert_allclose(linalg.partial_trace(rho, (2, 2, 2), [k]), np.diag([2 / 3, 1 / 3]), atol=1e-12)

    def test_trace_of_product_recovers_factor(self):
        a = random_state((3, 2), seed=1).rho
        b = np.diag([0.25, 0.75])
        ab = linalg.tensor_product(a, b)
        np.testing.assert_allclose(linalg.partial_trace(ab, (3, 2, 2), [0, 1]), a, atol=1e-12)
        np.testing.assert_allclose(linalg.partial_trace(ab, (3, 2, 2), [2]), b, atol=1e-12)

    def test_composition(self):
        rho = random_state((2, 3, 2), seed=4).rho
        two_step = linalg.partial_trace(linalg.partial_trace(rho, (2, 3, 2), [0, 1]), (2, 3), [0])
        np.testing.assert_allclose(two_step, linalg.partial_trace(rho, (2, 3, 2), [0]), atol=1e-12)


class TestEntropy:
    def test_maximally_mixed(self):
        assert linalg.von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0, abs=1e-12)

    def test_pure_is_zero(self):
        assert linalg.von_neumann_entropy(w_state().rho) == pytest.approx(0.0, abs=1e-12)

    def test_bell_diagonal(self):
        expected = -(0.7 * np.log2(0.7) + 3 * 0.1 * np.log2(0.1))
        assert linalg.von_neumann_entropy(bell_diagonal([0.7, 0.1, 0.1, 0.1]).rho) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(1.3568, abs=1e-4)

    def test_unitary_invariance(self):
        rng = np.random.default_rng(0)
        for seed in range(20):
            rho = random_state((2, 2), seed=seed).rho
            u = linalg.haar_unitary(4, rng)
            s = linalg.von_neumann_entropy(rho)
            assert linalg.von_neumann_entropy(u @ rho @ u.conj().T) == pytest.approx(s, abs=1e-10)

    def test_additive_on_products(self):
        for seed in range(20):
            a = random_state((2, 2), seed=seed).rho
            b = random_state((3, 2), seed=seed + 100).rho
            s = linalg.von_neumann_entropy(linalg.tensor_product(a, b))
            assert s == pytest.approx(linalg.von_neumann_entropy(a) + linalg.von_neumann_entropy(b), abs=1e-9)

    def test_rejects_non_states(self):
        with pytest.raises(NotAState):
            linalg.von_neumann_entropy(np.diag([1.5, -0.5]))


class TestRelativeEntropy:
    def test_self_is_zero(self):
        rho = random_state((2, 2), seed=0).rho
        assert linalg.relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-10)

    def test_support_mismatch_is_infinite(self):
        assert linalg.relative_entropy(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == np.inf

    def test_w_against_its_closest_separable_state(self):
        assert linalg.relative_entropy(w_state().rho, closest_separable_w().rho) == pytest.approx(LOG2_27_12, abs=1e-9)

    def test_classical_case_matches_kl_divergence(self):
        p, q = np.array([0.2, 0.3, 0.5]), np.array([0.4, 0.4, 0.2])
        assert linalg.relative_entropy(np.diag(p), np.diag(q)) == pytest.approx(float(np.sum(p * np.log2(p / q))), abs=1e-12)

    def test_nonnegative_on_random_pairs(self):
        for seed in range(200):
            x = random_state((2, 2), seed=seed).rho
            y = random_state((2, 2), seed=seed + 10_000).rho
            assert linalg.relative_entropy(x, y) >= 0.0
