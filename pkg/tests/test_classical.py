import numpy as np
import pytest

from corrgeo import classical, linalg
from corrgeo.classical import (
    DephasingResult,
    classical_correlations,
    closest_classical_state,
    closest_product_state,
    dephase,
    discord,
    l_quantity,
    mid,
    original_discord,
    original_discord_at,
    total_mutual_information,
)
from corrgeo.errors import ConsistencyError, DimensionMismatch, WrongArity
from corrgeo.search import SearchOptions
from corrgeo.states import (
    ProductBasis,
    bell_diagonal,
    mid_counterexample,
    product_state,
    random_product_basis,
    random_state,
    validate,
    w_state,
)

from conftest import h
from oracles import grid_min_dephased_entropy, grid_min_one_sided_discord

W_T = 3 * h(1 / 3)


def basis_terms(x, b):
    """D(b), C(b), L(b) for a fixed product basis, straight from the definitions."""
    chi = dephase(x, b)
    pi_x = closest_product_state(x)
    pi_chi = closest_product_state(chi)
    return (
        chi.entropy() - x.entropy(),
        pi_chi.entropy() - chi.entropy(),
        pi_chi.entropy() - pi_x.entropy(),
    )


class TestDephase:
    def test_computational_basis_keeps_diagonal(self):
        x = random_state((2, 2), seed=0)
        chi = dephase(x, ProductBasis.computational((2, 2)))
        np.testing.assert_allclose(chi.rho, np.diag(np.diag(x.rho)), atol=1e-12)

    def test_idempotent(self):
        x = random_state((2, 3), seed=1)
        b = random_product_basis((2, 3), seed=2)
        once = dephase(x, b)
        np.testing.assert_allclose(dephase(once, b).rho, once.rho, atol=1e-12)

    def test_entropy_never_decreases(self):
        for seed in range(100):
            x = random_state((2, 2), seed=seed)
            b = random_product_basis((2, 2), seed=seed + 1)
            assert dephase(x, b).entropy() >= x.entropy() - 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            dephase(random_state((2, 2), seed=0), ProductBasis.computational((2, 3)))


class TestProductSide:
    def test_product_of_marginals(self):
        x = random_state((2, 3), seed=3)
        pi = closest_product_state(x)
        np.testing.assert_allclose(pi.rho, np.kron(x.marginal(0), x.marginal(1)), atol=1e-12)

    def test_mutual_information_examples(self):
        assert total_mutual_information(w_state()).value == pytest.approx(W_T, abs=1e-9)
        assert W_T == pytest.approx(2.75489, abs=1e-5)
        assert total_mutual_information(bell_diagonal([1, 0, 0, 0])).value == pytest.approx(2.0, abs=1e-9)
        assert total_mutual_information(product_state(np.diag([0.3, 0.7]), np.eye(3) / 3)).value == pytest.approx(0, abs=1e-12)

    def test_marginal_product_is_the_closest_product_state(self):
        for seed in range(20):
            x = random_state((2, 2), seed=seed)
            t = total_mutual_information(x).value
            assert linalg.relative_entropy(x.rho, closest_product_state(x).rho) == pytest.approx(t, abs=1e-9)
            rng = np.random.default_rng(seed)
            for _ in range(20):
                a = random_state((2,), seed=int(rng.integers(1 << 31))).rho
                b = random_state((2,), seed=int(rng.integers(1 << 31))).rho
                assert linalg.relative_entropy(x.rho, np.kron(a, b)) >= t - 1e-12


class TestClosestClassicalState:
    def test_classical_input_has_zero_discord(self):
        b = random_product_basis((2, 2), seed=4)
        x = dephase(random_state((2, 2), seed=5), b)
        assert discord(x).value <= 1e-7

    def test_bell_diagonal_entropy(self, bell07):
        res = closest_classical_state(bell07)
        assert res.entropy_chi == pytest.approx(1 + h(0.8), abs=1e-6)
        assert res.entropy_chi == pytest.approx(1.72193, abs=1e-5)
        assert res.converged

    def test_w_state(self):
        res = closest_classical_state(w_state())
        assert res.entropy_chi == pytest.approx(np.log2(3), abs=1e-6)
        np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(res.chi.rho))[::-1][:3], [1 / 3] * 3, atol=1e-6)

    def test_w_quantities(self):
        x = w_state()
        res = closest_classical_state(x)
        assert res.entropy_chi - x.entropy() == pytest.approx(np.log2(3), abs=1e-6)
        assert classical_correlations(res.chi).value == pytest.approx(np.log2(27 / 12), abs=1e-6)
        assert l_quantity(x, res).value == pytest.approx(0.0, abs=1e-6)

    def test_basis_wise_identity(self):
        for seed in range(100):
            dims = (2, 2) if seed % 2 else (2, 2, 2)
            x = random_state(dims, seed=seed)
            b = random_product_basis(dims, seed=seed + 500)
            d, c, l_ = basis_terms(x, b)
            assert abs(total_mutual_information(x).value - (d + c - l_)) <= 1e-9

    def test_result_is_self_consistent(self):
        x = random_state((2, 2), seed=11)
        res = closest_classical_state(x)
        np.testing.assert_allclose(dephase(x, res.basis).rho, res.chi.rho, atol=1e-12)
        assert res.entropy_chi == pytest.approx(res.chi.entropy(), abs=1e-12)
        assert res.diagnostics.restarts == 32
        assert len(res.diagnostics.values) == 32

    def test_beats_random_bases(self):
        for seed in range(4):
            x = random_state((2, 2), seed=seed)
            best = closest_classical_state(x).entropy_chi
            for k in range(50):
                assert best <= dephase(x, random_product_basis((2, 2), seed=1000 * seed + k)).entropy() + 1e-9

    def test_against_grid_oracle(self):
        for seed in range(2):
            x = random_state((2, 2), seed=seed)
            best = closest_classical_state(x).entropy_chi
            assert best <= grid_min_dephased_entropy(x.rho, cutoff=best - 1e-4) + 1e-4

    def test_deterministic_across_threads(self):
        x = random_state((2, 2), seed=12)
        a = closest_classical_state(x, SearchOptions(restarts=8, threads=1))
        b = closest_classical_state(x, SearchOptions(restarts=8, threads=4))
        assert a.entropy_chi == b.entropy_chi
        assert a.diagnostics.best_restart == b.diagnostics.best_restart

    def test_l_quantity_consistency_check(self):
        x = random_state((2, 2), seed=13)
        res = closest_classical_state(x, SearchOptions(restarts=4))
        wrong = DephasingResult(random_product_basis((2, 2), seed=1), res.chi, res.entropy_chi)
        with pytest.raises(ConsistencyError):
            l_quantity(x, wrong)


class TestOriginalDiscord:
    def test_bell_state(self):
        assert original_discord(bell_diagonal([1, 0, 0, 0])).value == pytest.approx(1.0, abs=1e-6)

    def test_bell_diagonal(self, bell07):
        lam = np.array([0.7, 0.1, 0.1, 0.1])
        t = 2 - linalg.shannon_entropy(lam)
        res = original_discord(bell07)
        assert res.value == pytest.approx(t - (1 - h(0.8)), abs=1e-6)
        assert res.value == pytest.approx(0.3651, abs=1e-4)
        assert res.value == pytest.approx(grid_min_one_sided_discord(bell07.rho), abs=1e-6)

    def test_random_states_against_grid(self):
        for seed in range(5):
            x = random_state((2, 2), seed=seed)
            val = original_discord(x).value
            grid = grid_min_one_sided_discord(x.rho)
            assert val <= grid + 1e-6
            assert val >= grid - 1e-3

    def test_identity_gap_recorded(self):
        res = original_discord(random_state((2, 3), seed=1))
        assert res.witness.identity_gap <= 1e-9

    def test_fixed_basis_identity(self):
        for seed in range(50):
            x = random_state((2, 2), seed=seed)
            u = linalg.haar_unitary(2, np.random.default_rng(seed))
            delta, t, c = original_discord_at(x, u)
            assert abs(delta - (t - c)) <= 1e-9

    def test_never_exceeds_discord(self):
        for seed in range(3):
            x = random_state((2, 2), seed=seed)
            assert original_discord(x).value <= discord(x).value + 1e-6

    def test_wrong_arity(self):
        with pytest.raises(WrongArity):
            original_discord(w_state())
        with pytest.raises(WrongArity):
            original_discord(random_state((2, 2), seed=0), measured_party=2)


class TestMid:
    def test_classical_state_has_zero_mid(self):
        x = validate((2, 2), np.diag([0.4, 0.3, 0.2, 0.1]))
        res = mid(x)
        assert res.value == pytest.approx(0.0, abs=1e-12)
        assert not res.flags["degenerate_marginal"]

    def test_bell_state_flags_degeneracy(self):
        res = mid(bell_diagonal([1, 0, 0, 0]))
        assert res.flags["degenerate_marginal"]
        assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_dominates_discord(self):
        for seed in range(3):
            x = random_state((2, 2), seed=seed)
            assert mid(x).value >= discord(x).value - 1e-6

    def test_strictly_above_discord(self):
        x = mid_counterexample(0.6, [0.3, 0.25, 0.25, 0.2])
        assert mid(x).value - discord(x).value > 0.05

    def test_wrong_arity(self):
        with pytest.raises(WrongArity):
            mid(w_state())


class TestOneSidedDephase:
    def test_bell_state_in_z(self):
        chi = classical.one_sided_dephase(bell_diagonal([1, 0, 0, 0]), 0, np.eye(2))
        np.testing.assert_allclose(chi.rho, np.diag([0.5, 0, 0, 0.5]), atol=1e-12)

    def test_keeps_unmeasured_marginal(self):
        x = random_state((2, 3), seed=2)
        u = linalg.haar_unitary(2, np.random.default_rng(0))
        chi = classical.one_sided_dephase(x, 0, u)
        np.testing.assert_allclose(chi.marginal(1), x.marginal(1), atol=1e-12)

    def test_measuring_second_party(self):
        x = random_state((3, 2), seed=4)
        chi = classical.one_sided_dephase(x, 1, np.eye(2))
        np.testing.assert_allclose(chi.marginal(0), x.marginal(0), atol=1e-12)
        np.testing.assert_allclose(chi.marginal(1), np.diag(np.diag(x.marginal(1))), atol=1e-12)
