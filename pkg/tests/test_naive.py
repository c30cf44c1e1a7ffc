import itertools
import math

import numpy as np
import pytest

from qseal.linalg import CapacityError
from qseal.naive import (
    ONE,
    PLUS,
    ZERO,
    ProductState,
    build_message_states,
    dense_state,
    majority_projector_povm,
    mean_fidelity_exact,
    repaired_state,
    simulate_qubitwise_attack,
    states_nondisturbing,
    verify_nondisturbing,
)


def identity_state(q, message):
    data = ZERO if message == 1 else ONE
    return ProductState(q, (data,) * (2 * q) + (PLUS,) * q,
                        tuple(range(3 * q)))


class TestProductState:
    def test_message_from_labels(self):
        assert identity_state(1, 1).message == 1
        assert identity_state(1, 2).message == 2

    def test_count_validation(self):
        with pytest.raises(ValueError):
            ProductState(1, (ZERO, ONE, PLUS), (0, 1, 2))  # mixed data bits
        with pytest.raises(ValueError):
            ProductState(1, (ZERO, ZERO, ZERO), (0, 1, 2))  # no padding
        with pytest.raises(ValueError):
            ProductState(1, (ZERO, ZERO), (0, 1))  # wrong length
        with pytest.raises(ValueError):
            ProductState(1, (ZERO, ZERO, "minus"), (0, 1, 2))
        with pytest.raises(ValueError):
            ProductState(0, (), ())

    def test_permutation_validation(self):
        with pytest.raises(ValueError):
            ProductState(1, (ZERO, ZERO, PLUS), (0, 0, 2))
        with pytest.raises(ValueError):
            ProductState(1, (ZERO, ZERO, PLUS), (0, 1, 3))

    def test_physical_layout(self):
        state = ProductState(1, (ZERO, ZERO, PLUS), (2, 1, 0))
        assert state.physical_labels == (PLUS, ZERO, ZERO)
        assert state.plus_positions == (2,)


class TestDenseState:
    def test_identity_permutation_hand_values(self):
        vec = dense_state(identity_state(1, 1)).amplitudes
        expect = np.zeros(8)
        expect[0] = expect[1] = 1.0 / np.sqrt(2.0)  # |000> + |001>
        np.testing.assert_allclose(vec, expect, atol=1e-15)

        vec = dense_state(identity_state(1, 2)).amplitudes
        expect = np.zeros(8)
        expect[6] = expect[7] = 1.0 / np.sqrt(2.0)  # |110> + |111>
        np.testing.assert_allclose(vec, expect, atol=1e-15)

    def test_swap_moves_padding_to_front(self):
        state = ProductState(1, (ZERO, ZERO, PLUS), (2, 1, 0))
        vec = dense_state(state).amplitudes
        expect = np.zeros(8)
        expect[0] = expect[4] = 1.0 / np.sqrt(2.0)  # |000> + |100>
        np.testing.assert_allclose(vec, expect, atol=1e-15)

    def test_normalized_for_random_layouts(self):
        rng = np.random.default_rng(167)
        for _ in range(5):
            perm = tuple(int(x) for x in rng.permutation(9))
            state = ProductState(3, (ONE,) * 6 + (PLUS,) * 3, perm)
            vec = dense_state(state).amplitudes
            assert abs(np.linalg.norm(vec) - 1.0) < 1e-12
            assert vec.size == 512

    def test_capacity_cap(self):
        assert dense_state(identity_state(4, 1)).dim == 4096
        with pytest.raises(CapacityError):
            dense_state(identity_state(5, 1))


class TestBuildStates:
    def test_seed_replay(self):
        a1, a2 = build_message_states(3, 21, 22)
        b1, b2 = build_message_states(3, 21, 22)
        assert a1 == b1 and a2 == b2
        assert (a1.message, a2.message) == (1, 2)

    def test_independent_permutations(self):
        s1, s2 = build_message_states(4, 5, 6)
        assert s1.permutation != s2.permutation  # seeds differ


class TestMajorityProjector:
    def test_q1_support(self):
        povm = majority_projector_povm(1)
        diag = np.diagonal(povm.element(1)).real
        assert set(np.nonzero(diag)[0]) == {0, 1, 2, 4}  # >= two zero bits
        assert set(diag) <= {0.0, 1.0}

    def test_partition_of_identity(self):
        for q in (1, 2):
            povm = majority_projector_povm(q)
            one, two = povm.element(1), povm.element(2)
            assert np.array_equal(one + two, np.eye(2 ** (3 * q)))
            assert np.abs(one @ two).max() == 0.0

    def test_strict_majority_threshold_matters(self):
        # lowering the cut to "at least half zeros" breaks message 2
        q = 1
        zeros = 3 - np.bitwise_count(np.arange(8, dtype=np.uint64)).astype(int)
        loose = np.diag((zeros >= (3 * q) // 2).astype(float))
        vec = dense_state(identity_state(1, 2)).amplitudes
        complement = np.eye(8) - loose
        assert np.max(np.abs(complement @ vec - vec)) > 0.1


class TestNondisturbing:
    def test_exhaustive_q1(self):
        for perm1 in itertools.permutations(range(3)):
            s1 = ProductState(1, (ZERO, ZERO, PLUS), perm1)
            for perm2 in itertools.permutations(range(3)):
                s2 = ProductState(1, (ONE, ONE, PLUS), perm2)
                assert states_nondisturbing(s1, s2)

    @pytest.mark.parametrize("q", [1, 2, 3])
    def test_random_seed_pairs(self, q):
        rng = np.random.default_rng(173 + q)
        for _ in range(10):
            sigma, tau = rng.integers(0, 2 ** 31, size=2)
            assert verify_nondisturbing(q, int(sigma), int(tau))

    def test_rejects_mismatched_pair(self):
        with pytest.raises(ValueError):
            states_nondisturbing(identity_state(1, 1), identity_state(2, 2))
        with pytest.raises(ValueError):
            states_nondisturbing(identity_state(1, 2), identity_state(1, 1))


class TestRepair:
    def test_q1_hand_values(self):
        s1 = identity_state(1, 1)
        # padding read 0: looks like data, repair keeps |0>, overlap 1/sqrt(2)
        out = repaired_state(s1, (0,)).amplitudes
        expect = np.zeros(8)
        expect[0] = 1.0
        np.testing.assert_allclose(out, expect, atol=1e-15)
        # padding read 1: clearly padding, restored to |+>: state unchanged
        np.testing.assert_allclose(repaired_state(s1, (1,)).amplitudes,
                                    dense_state(s1).amplitudes, atol=1e-15)

        s2 = identity_state(1, 2)
        out = repaired_state(s2, (1,)).amplitudes
        expect = np.zeros(8)
        expect[7] = 1.0  # |111>
        np.testing.assert_allclose(out, expect, atol=1e-15)
        np.testing.assert_allclose(repaired_state(s2, (0,)).amplitudes,
                                    dense_state(s2).amplitudes, atol=1e-15)

    @pytest.mark.parametrize("q", [1, 2])
    @pytest.mark.parametrize("message", [1, 2])
    def test_fidelity_counts_false_data_bits(self, q, message):
        rng = np.random.default_rng(179 + q + message)
        perm = tuple(int(x) for x in rng.permutation(3 * q))
        data = ZERO if message == 1 else ONE
        state = ProductState(q, (data,) * (2 * q) + (PLUS,) * q, perm)
        original = dense_state(state).amplitudes
        for bits in itertools.product((0, 1), repeat=q):
            repaired = repaired_state(state, bits).amplitudes
            k = bits.count(0) if message == 1 else bits.count(1)
            fidelity = abs(np.vdot(original, repaired)) ** 2
            assert fidelity == pytest.approx(0.5 ** k, abs=1e-10)

    def test_outcome_validation(self):
        state = identity_state(2, 1)
        with pytest.raises(ValueError):
            repaired_state(state, (0,))
        with pytest.raises(ValueError):
            repaired_state(state, (0, 2))


class TestAttack:
    def test_exact_mean_matches_binomial_sum(self):
        for q in range(1, 9):
            oracle = sum(math.comb(q, k) * 0.5 ** q * 0.5 ** k
                         for k in range(q + 1))
            assert mean_fidelity_exact(q) == pytest.approx(oracle, abs=1e-15)
            assert mean_fidelity_exact(q) == 0.75 ** q

    @pytest.mark.parametrize("message", [1, 2])
    def test_monte_carlo_tracks_exact_value(self, message):
        q, trials = 2, 40_000
        state = identity_state(q, message)
        result = simulate_qubitwise_attack(state, trials,
                                           np.random.default_rng(191))
        sigma = math.sqrt((0.625 ** q - 0.5625 ** q) / trials)
        assert abs(result.mean_fidelity - 0.75 ** q) < 5.0 * sigma
        assert result.detection_probability == pytest.approx(
            1.0 - result.mean_fidelity, abs=1e-15)

    def test_histogram_recovers_mean(self):
        q = 3
        state = identity_state(q, 1)
        result = simulate_qubitwise_attack(state, 5000,
                                           np.random.default_rng(193))
        assert sum(result.zero_count_histogram.values()) == 5000
        assert all(2 * q <= c <= 3 * q for c in result.zero_count_histogram)
        recovered = sum(count * 0.5 ** (c - 2 * q)
                        for c, count in result.zero_count_histogram.items()) / 5000
        assert result.mean_fidelity == pytest.approx(recovered, abs=1e-12)

    def test_message_two_zero_counts_stay_low(self):
        q = 3
        result = simulate_qubitwise_attack(identity_state(q, 2), 5000,
                                           np.random.default_rng(197))
        assert all(0 <= c <= q for c in result.zero_count_histogram)

    def test_seed_replay(self):
        state = identity_state(2, 1)
        a = simulate_qubitwise_attack(state, 1000, np.random.default_rng(7))
        b = simulate_qubitwise_attack(state, 1000, np.random.default_rng(7))
        assert a.mean_fidelity == b.mean_fidelity
        assert a.zero_count_histogram == b.zero_count_histogram

    def test_rejects_bad_trials(self):
        with pytest.raises(ValueError):
            simulate_qubitwise_attack(identity_state(1, 1), 0,
                                      np.random.default_rng(1))
        with pytest.raises(ValueError):
            mean_fidelity_exact(0)
