"""Protocol tests: teleportation branches, the dichotomic clone/NOT scheme,
its phi_plus variant, and the mixed-ancilla reduction."""

import math

import numpy as np
import pytest

from teleclone import protocols, qmath
from teleclone.qcore import (
    A, B, S, BellState, DensityMatrix, PureState, apply_channel, bell_state,
    fidelity, orthogonal_qubit, pauli, standard_channels,
)

K0 = np.array([1, 0], dtype=complex)
K1 = np.array([0, 1], dtype=complex)


def state(amps):
    return PureState((S,), amps)


def on_b(phi):
    return PureState((B,), phi.amplitudes)


class TestStandardTeleport:
    def test_basis_input_all_branches_exact(self):
        outcomes = protocols.standard_teleport(state(K0))
        assert len(outcomes) == 4
        assert {o.bell_result for o in outcomes} == set(BellState)
        for o in outcomes:
            assert o.probability == pytest.approx(0.25, abs=1e-14)
            np.testing.assert_allclose(o.bob_state.matrix, np.diag([1.0, 0.0]), atol=1e-13)

    def test_uncorrected_mixture_is_depolarized(self):
        outcomes = protocols.standard_teleport(state(K0))
        mix = sum(o.probability * o.uncorrected.matrix for o in outcomes)
        np.testing.assert_allclose(mix, np.eye(2) / 2, atol=1e-13)

    def test_circular_input_corrected_fidelity_one(self):
        phi = state(np.array([1, 1j]) / math.sqrt(2))
        for o in protocols.standard_teleport(phi):
            assert fidelity(o.bob_state, on_b(phi)) == pytest.approx(1.0, abs=1e-12)

    def test_correction_table(self):
        expected = {
            BellState.PSI_MINUS: "I", BellState.PSI_PLUS: "Z",
            BellState.PHI_MINUS: "X", BellState.PHI_PLUS: "Y",
        }
        for o in protocols.standard_teleport(state(K0)):
            assert o.correction == expected[o.bell_result]

    def test_rejects_multi_qubit_input(self):
        with pytest.raises(ValueError):
            protocols.standard_teleport(bell_state(BellState.PSI_PLUS, (S, A)))


class TestModifiedProtocol:
    def test_basis_input_closed_forms(self):
        res = protocols.modified_protocol(state(K0))
        np.testing.assert_allclose(res.rho_s.matrix, np.diag([5 / 6, 1 / 6]), atol=1e-13)
        np.testing.assert_allclose(res.rho_b.matrix, np.diag([1 / 3, 2 / 3]), atol=1e-13)
        np.testing.assert_allclose(res.rho_a.matrix, res.rho_s.matrix, atol=1e-13)

    def test_plus_input_fidelities(self):
        phi = state(np.array([1, 1]) / math.sqrt(2))
        res = protocols.modified_protocol(phi)
        assert fidelity(res.rho_s, phi) == pytest.approx(5 / 6, abs=1e-12)
        assert fidelity(res.rho_b, on_b(orthogonal_qubit(phi))) == pytest.approx(2 / 3, abs=1e-12)

    def test_branch_probabilities_over_random_inputs(self):
        rng = np.random.default_rng(21)
        for _ in range(50):
            res = protocols.modified_protocol(protocols.haar_random_qubit(rng))
            assert res.p_singlet == pytest.approx(0.25, abs=1e-12)
            assert res.p_complement == pytest.approx(0.75, abs=1e-12)

    def test_success_branch_teleports_exactly(self):
        rng = np.random.default_rng(22)
        phi = protocols.haar_random_qubit(rng)
        res = protocols.modified_protocol(phi)
        assert fidelity(res.success_branch, on_b(phi)) == pytest.approx(1.0, abs=1e-12)

    def test_joint_clone_state_decomposition(self):
        """Eq-level check: 2/3 weight on |phi phi>, 1/3 on the symmetric pair."""
        rng = np.random.default_rng(23)
        for _ in range(10):
            phi = protocols.haar_random_qubit(rng)
            res = protocols.modified_protocol(phi)
            target = protocols.clone_pair_target(phi)
            assert res.rho_sa.distance(target) < 1e-12


class TestUnotAsMixture:
    def test_basis_input(self):
        rho = protocols.unot_as_mixture(state(K0))
        np.testing.assert_allclose(rho.matrix, np.diag([1 / 3, 2 / 3]), atol=1e-13)

    def test_matches_protocol_and_channel(self):
        """Outcome-enumeration oracle: the three unidentified Bell branches,
        mixed evenly, equal both the protocol marginal and the channel."""
        rng = np.random.default_rng(24)
        unot = standard_channels()["universal_not"]
        for _ in range(50):
            phi = protocols.haar_random_qubit(rng)
            mixture = protocols.unot_as_mixture(phi)
            res = protocols.modified_protocol(phi)
            assert res.rho_b.distance(mixture) < 1e-12
            channel_out = apply_channel(unot, DensityMatrix((B,), phi.density().matrix))
            assert mixture.distance(channel_out) < 1e-12

    def test_trace_one(self):
        rng = np.random.default_rng(25)
        rho = protocols.unot_as_mixture(protocols.haar_random_qubit(rng))
        assert qmath.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-13)


class TestTransposeVariant:
    def test_basis_input_marginals(self):
        res = protocols.transpose_variant(state(K0))
        # the sigma_y rotation lands on the A clone; S keeps the plain clones
        np.testing.assert_allclose(res.rho_a.matrix, np.diag([1 / 6, 5 / 6]), atol=1e-13)
        np.testing.assert_allclose(res.rho_s.matrix, np.diag([5 / 6, 1 / 6]), atol=1e-13)

    def test_bob_matches_transpose_channel(self):
        rng = np.random.default_rng(26)
        transpose = standard_channels()["transpose"]
        for _ in range(20):
            phi = protocols.haar_random_qubit(rng)
            res = protocols.transpose_variant(phi)
            expected = apply_channel(transpose, DensityMatrix((B,), phi.density().matrix))
            assert res.rho_b.distance(expected) < 1e-12

    def test_rotated_clone_relation_on_a_wire(self):
        rng = np.random.default_rng(27)
        y = pauli("Y")
        for _ in range(20):
            phi = protocols.haar_random_qubit(rng)
            res = protocols.transpose_variant(phi)
            plain = protocols.modified_protocol(phi)
            rotated = y @ plain.rho_s.matrix @ y.conj().T
            assert qmath.frobenius_distance(res.rho_a.matrix, rotated) < 1e-12
            assert res.rho_s.distance(plain.rho_s) < 1e-12

    def test_branch_probabilities(self):
        rng = np.random.default_rng(28)
        res = protocols.transpose_variant(protocols.haar_random_qubit(rng))
        assert res.p_singlet == pytest.approx(0.25, abs=1e-12)
        assert res.p_complement == pytest.approx(0.75, abs=1e-12)

    def test_success_branch_corrected_by_sigma_y(self):
        rng = np.random.default_rng(29)
        phi = protocols.haar_random_qubit(rng)
        res = protocols.transpose_variant(phi)
        assert fidelity(res.success_branch, on_b(phi)) == pytest.approx(1.0, abs=1e-12)


class TestMixedAncillaClone:
    def test_basis_input(self):
        res = protocols.mixed_ancilla_clone(state(K0))
        np.testing.assert_allclose(res.rho_s.matrix, np.diag([5 / 6, 1 / 6]), atol=1e-13)
        assert res.p_success == pytest.approx(0.75, abs=1e-13)

    def test_no_antisymmetric_component(self):
        rng = np.random.default_rng(30)
        singlet = bell_state(BellState.PSI_MINUS, (S, A))
        for _ in range(10):
            res = protocols.mixed_ancilla_clone(protocols.haar_random_qubit(rng))
            overlap = np.vdot(singlet.amplitudes, res.rho_sa.matrix @ singlet.amplitudes)
            assert abs(overlap) < 1e-13

    def test_clone_fidelity_over_random_inputs(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            phi = protocols.haar_random_qubit(rng)
            res = protocols.mixed_ancilla_clone(phi)
            assert fidelity(res.rho_s, phi) == pytest.approx(5 / 6, abs=1e-12)

    def test_matches_entangled_protocol_joint_state(self):
        rng = np.random.default_rng(32)
        for _ in range(20):
            phi = protocols.haar_random_qubit(rng)
            reduced = protocols.mixed_ancilla_clone(phi)
            full = protocols.modified_protocol(phi)
            assert reduced.rho_sa.distance(full.rho_sa) < 1e-12


class TestInvariantProperties:
    def test_universality_spread(self):
        rng = np.random.default_rng(33)
        f_clone, f_unot, f_mixed = [], [], []
        for _ in range(100):
            phi = protocols.haar_random_qubit(rng)
            res = protocols.modified_protocol(phi)
            f_clone.append(fidelity(res.rho_s, phi))
            f_unot.append(fidelity(res.rho_b, on_b(orthogonal_qubit(phi))))
            f_mixed.append(fidelity(protocols.mixed_ancilla_clone(phi).rho_s, phi))
        assert max(f_clone) - min(f_clone) < 1e-12
        assert max(f_unot) - min(f_unot) < 1e-12
        assert max(f_mixed) - min(f_mixed) < 1e-12

    def test_branch_weighted_channel_is_depolarizing(self):
        rng = np.random.default_rng(34)
        for _ in range(20):
            res = protocols.modified_protocol(protocols.haar_random_qubit(rng))
            mix = res.p_singlet * res.success_branch.matrix \
                + res.p_complement * res.rho_b.matrix
            assert qmath.frobenius_distance(mix, np.eye(2) / 2) < 1e-12

    def test_joint_clone_state_swap_symmetric(self):
        rng = np.random.default_rng(35)
        swap = np.eye(4)[[0, 2, 1, 3]].astype(complex)
        for _ in range(20):
            rho = protocols.modified_protocol(protocols.haar_random_qubit(rng)).rho_sa.matrix
            assert qmath.frobenius_distance(swap @ rho @ swap, rho) < 1e-12
