"""Quantum-object tests: Paulis, Bell machinery, projectors, channels, fidelity."""

import math

import numpy as np
import pytest

from teleclone import qmath
from teleclone.qcore import (
    A, B, S, BellState, DegenerateProjectionError, DensityMatrix, PureState,
    QuantumChannel, apply_channel, bell_state, complement_projector, fidelity,
    orthogonal_qubit, pauli, project_and_normalize, projector_onto,
    standard_channels,
)

K0 = np.array([1, 0], dtype=complex)
K1 = np.array([0, 1], dtype=complex)


def haar_qubit(rng):
    amps = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return PureState((S,), amps / np.linalg.norm(amps))


class TestPauli:
    def test_action_on_basis(self):
        np.testing.assert_allclose(pauli("Z") @ K0, K0)
        np.testing.assert_allclose(pauli("X") @ K0, K1)

    def test_y_is_minus_i_z_x(self):
        expected = qmath.matmul(qmath.scale(-1j, pauli("Z")), pauli("X"))
        np.testing.assert_allclose(pauli("Y"), expected, atol=0)

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            pauli("Q")


class TestBellStates:
    def test_singlet_amplitudes(self):
        got = bell_state(BellState.PSI_MINUS, (A, B)).amplitudes
        np.testing.assert_allclose(got, np.array([0, 1, -1, 0]) / math.sqrt(2), atol=1e-15)

    def test_orthonormality(self):
        states = [bell_state(tag, (S, A)) for tag in BellState]
        for i, s1 in enumerate(states):
            for j, s2 in enumerate(states):
                expected = 1.0 if i == j else 0.0
                assert abs(s1.overlap(s2)) == pytest.approx(expected, abs=1e-14)

    def test_marginals_maximally_mixed(self):
        for tag in BellState:
            rho = bell_state(tag, (S, A)).density().partial_trace({A})
            np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-14)

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError):
            bell_state(BellState.PSI_MINUS, (S, S))


class TestOrthogonalQubit:
    def test_basis_flip_up_to_phase(self):
        flipped = orthogonal_qubit(PureState((S,), K0))
        np.testing.assert_allclose(projector_onto(flipped), np.outer(K1, K1), atol=1e-14)

    def test_plus_state(self):
        plus = PureState((S,), np.array([1, 1]) / math.sqrt(2))
        assert abs(plus.overlap(orthogonal_qubit(plus))) < 1e-14

    def test_random_states_orthogonal(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            phi = haar_qubit(rng)
            assert abs(phi.overlap(orthogonal_qubit(phi))) < 1e-12


class TestProjectors:
    def test_complement_trace(self):
        # 8-dim ambient minus a rank-2 embedded projector
        p = complement_projector(bell_state(BellState.PSI_MINUS, (S, A)), (S, A, B))
        assert qmath.trace(p) == pytest.approx(6)

    def test_idempotence(self):
        p = complement_projector(bell_state(BellState.PSI_MINUS, (S, A)), (S, A, B))
        assert qmath.frobenius_distance(p @ p, p) < 1e-12

    def test_overall_state_hits_complement_with_prob_three_quarters(self):
        rng = np.random.default_rng(9)
        p = complement_projector(bell_state(BellState.PSI_MINUS, (S, A)), (S, A, B))
        for _ in range(20):
            phi = haar_qubit(rng)
            omega = phi.tensor(bell_state(BellState.PSI_MINUS, (A, B)))
            val = np.vdot(omega.amplitudes, p @ omega.amplitudes).real
            assert val == pytest.approx(0.75, abs=1e-12)


class TestProjectAndNormalize:
    def test_projected_state_closed_form(self):
        """At alpha=1 the complement branch is sqrt(2/3)(|xi1>|1> - |xi0>|0>)
        with xi1 = |00> and xi0 = (|10> + |01>)/2."""
        phi = PureState((S,), K0)
        omega = phi.tensor(bell_state(BellState.PSI_MINUS, (A, B)))
        p = complement_projector(bell_state(BellState.PSI_MINUS, (S, A)), (S, A, B))
        projected, prob = project_and_normalize(omega, p)
        assert prob == pytest.approx(0.75, abs=1e-14)

        xi1 = np.kron(K0, K0)
        xi0 = (np.kron(K1, K0) + np.kron(K0, K1)) / 2
        expected = math.sqrt(2 / 3) * (np.kron(xi1, K1) - np.kron(xi0, K0))
        # compare projectors: the normalization fixes no global phase
        np.testing.assert_allclose(projector_onto(projected),
                                   np.outer(expected, expected.conj()), atol=1e-14)

    def test_projecting_onto_own_support_is_identity(self):
        singlet = bell_state(BellState.PSI_MINUS, (S, A))
        projected, prob = project_and_normalize(singlet, projector_onto(singlet))
        assert prob == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_allclose(projected.amplitudes, singlet.amplitudes, atol=1e-14)

    def test_annihilation_raises(self):
        singlet = bell_state(BellState.PSI_MINUS, (S, A))
        comp = np.eye(4) - projector_onto(singlet)
        with pytest.raises(DegenerateProjectionError):
            project_and_normalize(singlet, comp)


class TestChannels:
    def test_universal_not_on_basis_state(self):
        rho = apply_channel(standard_channels()["universal_not"],
                            PureState((S,), K0).density())
        np.testing.assert_allclose(rho.matrix, np.diag([1 / 3, 2 / 3]), atol=1e-14)

    def test_depolarizing_erases_everything(self):
        rng = np.random.default_rng(10)
        dep = standard_channels()["depolarizing"]
        for _ in range(100):
            m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            rho = m @ m.conj().T
            rho = DensityMatrix((S,), rho / np.trace(rho))
            out = apply_channel(dep, rho)
            assert qmath.frobenius_distance(out.matrix, np.eye(2) / 2) < 1e-12

    def test_identity_channel(self):
        rng = np.random.default_rng(12)
        ident = QuantumChannel([np.eye(2)])
        phi = haar_qubit(rng)
        out = apply_channel(ident, phi.density())
        np.testing.assert_allclose(out.matrix, phi.density().matrix, atol=1e-14)

    def test_transpose_channel_matches_explicit_composition(self):
        """Oracle: conjugate the universal-NOT output by sigma_y by hand."""
        y = pauli("Y")
        transpose = standard_channels()["transpose"]
        unot = standard_channels()["universal_not"]
        rho0 = PureState((S,), K0).density()
        by_hand = y @ apply_channel(unot, rho0).matrix @ y.conj().T
        np.testing.assert_allclose(apply_channel(transpose, rho0).matrix, by_hand, atol=1e-14)
        np.testing.assert_allclose(by_hand, np.diag([2 / 3, 1 / 3]), atol=1e-14)

    def test_trace_preservation_residuals(self):
        for channel in standard_channels().values():
            total = sum(k.conj().T @ k for k in channel.kraus)
            assert qmath.frobenius_distance(total, np.eye(channel.dim)) < 1e-12

    def test_sigma_y_channel_is_involution(self):
        rng = np.random.default_rng(13)
        ch = standard_channels()["sigma_y"]
        phi = haar_qubit(rng)
        back = apply_channel(ch, apply_channel(ch, phi.density()))
        np.testing.assert_allclose(back.matrix, phi.density().matrix, atol=1e-14)

    def test_incomplete_kraus_rejected(self):
        with pytest.raises(ValueError):
            QuantumChannel([pauli("X") / 2])


class TestFidelity:
    def test_optimal_clone_value(self):
        phi = PureState((S,), K0)
        perp = orthogonal_qubit(phi)
        rho = DensityMatrix((S,), (5 / 6) * projector_onto(phi) + (1 / 6) * projector_onto(perp))
        assert fidelity(rho, phi) == pytest.approx(5 / 6, abs=1e-14)

    def test_optimal_flip_value(self):
        phi = PureState((S,), K0)
        perp = orthogonal_qubit(phi)
        rho = DensityMatrix((S,), (2 / 3) * projector_onto(perp) + (1 / 3) * projector_onto(phi))
        assert fidelity(rho, perp) == pytest.approx(2 / 3, abs=1e-14)

    def test_pure_state_self_fidelity(self):
        rng = np.random.default_rng(14)
        phi = haar_qubit(rng)
        assert fidelity(phi.density(), phi) == pytest.approx(1.0, abs=1e-14)


class TestInvariantProperties:
    def test_unot_twirl_identity(self):
        rng = np.random.default_rng(15)
        unot = standard_channels()["universal_not"]
        for _ in range(20):
            m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            herm = m @ m.conj().T
            herm /= np.trace(herm)
            out = apply_channel(unot, DensityMatrix((S,), herm))
            expected = (2 * np.trace(herm) * np.eye(2) - herm) / 3
            assert qmath.frobenius_distance(out.matrix, expected) < 1e-12

    def test_unot_universal_fidelity(self):
        rng = np.random.default_rng(16)
        unot = standard_channels()["universal_not"]
        for _ in range(50):
            phi = haar_qubit(rng)
            out = apply_channel(unot, phi.density())
            assert fidelity(out, orthogonal_qubit(phi)) == pytest.approx(2 / 3, abs=1e-12)

    def test_singlet_complement_commutes_with_uu(self):
        rng = np.random.default_rng(17)
        proj = complement_projector(bell_state(BellState.PSI_MINUS, (S, A)), (S, A))
        for _ in range(20):
            q = rng.standard_normal(4)
            a, b, c, d = q / np.linalg.norm(q)
            u = np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])
            uu = np.kron(u, u)
            assert qmath.frobenius_distance(proj @ uu, uu @ proj) < 1e-10

    def test_density_matrix_validation(self):
        with pytest.raises(ValueError):
            DensityMatrix((S,), np.array([[1.0, 0.2], [0.3, 0.0]]))  # not Hermitian
        with pytest.raises(ValueError):
            DensityMatrix((S,), np.diag([0.7, 0.7]))  # trace off
        with pytest.raises(ValueError):
            DensityMatrix((S,), np.diag([1.5, -0.5]))  # negative eigenvalue

    def test_pure_state_validation(self):
        with pytest.raises(ValueError):
            PureState((S,), [1.0, 1.0])  # unnormalized
