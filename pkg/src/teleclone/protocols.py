"""Teleportation-derived protocols.

Four variants of the same three-qubit bookkeeping.  The input qubit S is
joined to a shared singlet pair AB; Alice measures the SA pair; what Bob is
left holding depends on how much of the measurement result reaches him.

* ``standard_teleport``: full Bell measurement, two classical bits, Pauli
  correction; Bob recovers the input exactly on every branch.
* ``modified_protocol``: a dichotomic measurement that only distinguishes
  the SA singlet from its complement.  The singlet branch (probability 1/4)
  still teleports exactly; the complement branch (probability 3/4) leaves
  two optimal clones on S and A (fidelity 5/6) and the optimally flipped
  state on B (fidelity 2/3 against the orthogonal qubit).
* ``transpose_variant``: the same dichotomic scheme keyed on phi_plus
  instead of the singlet; the clones come out sigma_y-rotated and Bob's
  marginal realizes the optimal transpose-map approximation.
* ``mixed_ancilla_clone``: the two-qubit reduction with a maximally mixed
  ancilla instead of the entangled pair, which reproduces the clones only
  (no B system).  This is the configuration the photonic experiment runs.

Branch probabilities are computed exactly from amplitudes, never sampled;
Monte Carlo lives in the photonics module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import qmath
from .qcore import (
    A, B, S, BellState, DensityMatrix, PureState,
    apply_channel, bell_state, complement_projector, orthogonal_qubit,
    pauli, project_and_normalize, projector_onto, universal_not_channel,
    transpose_channel,
)

__all__ = [
    "TeleportOutcome", "CloneUnotResult", "MixedAncillaResult",
    "standard_teleport", "modified_protocol", "transpose_variant",
    "unot_as_mixture", "mixed_ancilla_clone", "haar_random_qubit",
    "CORRECTIONS",
]

# Bob's correction for each Bell outcome on the SA pair.
CORRECTIONS = {
    BellState.PSI_MINUS: "I",
    BellState.PSI_PLUS: "Z",
    BellState.PHI_MINUS: "X",
    BellState.PHI_PLUS: "Y",
}

_INTERNAL_TOL = 1e-10


@dataclass(frozen=True)
class TeleportOutcome:
    bell_result: BellState
    correction: str                # Pauli name Bob applies
    bob_state: DensityMatrix       # after correction
    uncorrected: DensityMatrix     # what Bob holds before correcting
    probability: float


@dataclass(frozen=True)
class CloneUnotResult:
    success_branch: DensityMatrix  # Bob, identified Bell state detected and corrected
    rho_sa: DensityMatrix          # joint clone state on the complement branch
    rho_s: DensityMatrix
    rho_a: DensityMatrix
    rho_b: DensityMatrix
    p_singlet: float               # identified-branch probability
    p_complement: float


class MixedAncillaResult(NamedTuple):
    rho_sa: DensityMatrix
    rho_s: DensityMatrix
    rho_a: DensityMatrix
    p_success: float


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise RuntimeError(f"internal consistency failure: {message}")


def _single_qubit(phi: PureState) -> PureState:
    if phi.dim != 2:
        raise ValueError("protocol input must be a single qubit")
    return PureState((S,), phi.amplitudes)


def _overall_state(phi: PureState) -> PureState:
    """|phi>_S x singlet_AB on layout (S, A, B)."""
    return _single_qubit(phi).tensor(bell_state(BellState.PSI_MINUS, (A, B)))


def _bob_marginal(state: PureState) -> DensityMatrix:
    return state.density().partial_trace({S, A})


def standard_teleport(phi: PureState) -> list[TeleportOutcome]:
    """All four Bell-measurement branches with exact probabilities."""
    omega = _overall_state(phi)
    outcomes = []
    for tag in BellState:
        proj = qmath.embed_operator(
            projector_onto(bell_state(tag, (S, A))), (S, A), omega.layout)
        branch, prob = project_and_normalize(omega, proj)
        uncorrected = _bob_marginal(branch)
        u = pauli(CORRECTIONS[tag])
        corrected = DensityMatrix((B,), u @ uncorrected.matrix @ u.conj().T)
        outcomes.append(TeleportOutcome(tag, CORRECTIONS[tag], corrected, uncorrected, prob))
    return outcomes


def _dichotomic(phi: PureState, identified: BellState) -> CloneUnotResult:
    """Shared machinery: identify one Bell state on SA, keep the complement."""
    phi = _single_qubit(phi)
    omega = _overall_state(phi)
    key = bell_state(identified, (S, A))

    ident_proj = qmath.embed_operator(projector_onto(key), (S, A), omega.layout)
    ident_branch, p_ident = project_and_normalize(omega, ident_proj)
    u = pauli(CORRECTIONS[identified])
    bob_raw = _bob_marginal(ident_branch)
    success = DensityMatrix((B,), u @ bob_raw.matrix @ u.conj().T)

    comp_branch, p_comp = project_and_normalize(
        omega, complement_projector(key, omega.layout))
    rho_sab = comp_branch.density()
    rho_sa = rho_sab.partial_trace({B})
    rho_s = rho_sa.partial_trace({A})
    rho_a = rho_sa.partial_trace({S})
    rho_b = rho_sab.partial_trace({S, A})

    return CloneUnotResult(success, rho_sa, rho_s, rho_a, rho_b, p_ident, p_comp)


def _symmetric_pair(phi: PureState) -> PureState:
    """(|perp phi> + |phi perp>)/sqrt(2) on (S, A)."""
    perp = orthogonal_qubit(phi)
    amps = (np.kron(perp.amplitudes, phi.amplitudes)
            + np.kron(phi.amplitudes, perp.amplitudes)) / math.sqrt(2)
    return PureState((S, A), amps)


def clone_pair_target(phi: PureState) -> DensityMatrix:
    """The exact joint clone state: 2/3 on |phi phi>, 1/3 on the symmetric mix."""
    phi = _single_qubit(phi)
    both = PureState((S, A), np.kron(phi.amplitudes, phi.amplitudes))
    m = (2.0 / 3.0) * projector_onto(both) + (1.0 / 3.0) * projector_onto(_symmetric_pair(phi))
    return DensityMatrix((S, A), m)


def modified_protocol(phi: PureState) -> CloneUnotResult:
    """Dichotomic singlet-or-not protocol realizing cloning and universal NOT."""
    result = _dichotomic(phi, BellState.PSI_MINUS)
    target = clone_pair_target(phi)
    _require(result.rho_sa.distance(target) <= _INTERNAL_TOL,
             "complement-branch clone state strayed from its closed form")
    return result


def transpose_variant(phi: PureState) -> CloneUnotResult:
    """Dichotomic protocol keyed on phi_plus; realizes the transpose approximation.

    Bob's marginal equals the composed sigma_y-after-universal-NOT channel.
    The rotation touches exactly one clone: phi_plus on SA is the singlet
    rotated by sigma_y on the A wire alone, so the A clone comes out as the
    sigma_y rotation of the usual clone state while the S clone is the plain
    one.  Per-wire unitaries on A and B would restore the singlet variant.
    """
    result = _dichotomic(phi, BellState.PHI_PLUS)
    phi = _single_qubit(phi)
    y = pauli("Y")

    plain = modified_protocol(phi)
    rotated = y @ plain.rho_s.matrix @ y.conj().T
    _require(qmath.frobenius_distance(result.rho_a.matrix, rotated) <= _INTERNAL_TOL,
             "A clone is not the sigma_y rotation of the singlet variant's clone")
    _require(result.rho_s.distance(plain.rho_s) <= _INTERNAL_TOL,
             "S clone strayed from the singlet variant's clone")
    expected_b = apply_channel(transpose_channel(), phi.density())
    _require(result.rho_b.distance(expected_b) <= _INTERNAL_TOL,
             "Bob marginal differs from the transpose-approximation channel")
    return result


def unot_as_mixture(phi: PureState) -> DensityMatrix:
    """Equal-weight mixture of Bob's uncorrected states on the three
    non-singlet Bell branches.

    This is the brute-force enumeration of what the dichotomic protocol's
    failure branch hands Bob, and it must coincide with the universal-NOT
    channel applied directly.
    """
    phi = _single_qubit(phi)
    outcomes = standard_teleport(phi)
    mix = sum(o.uncorrected.matrix for o in outcomes if o.bell_result is not BellState.PSI_MINUS) / 3.0
    rho = DensityMatrix((B,), mix)
    channel_out = apply_channel(universal_not_channel(), DensityMatrix((B,), phi.density().matrix))
    _require(rho.distance(channel_out) <= _INTERNAL_TOL,
             "Bell-branch mixture differs from the universal-NOT channel")
    return rho


def mixed_ancilla_clone(phi: PureState) -> MixedAncillaResult:
    """Cloning without the entangled pair: project |phi><phi| x I/2 off the singlet.

    The flipped B output is absent here; only the clone pair survives.  This
    is the arrangement the two-photon experiment implements by post-selecting
    bunched pairs.
    """
    phi = _single_qubit(phi)
    rho_in = np.kron(phi.density().matrix, qmath.identity(2) / 2.0)
    singlet = bell_state(BellState.PSI_MINUS, (S, A))
    p = qmath.identity(4) - projector_onto(singlet)
    projected = p @ rho_in @ p
    p_success = float(np.real(np.trace(projected)))
    rho_sa = DensityMatrix((S, A), projected / p_success)
    return MixedAncillaResult(rho_sa, rho_sa.partial_trace({A}),
                              rho_sa.partial_trace({S}), p_success)


def haar_random_qubit(rng: np.random.Generator) -> PureState:
    """Haar-random qubit: two standard complex Gaussians, normalized."""
    amps = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    return PureState((S,), amps / np.linalg.norm(amps))
