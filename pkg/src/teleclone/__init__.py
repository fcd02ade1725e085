"""Teleportation-based optimal quantum cloning and universal-NOT simulator.

A small exact density-matrix engine reproduces the dichotomic-measurement
teleportation protocol that leaves two optimal clones (fidelity 5/6) at the
sender and the optimally flipped qubit (fidelity 2/3) at the receiver, and
a second-quantized two-photon model reproduces the post-selected
beamsplitter experiment that measures the cloning fidelity through the
coincidence enhancement ratio R via F = (2R + 1)/(2R + 2).
"""

from .qcore import (
    BellState, DensityMatrix, PureState, QuantumChannel,
    apply_channel, bell_state, fidelity, orthogonal_qubit, pauli,
    standard_channels,
)
from .protocols import (
    CloneUnotResult, MixedAncillaResult, TeleportOutcome, haar_random_qubit,
    mixed_ancilla_clone, modified_protocol, standard_teleport,
    transpose_variant, unot_as_mixture,
)
from .photonics import (
    CoincidenceRecord, TwoPhotonState, baseline_record, beamsplitter,
    extract_R, fidelity_from_R, hom_scan, prepare_input,
    postselect_double_out1, visibility_model,
)

__version__ = "0.1.0"
