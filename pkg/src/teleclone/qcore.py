"""Quantum objects over the matrix kernel.

Pure states and density matrices carry an ordered layout of labeled qubit
subsystems; channels are Kraus lists.  All values are immutable after
construction and every operation returns a new value, so protocol code can
share them freely.

The named channels built here are the ones the teleportation protocols
realize: the depolarizing channel (all classical information discarded),
the universal-NOT map (the optimal approximation to qubit flipping, output
fidelity 2/3 against the orthogonal state), the sigma_y conjugation, and
their composition approximating the transpose map.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import qmath
from .qmath import DEFAULT_ATOL, LabelLike, SubsystemLabel, as_layout

__all__ = [
    "DegenerateProjectionError", "PureState", "DensityMatrix", "QuantumChannel",
    "BellState", "pauli", "bell_state", "orthogonal_qubit", "projector_onto",
    "complement_projector", "project_and_normalize", "apply_channel", "fidelity",
    "depolarizing_channel", "universal_not_channel", "sigma_y_channel",
    "transpose_channel", "standard_channels", "S", "A", "B",
]

# Canonical subsystem names: S the input qubit, A Alice's ancilla, B Bob's.
S = SubsystemLabel("S")
A = SubsystemLabel("A")
B = SubsystemLabel("B")

_POSITIVITY_PROBES = 16


class DegenerateProjectionError(ValueError):
    """Raised when a projector annihilates the state it is applied to."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over an ordered list of labeled qubits."""

    layout: tuple[SubsystemLabel, ...]
    amplitudes: np.ndarray

    def __init__(self, layout: Iterable[LabelLike], amplitudes, atol: float = DEFAULT_ATOL):
        layout = as_layout(layout)
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = qmath.layout_dim(layout)
        if amps.shape != (n,):
            raise ValueError(f"amplitude length {amps.shape[0]} does not match layout dimension {n}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes contain non-finite entries")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > atol:
            raise ValueError(f"state is not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def overlap(self, other: "PureState") -> complex:
        if self.dim != other.dim:
            raise ValueError("overlap dimension mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def tensor(self, other: "PureState") -> "PureState":
        return PureState(self.layout + other.layout,
                         np.kron(self.amplitudes, other.amplitudes))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))


def _check_positivity(m: np.ndarray, atol: float) -> None:
    """Eigensolver-free positivity heuristic: sampled sandwich values plus
    leading principal minors at the small dimensions where they are cheap."""
    n = m.shape[0]
    rng = np.random.default_rng(0x51D5)
    for _ in range(_POSITIVITY_PROBES):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        val = float(np.real(np.vdot(v, m @ v)))
        if val < -atol:
            raise ValueError(f"matrix is not positive semidefinite: <v|m|v> = {val:.3e}")
    if n <= 4:
        for k in range(1, n + 1):
            minor = float(np.real(np.linalg.det(m[:k, :k])))
            if minor < -100 * atol:  # slack for products of near-zero eigenvalues
                raise ValueError(f"negative leading principal minor of order {k}: {minor:.3e}")


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator on labeled qubits."""

    layout: tuple[SubsystemLabel, ...]
    matrix: np.ndarray

    def __init__(self, layout: Iterable[LabelLike], matrix, atol: float = DEFAULT_ATOL):
        layout = as_layout(layout)
        m = qmath.asmatrix(matrix)
        n = qmath.layout_dim(layout)
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match layout dimension {n}")
        if qmath.frobenius_distance(m, m.conj().T) > atol:
            raise ValueError("matrix is not Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > atol:
            raise ValueError(f"trace is {tr}, expected 1")
        _check_positivity(m, atol)
        object.__setattr__(self, "layout", layout)
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def partial_trace(self, traced: Iterable[LabelLike]) -> "DensityMatrix":
        traced_names = {qmath.as_label(t).name for t in traced}
        remaining = tuple(l for l in self.layout if l.name not in traced_names)
        return DensityMatrix(remaining, qmath.partial_trace(self.matrix, self.layout, traced))

    def distance(self, other: "DensityMatrix") -> float:
        return qmath.frobenius_distance(self.matrix, other.matrix)


@dataclass(frozen=True, eq=False)
class QuantumChannel:
    """Completely positive trace-preserving map as a finite Kraus list."""

    kraus: tuple[np.ndarray, ...]

    def __init__(self, kraus: Sequence, atol: float = DEFAULT_ATOL):
        ops = tuple(_freeze(qmath.asmatrix(k)) for k in kraus)
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        n = ops[0].shape[0]
        for k in ops:
            if k.shape != (n, n):
                raise ValueError("Kraus operators must share one square dimension")
        total = sum(k.conj().T @ k for k in ops)
        if qmath.frobenius_distance(total, np.eye(n)) > atol:
            raise ValueError("Kraus operators do not satisfy the completeness relation")
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[0]

    def compose(self, inner: "QuantumChannel") -> "QuantumChannel":
        """self after inner: Kraus set of all pairwise products."""
        return QuantumChannel([a @ b for a in self.kraus for b in inner.kraus])


class BellState(enum.Enum):
    PSI_MINUS = "psi_minus"
    PSI_PLUS = "psi_plus"
    PHI_MINUS = "phi_minus"
    PHI_PLUS = "phi_plus"


_BELL_AMPLITUDES = {
    BellState.PSI_MINUS: np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2),
    BellState.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2),
    BellState.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2),
    BellState.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2),
}


def pauli(which: str) -> np.ndarray:
    """The 2x2 Pauli matrix named 'I', 'X', 'Y' or 'Z'.

    sigma_y is produced exactly as -i sigma_z sigma_x rather than from a
    literal, so the algebraic identity holds to the last bit.
    """
    w = which.upper()
    if w == "I":
        return qmath.identity(2)
    if w == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if w == "Z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if w == "Y":
        return qmath.scale(-1j, qmath.matmul(pauli("Z"), pauli("X")))
    raise ValueError(f"unknown Pauli name {which!r}")


def bell_state(tag: BellState, labels: tuple[LabelLike, LabelLike]) -> PureState:
    """One of the four Bell states on a pair of distinct qubit labels."""
    layout = as_layout(labels)  # rejects duplicates
    if len(layout) != 2:
        raise ValueError("a Bell state needs exactly two labels")
    return PureState(layout, _BELL_AMPLITUDES[tag])


def orthogonal_qubit(phi: PureState) -> PureState:
    """The qubit orthogonal to phi, with phase convention (a, b) -> (-b*, a*)."""
    if phi.dim != 2:
        raise ValueError("orthogonal_qubit takes a single qubit")
    a, b = phi.amplitudes
    return PureState(phi.layout, [-np.conj(b), np.conj(a)])


def projector_onto(state: PureState) -> np.ndarray:
    return np.outer(state.amplitudes, state.amplitudes.conj())


def complement_projector(state: PureState, ambient: Sequence[LabelLike]) -> np.ndarray:
    """I - |state><state|, tensor-extended by identity onto the ambient layout."""
    ambient = as_layout(ambient)
    p = qmath.embed_operator(projector_onto(state), state.layout, ambient)
    return qmath.identity(qmath.layout_dim(ambient)) - p


def project_and_normalize(state: PureState, projector: np.ndarray) -> tuple[PureState, float]:
    """Apply a projector and renormalize; returns (state, branch probability)."""
    p = qmath.asmatrix(projector)
    if p.shape != (state.dim, state.dim):
        raise ValueError(f"projector shape {p.shape} does not match state dimension {state.dim}")
    v = p @ state.amplitudes
    prob = float(np.real(np.vdot(v, v)))
    if prob < 1e-14:
        raise DegenerateProjectionError("projector annihilated the state")
    return PureState(state.layout, v / math.sqrt(prob)), prob


def apply_channel(channel: QuantumChannel, rho: DensityMatrix) -> DensityMatrix:
    if channel.dim != rho.dim:
        raise ValueError(f"channel dimension {channel.dim} does not match state dimension {rho.dim}")
    out = sum(k @ rho.matrix @ k.conj().T for k in channel.kraus)
    return DensityMatrix(rho.layout, out)


def fidelity(rho: DensityMatrix, target: PureState) -> float:
    """<target| rho |target>, real for valid inputs."""
    if rho.dim != target.dim:
        raise ValueError("fidelity dimension mismatch")
    val = complex(np.vdot(target.amplitudes, rho.matrix @ target.amplitudes))
    if abs(val.imag) > 1e-12:
        raise ValueError(f"fidelity came out non-real: {val}")
    return float(val.real)


def depolarizing_channel() -> QuantumChannel:
    """Uniform-Pauli Kraus set; sends every qubit state to I/2."""
    return QuantumChannel([pauli(w) / 2.0 for w in "IXYZ"])


def universal_not_channel() -> QuantumChannel:
    """Equal mixture of the three non-identity Pauli conjugations.

    This is the optimal universal approximation to qubit flipping: for any
    pure input it puts weight 2/3 on the orthogonal state.
    """
    return QuantumChannel([pauli(w) / math.sqrt(3) for w in "ZXY"])


def sigma_y_channel() -> QuantumChannel:
    return QuantumChannel([pauli("Y")])


def transpose_channel() -> QuantumChannel:
    """sigma_y conjugation after the universal NOT; approximates the transpose map."""
    return sigma_y_channel().compose(universal_not_channel())


def standard_channels() -> dict[str, QuantumChannel]:
    return {
        "depolarizing": depolarizing_channel(),
        "universal_not": universal_not_channel(),
        "sigma_y": sigma_y_channel(),
        "transpose": transpose_channel(),
    }
