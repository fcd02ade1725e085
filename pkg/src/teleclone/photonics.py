"""Second-quantized two-photon simulation of the beamsplitter experiment.

The setup: the input qubit is the polarization of a photon entering mode
``in_S`` of a 50:50 beamsplitter; a second photon, carrying a maximally
mixed polarization (a stochastic H/V ensemble), enters ``in_A`` with an
adjustable delay.  Detecting both photons in output mode 1 post-selects the
symmetric (bunched) polarization component, which is exactly the
singlet-complement projection that produces two optimal clones.  A
polarization analyzer on mode 1 splits the transmitted component over two
detectors; the coincidence rate between them rises by the factor

    R = p_A1A2(zero delay) / p_A1A2(large delay),

and the cloning fidelity follows as F = (2R + 1)/(2R + 2), with R = 2 at
perfect overlap giving the optimal 5/6.

Photon distinguishability is carried by a two-element temporal basis
(``matched`` and ``orthogonal``); the delayed photon sits in the
superposition sqrt(v)|matched> + sqrt(1-v)|orthogonal>, so the scalar
visibility v in [0, 1] is the only thing the delay stage controls, and
every bunching probability depends on the delay through v alone.

States are amplitude tables over unordered pairs of single-photon basis
modes (spatial x polarization x temporal), normalized so that the pattern
probability is |amplitude|^2 including double occupation.  Linear optics
acts through symmetric-matrix conjugation, which keeps the bosonic
symmetrization exact at every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from .qcore import A, S, DensityMatrix, PureState, orthogonal_qubit

__all__ = [
    "Mode", "TwoPhotonState", "CoincidenceRecord", "DegeneratePostselectionError",
    "visibility_model", "far_baseline_z", "prepare_input", "beamsplitter",
    "postselect_double_out1", "analyze_mode1", "detection_pattern_distribution",
    "polarization_density_matrix", "postselected_clone_state",
    "exact_coincidence_probabilities", "hom_scan", "baseline_record",
    "extract_R", "fidelity_from_R",
    "IN_S", "IN_A", "OUT_1", "OUT_2", "DET_A1", "DET_A2", "DET_B",
    "MATCHED", "ORTHOGONAL", "SPEED_OF_LIGHT_UM_PER_FS",
]

SPEED_OF_LIGHT_UM_PER_FS = 0.299792458

IN_S, IN_A = "in_S", "in_A"
OUT_1, OUT_2 = "out_1", "out_2"
DET_A1, DET_A2, DET_B = "det_A1", "det_A2", "det_B"
MATCHED, ORTHOGONAL = "matched", "orthogonal"

_POL_H, _POL_V = "H", "V"
_POL_ALONG, _POL_ORTHO = "along", "ortho"   # analyzer basis, relative to the input qubit

_PRUNE_TOL = 1e-14

# How far (in units of c * tau_coh) the stage must sit for the overlap to
# underflow to exactly zero; used for the switched-off baseline record.
_BASELINE_COHERENCE_LENGTHS = 60.0


class DegeneratePostselectionError(ValueError):
    """Raised when the requested detection pattern has zero probability."""


class Mode(NamedTuple):
    """A fully specified single-photon basis mode."""

    spatial: str
    pol: str
    temporal: str


AncillaSpec = Union[str, PureState]


@dataclass(frozen=True)
class TwoPhotonState:
    """Amplitudes over unordered occupation patterns of two bosonic photons.

    Keys are canonically ordered mode pairs; a key (m, m) means double
    occupation.  Amplitudes refer to the normalized Fock basis, so the total
    probability is the plain sum of |amplitude|^2 over patterns.
    """

    terms: dict[tuple[Mode, Mode], complex]

    def __init__(self, terms: dict):
        canon: dict[tuple[Mode, Mode], complex] = {}
        for (m1, m2), amp in terms.items():
            key = (m1, m2) if m1 <= m2 else (m2, m1)
            canon[key] = canon.get(key, 0.0) + complex(amp)
        canon = {k: a for k, a in sorted(canon.items()) if abs(a) > _PRUNE_TOL}
        object.__setattr__(self, "terms", canon)

    @classmethod
    def from_single_photons(cls, u: dict[Mode, complex], w: dict[Mode, complex]) -> "TwoPhotonState":
        """Bosonic product of two single-photon states.

        Normalized as given when the two states occupy orthogonal modes
        (always the case for the two beamsplitter inputs).
        """
        terms: dict[tuple[Mode, Mode], complex] = {}
        for mu, au in u.items():
            for mw, aw in w.items():
                amp = au * aw
                if mu == mw:
                    amp *= math.sqrt(2)
                key = (mu, mw) if mu <= mw else (mw, mu)
                terms[key] = terms.get(key, 0.0) + amp
        return cls(terms)

    def total_probability(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.terms.values()))

    def spatial_support(self) -> set[str]:
        return {m.spatial for pair in self.terms for m in pair}

    def _coefficient_matrix(self) -> tuple[list[Mode], np.ndarray]:
        """Symmetric matrix C with state = sum_ij C_ij a_i+ a_j+ |vac>."""
        modes = sorted({m for pair in self.terms for m in pair})
        index = {m: i for i, m in enumerate(modes)}
        c = np.zeros((len(modes), len(modes)), dtype=complex)
        for (m1, m2), amp in self.terms.items():
            i, j = index[m1], index[m2]
            if i == j:
                c[i, i] = amp / math.sqrt(2)
            else:
                c[i, j] = amp / 2.0
                c[j, i] = amp / 2.0
        return modes, c

    @classmethod
    def _from_coefficient_matrix(cls, modes: Sequence[Mode], c: np.ndarray) -> "TwoPhotonState":
        terms: dict[tuple[Mode, Mode], complex] = {}
        n = len(modes)
        for i in range(n):
            amp = c[i, i] * math.sqrt(2)
            if abs(amp) > _PRUNE_TOL:
                terms[(modes[i], modes[i])] = amp
            for j in range(i + 1, n):
                amp = c[i, j] + c[j, i]
                if abs(amp) > _PRUNE_TOL:
                    terms[(modes[i], modes[j])] = amp
        return cls(terms)

    def apply_mode_map(self, mapping: dict[Mode, list[tuple[Mode, complex]]]) -> "TwoPhotonState":
        """Apply a single-photon linear isometry; modes absent from the
        mapping pass through unchanged."""
        modes, c = self._coefficient_matrix()
        out_modes = sorted({om for m in modes for om, _ in mapping.get(m, [(m, 1.0)])})
        out_index = {m: i for i, m in enumerate(out_modes)}
        mat = np.zeros((len(out_modes), len(modes)), dtype=complex)
        for j, m in enumerate(modes):
            for om, amp in mapping.get(m, [(m, 1.0)]):
                mat[out_index[om], j] += amp
        return self._from_coefficient_matrix(out_modes, mat @ c @ mat.T)


@dataclass(frozen=True)
class CoincidenceRecord:
    """Per-delay tally: exact probabilities plus Monte Carlo counts."""

    z_um: float
    visibility: float
    p_A1A2: float
    p_A2B: float
    n_A1A2: int = 0
    n_A2B: int = 0
    trials: int = 0

    def __post_init__(self):
        for p in (self.p_A1A2, self.p_A2B):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability {p} outside [0, 1]")
        if self.n_A1A2 > self.trials or self.n_A2B > self.trials:
            raise ValueError("counts exceed the number of trials")


def visibility_model(z_um: float, tau_coh_fs: float) -> float:
    """Pairwise temporal overlap at stage position z (micrometers).

    The stage convention is z = 2 * delay * c, so the mutual delay is
    z / (2c); the overlap is Gaussian in that delay over the coherence time.
    """
    if tau_coh_fs <= 0:
        raise ValueError("coherence time must be positive")
    delay_fs = z_um / (2.0 * SPEED_OF_LIGHT_UM_PER_FS)
    return float(np.exp(-((delay_fs / tau_coh_fs) ** 2)))


def far_baseline_z(tau_coh_fs: float) -> float:
    """A stage position far enough out that the overlap underflows to 0.0."""
    return _BASELINE_COHERENCE_LENGTHS * SPEED_OF_LIGHT_UM_PER_FS * tau_coh_fs


def _single_photon(spatial: str, pol_amps: Sequence[complex],
                   temporal_amps: Sequence[complex]) -> dict[Mode, complex]:
    photon = {}
    for pol, pa in zip((_POL_H, _POL_V), pol_amps):
        for temporal, ta in zip((MATCHED, ORTHOGONAL), temporal_amps):
            amp = complex(pa) * complex(ta)
            if amp != 0:
                photon[Mode(spatial, pol, temporal)] = amp
    return photon


def prepare_input(phi: PureState, ancilla: AncillaSpec, v: float) -> list[tuple[float, TwoPhotonState]]:
    """Input ensemble for the experiment: weighted two-photon states.

    The signal photon enters ``in_S`` carrying phi in the matched temporal
    mode.  The ancilla photon enters ``in_A`` in the temporal superposition
    sqrt(v)|matched> + sqrt(1-v)|orthogonal>; its polarization is either a
    fixed pure state or the equal-weight H/V ensemble standing in for the
    maximally mixed state.
    """
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {v}")
    if phi.dim != 2:
        raise ValueError("input photon polarization must be a single qubit")
    temporal = (math.sqrt(v), math.sqrt(1.0 - v))
    signal = _single_photon(IN_S, phi.amplitudes, (1.0, 0.0))

    if isinstance(ancilla, PureState):
        pols = [(1.0, ancilla.amplitudes)]
    elif ancilla == "mixed_HV":
        pols = [(0.5, (1.0, 0.0)), (0.5, (0.0, 1.0))]
    else:
        raise ValueError(f"unknown ancilla spec {ancilla!r}")

    ensemble = []
    for weight, pol in pols:
        member = TwoPhotonState.from_single_photons(
            signal, _single_photon(IN_A, pol, temporal))
        ensemble.append((weight, member))
    return ensemble


def beamsplitter(state: TwoPhotonState) -> TwoPhotonState:
    """50:50 beamsplitter: in_S -> (out_1 + out_2)/sqrt2, in_A -> (out_1 - out_2)/sqrt2."""
    support = state.spatial_support()
    if not support <= {IN_S, IN_A}:
        raise ValueError(f"beamsplitter input must occupy in_S/in_A only, found {sorted(support)}")
    inv = 1.0 / math.sqrt(2)
    mapping = {}
    for pair in state.terms:
        for m in pair:
            sign = 1.0 if m.spatial == IN_S else -1.0
            mapping[m] = [
                (Mode(OUT_1, m.pol, m.temporal), inv),
                (Mode(OUT_2, m.pol, m.temporal), sign * inv),
            ]
    return state.apply_mode_map(mapping)


def postselect_double_out1(state: TwoPhotonState) -> tuple[TwoPhotonState, float]:
    """Keep only the both-photons-in-out_1 patterns; returns (state, probability)."""
    support = state.spatial_support()
    if not support <= {OUT_1, OUT_2}:
        raise ValueError(f"post-selection expects beamsplitter output modes, found {sorted(support)}")
    kept = {pair: amp for pair, amp in state.terms.items()
            if pair[0].spatial == OUT_1 and pair[1].spatial == OUT_1}
    p_post = float(sum(abs(a) ** 2 for a in kept.values()))
    if p_post < 1e-14:
        raise DegeneratePostselectionError("no amplitude with both photons in output mode 1")
    scale = 1.0 / math.sqrt(p_post)
    return TwoPhotonState({pair: amp * scale for pair, amp in kept.items()}), p_post


def _analyzer_map(phi: PureState) -> dict[Mode, list[tuple[Mode, complex]]]:
    """Single-photon isometry for the mode-1 analyzer cascade.

    The waveplate/PBS combination transmits the phi component toward a 50:50
    splitter feeding detectors A1/A2 and reflects the orthogonal component
    to detector B.  Temporal labels ride along untouched.
    """
    perp = orthogonal_qubit(phi)
    inv = 1.0 / math.sqrt(2)
    mapping = {}
    for pol, basis_vec in ((_POL_H, np.array([1.0, 0.0])), (_POL_V, np.array([0.0, 1.0]))):
        c = complex(np.vdot(phi.amplitudes, basis_vec))
        d = complex(np.vdot(perp.amplitudes, basis_vec))
        for temporal in (MATCHED, ORTHOGONAL):
            mapping[Mode(OUT_1, pol, temporal)] = [
                (Mode(DET_A1, _POL_ALONG, temporal), c * inv),
                (Mode(DET_A2, _POL_ALONG, temporal), c * inv),
                (Mode(DET_B, _POL_ORTHO, temporal), d),
            ]
    return mapping


def _spatial_pair_probabilities(state: TwoPhotonState) -> dict[tuple[str, str], float]:
    dist: dict[tuple[str, str], float] = {}
    for (m1, m2), amp in state.terms.items():
        key = tuple(sorted((m1.spatial, m2.spatial)))
        dist[key] = dist.get(key, 0.0) + abs(amp) ** 2
    return dist


def analyze_mode1(state: TwoPhotonState, phi: PureState) -> tuple[float, float]:
    """Coincidence probabilities behind the mode-1 analyzer.

    Returns (p_A1A2, p_A2B) conditioned on the given state: the first is a
    two-photon event split across the transmitted-arm detectors, the second
    pairs a transmitted photon on A2 with a reflected one on B.
    """
    support = state.spatial_support()
    if support != {OUT_1}:
        raise ValueError(f"analyzer expects a state entirely in out_1, found {sorted(support)}")
    routed = state.apply_mode_map(_analyzer_map(phi))
    dist = _spatial_pair_probabilities(routed)
    return dist.get((DET_A1, DET_A2), 0.0), dist.get((DET_A2, DET_B), 0.0)


def detection_pattern_distribution(phi: PureState, v: float,
                                   ancilla: AncillaSpec = "mixed_HV") -> dict[tuple[str, str], float]:
    """Full outcome distribution per generated pair, without post-selection.

    Photons leaving through out_2 are not analyzed and keep their spatial
    tag; every two-photon event lands in exactly one spatial pattern, so the
    probabilities sum to one.  This is what Monte Carlo trials sample from.
    """
    dist: dict[tuple[str, str], float] = {}
    for weight, member in prepare_input(phi, ancilla, v):
        routed = beamsplitter(member).apply_mode_map(_analyzer_map(phi))
        for key, p in _spatial_pair_probabilities(routed).items():
            dist[key] = dist.get(key, 0.0) + weight * p
    return dict(sorted(dist.items()))


def exact_coincidence_probabilities(phi: PureState, v: float,
                                    ancilla: AncillaSpec = "mixed_HV") -> tuple[float, float]:
    """Unconditional (p_A1A2, p_A2B) per generated pair via the literal
    prepare -> beamsplitter -> postselect -> analyze pipeline."""
    p_a1a2 = p_a2b = 0.0
    for weight, member in prepare_input(phi, ancilla, v):
        selected, p_post = postselect_double_out1(beamsplitter(member))
        cond_a1a2, cond_a2b = analyze_mode1(selected, phi)
        p_a1a2 += weight * p_post * cond_a1a2
        p_a2b += weight * p_post * cond_a2b
    return p_a1a2, p_a2b


def polarization_density_matrix(members: Iterable[tuple[float, TwoPhotonState]]) -> DensityMatrix:
    """Two-qubit polarization state of a photon pair sharing one spatial mode.

    Each member state is rewritten as a first-quantized symmetric
    wavefunction over (polarization x temporal) pairs; tracing out the
    temporal labels leaves a swap-symmetric two-qubit density matrix, which
    is mixed over the ensemble weights.  Labels (S, A) line up with the
    protocol-level clone pair.
    """
    pol_index = {_POL_H: 0, _POL_V: 1}
    temp_index = {MATCHED: 0, ORTHOGONAL: 1}
    total = np.zeros((4, 4), dtype=complex)
    total_weight = 0.0
    for weight, state in members:
        spatials = state.spatial_support()
        if len(spatials) != 1:
            raise ValueError(f"need a single shared spatial mode, found {sorted(spatials)}")
        modes, c = state._coefficient_matrix()
        psi = np.zeros((2, 2, 2, 2), dtype=complex)  # axes: pol1, temp1, pol2, temp2
        for i, m1 in enumerate(modes):
            for j, m2 in enumerate(modes):
                psi[pol_index[m1.pol], temp_index[m1.temporal],
                    pol_index[m2.pol], temp_index[m2.temporal]] = c[i, j]
        psi /= np.linalg.norm(psi)
        rho_pol = np.einsum("aibj,cidj->abcd", psi, psi.conj()).reshape(4, 4)
        total += weight * rho_pol
        total_weight += weight
    if total_weight <= 0:
        raise ValueError("ensemble weights must have positive total")
    return DensityMatrix((S, A), total / total_weight)


def postselected_clone_state(phi: PureState, v: float,
                             ancilla: AncillaSpec = "mixed_HV") -> tuple[DensityMatrix, float]:
    """Polarization state of the bunched pair in out_1, plus the overall
    post-selection probability.  At v = 1 this reproduces the exact joint
    clone state of the dichotomic protocol."""
    members = []
    p_total = 0.0
    for weight, member in prepare_input(phi, ancilla, v):
        selected, p_post = postselect_double_out1(beamsplitter(member))
        members.append((weight * p_post, selected))
        p_total += weight * p_post
    return polarization_density_matrix(members), p_total


def hom_scan(phi: PureState, z_values: Sequence[float], tau_coh_fs: float = 80.0,
             trials: int | None = None, seed: int = 0) -> list[CoincidenceRecord]:
    """Scan the delay stage and tally both coincidence channels.

    Exact mode (trials=None) fills probabilities only.  Monte Carlo mode
    draws ``trials`` pair generations per stage position from the full
    detection-pattern distribution, using an independent substream of the
    master seed per position so that tallies do not depend on evaluation
    order.
    """
    z_values = list(z_values)
    if not z_values:
        raise ValueError("need at least one stage position")
    if trials is not None and trials < 1:
        raise ValueError("Monte Carlo mode needs trials >= 1")

    records = []
    for i, z in enumerate(z_values):
        v = visibility_model(z, tau_coh_fs)
        p_a1a2, p_a2b = exact_coincidence_probabilities(phi, v)
        n_a1a2 = n_a2b = 0
        n_trials = 0
        if trials is not None:
            dist = detection_pattern_distribution(phi, v)
            patterns = list(dist)
            pvals = np.clip(np.array([dist[k] for k in patterns]), 0.0, None)
            pvals /= pvals.sum()
            rng = np.random.default_rng([seed, i])
            counts = rng.multinomial(trials, pvals)
            tally = dict(zip(patterns, counts))
            n_a1a2 = int(tally.get((DET_A1, DET_A2), 0))
            n_a2b = int(tally.get((DET_A2, DET_B), 0))
            n_trials = trials
        records.append(CoincidenceRecord(float(z), v, p_a1a2, p_a2b, n_a1a2, n_a2b, n_trials))
    return records


def baseline_record(phi: PureState, tau_coh_fs: float = 80.0,
                    trials: int | None = None, seed: int = 0) -> CoincidenceRecord:
    """Cloning-machine-off reference: the stage parked far outside the
    coherence length, where the overlap underflows to exactly zero."""
    z_far = far_baseline_z(tau_coh_fs)
    # substream index chosen away from scan indices so a scan plus its
    # baseline never share a stream
    record = hom_scan(phi, [z_far], tau_coh_fs, trials, seed=seed ^ 0x0BA5E)[0]
    return record


def extract_R(record_peak: CoincidenceRecord, record_baseline: CoincidenceRecord) -> float:
    """Peak-to-baseline enhancement of the A1/A2 coincidence channel.

    Uses Monte Carlo counts when both records carry trials, exact
    probabilities otherwise.
    """
    if record_peak.trials > 0 and record_baseline.trials > 0:
        if record_baseline.n_A1A2 == 0:
            raise ValueError("baseline has zero A1/A2 counts; cannot form a ratio")
        return (record_peak.n_A1A2 / record_peak.trials) / (
            record_baseline.n_A1A2 / record_baseline.trials)
    if record_baseline.p_A1A2 <= 0.0:
        raise ValueError("baseline A1/A2 probability is zero; cannot form a ratio")
    return record_peak.p_A1A2 / record_baseline.p_A1A2


def fidelity_from_R(r: float) -> float:
    """Cloning fidelity from the enhancement ratio: F = (2R + 1)/(2R + 2)."""
    if r < 1.0:
        raise ValueError(f"enhancement ratio {r} below the classical floor of 1; "
                         "check the peak/baseline records")
    return (2.0 * r + 1.0) / (2.0 * r + 2.0)
