"""Executable invariant suite.

Every property the package promises, phrased as a deterministic check that
returns quietly or reports a residual.  The CLI's ``selftest`` command runs
the whole list; the pytest suite reuses individual checks.  Passing an
explicit ``atol`` overrides each check's own tolerance, which is also the
negative-control knob: at 1e-20 the normalization checks must fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import photonics, protocols, qmath
from .qcore import (
    A, B, S, BellState, DensityMatrix, PureState, apply_channel, bell_state,
    complement_projector, fidelity, orthogonal_qubit, pauli, standard_channels,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


def _rng(tag: int) -> np.random.Generator:
    return np.random.default_rng([0xC0FFEE, tag])


def _random_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def _random_density(rng, n=2) -> np.ndarray:
    m = _random_matrix(rng, n)
    rho = m @ m.conj().T
    return rho / np.trace(rho)


def _random_su2(rng) -> np.ndarray:
    """Haar-random 2x2 unitary via normalized quaternion."""
    q = rng.standard_normal(4)
    a, b, c, d = q / np.linalg.norm(q)
    return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])


def _fail_if(residual: float, tol: float) -> Optional[str]:
    if residual > tol:
        return f"residual {residual:.3e} exceeds tolerance {tol:.1e}"
    return None


# ---------------------------------------------------------------------------
# individual checks; each takes the tolerance it compares against
# ---------------------------------------------------------------------------

def check_tensor_associativity(tol):
    rng = _rng(1)
    worst = 0.0
    for _ in range(20):
        a, b, c = (_random_matrix(rng, 2) for _ in range(3))
        worst = max(worst, qmath.frobenius_distance(
            qmath.tensor(qmath.tensor(a, b), c), qmath.tensor(a, qmath.tensor(b, c))))
    return _fail_if(worst, tol)


def check_partial_trace_of_product(tol):
    rng = _rng(2)
    worst = 0.0
    for _ in range(20):
        a, b = _random_matrix(rng, 2), _random_matrix(rng, 2)
        got = qmath.partial_trace(qmath.tensor(a, b), ["X", "Y"], {"Y"})
        worst = max(worst, qmath.frobenius_distance(got, a * np.trace(b)))
    return _fail_if(worst, tol)


def check_partial_trace_preserves_trace(tol):
    rng = _rng(3)
    worst = 0.0
    for _ in range(20):
        m = _random_matrix(rng, 8)
        reduced = qmath.partial_trace(m, ["S", "A", "B"], {"A"})
        worst = max(worst, abs(qmath.trace(reduced) - qmath.trace(m)))
    return _fail_if(worst, tol)


def check_dagger_antihomomorphism(tol):
    rng = _rng(4)
    worst = 0.0
    for _ in range(20):
        a, b = _random_matrix(rng, 4), _random_matrix(rng, 4)
        worst = max(worst, qmath.frobenius_distance(
            qmath.dagger(qmath.matmul(a, b)),
            qmath.matmul(qmath.dagger(b), qmath.dagger(a))))
    return _fail_if(worst, tol)


def check_pauli_y_product(tol):
    expected = -1j * (pauli("Z") @ pauli("X"))
    return _fail_if(qmath.frobenius_distance(pauli("Y"), expected), tol)


def check_bell_orthonormality(tol):
    worst = 0.0
    states = {tag: bell_state(tag, (S, A)) for tag in BellState}
    for t1, s1 in states.items():
        for t2, s2 in states.items():
            expected = 1.0 if t1 is t2 else 0.0
            worst = max(worst, abs(abs(s1.overlap(s2)) - expected))
    return _fail_if(worst, tol)


def check_unot_twirl_identity(tol):
    """Universal NOT equals (2 tr(rho) I - rho)/3 on Hermitian inputs."""
    rng = _rng(5)
    unot = standard_channels()["universal_not"]
    worst = 0.0
    for _ in range(20):
        rho = _random_density(rng)
        out = apply_channel(unot, DensityMatrix((S,), rho))
        expected = (2.0 * np.trace(rho) * np.eye(2) - rho) / 3.0
        worst = max(worst, qmath.frobenius_distance(out.matrix, expected))
    return _fail_if(worst, tol)


def check_unot_universal_fidelity(tol):
    rng = _rng(6)
    unot = standard_channels()["universal_not"]
    worst = 0.0
    for _ in range(50):
        phi = protocols.haar_random_qubit(rng)
        out = apply_channel(unot, phi.density())
        worst = max(worst, abs(fidelity(out, orthogonal_qubit(phi)) - 2.0 / 3.0))
    return _fail_if(worst, tol)


def check_depolarizing_collapses(tol):
    rng = _rng(7)
    dep = standard_channels()["depolarizing"]
    worst = 0.0
    for _ in range(100):
        rho = DensityMatrix((S,), _random_density(rng))
        out = apply_channel(dep, rho)
        worst = max(worst, qmath.frobenius_distance(out.matrix, np.eye(2) / 2.0))
    return _fail_if(worst, tol)


def check_channels_trace_preserving(tol):
    worst = 0.0
    for channel in standard_channels().values():
        total = sum(k.conj().T @ k for k in channel.kraus)
        worst = max(worst, qmath.frobenius_distance(total, np.eye(channel.dim)))
    return _fail_if(worst, tol)


def check_singlet_projector_su2_invariant(tol):
    rng = _rng(8)
    proj = complement_projector(bell_state(BellState.PSI_MINUS, (S, A)), (S, A))
    worst = 0.0
    for _ in range(20):
        u = _random_su2(rng)
        uu = np.kron(u, u)
        worst = max(worst, qmath.frobenius_distance(proj @ uu, uu @ proj))
    return _fail_if(worst, tol)


def check_teleport_identity(tol):
    rng = _rng(9)
    worst = 0.0
    for _ in range(10):
        phi = protocols.haar_random_qubit(rng)
        target = PureState((B,), phi.amplitudes)
        for outcome in protocols.standard_teleport(phi):
            worst = max(worst, abs(outcome.probability - 0.25))
            worst = max(worst, abs(fidelity(outcome.bob_state, target) - 1.0))
    return _fail_if(worst, tol)


def check_uncorrected_mixture_depolarizes(tol):
    rng = _rng(10)
    worst = 0.0
    for _ in range(10):
        phi = protocols.haar_random_qubit(rng)
        mix = sum(o.probability * o.uncorrected.matrix for o in protocols.standard_teleport(phi))
        worst = max(worst, qmath.frobenius_distance(mix, np.eye(2) / 2.0))
    return _fail_if(worst, tol)


def check_branch_probabilities(tol):
    rng = _rng(11)
    worst = 0.0
    for _ in range(50):
        result = protocols.modified_protocol(protocols.haar_random_qubit(rng))
        worst = max(worst, abs(result.p_singlet - 0.25), abs(result.p_complement - 0.75))
    return _fail_if(worst, tol)


def check_clone_universality(tol):
    rng = _rng(12)
    f_clone, f_unot = [], []
    for _ in range(100):
        phi = protocols.haar_random_qubit(rng)
        result = protocols.modified_protocol(phi)
        f_clone.append(fidelity(result.rho_s, phi))
        f_unot.append(fidelity(result.rho_b, PureState((B,), orthogonal_qubit(phi).amplitudes)))
    spread = max(max(f_clone) - min(f_clone), max(f_unot) - min(f_unot))
    err = max(abs(np.mean(f_clone) - 5.0 / 6.0), abs(np.mean(f_unot) - 2.0 / 3.0))
    return _fail_if(max(spread, err), tol)


def check_rho_sa_swap_symmetric(tol):
    rng = _rng(13)
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    worst = 0.0
    for _ in range(20):
        rho = protocols.modified_protocol(protocols.haar_random_qubit(rng)).rho_sa.matrix
        worst = max(worst, qmath.frobenius_distance(swap @ rho @ swap, rho))
    return _fail_if(worst, tol)


def check_unot_mixture_oracle(tol):
    rng = _rng(14)
    worst = 0.0
    for _ in range(50):
        phi = protocols.haar_random_qubit(rng)
        mixture = protocols.unot_as_mixture(phi)
        worst = max(worst, protocols.modified_protocol(phi).rho_b.distance(mixture))
    return _fail_if(worst, tol)


def check_branch_weighted_depolarizing(tol):
    rng = _rng(15)
    worst = 0.0
    for _ in range(20):
        phi = protocols.haar_random_qubit(rng)
        result = protocols.modified_protocol(phi)
        mix = result.p_singlet * result.success_branch.matrix \
            + result.p_complement * result.rho_b.matrix
        worst = max(worst, qmath.frobenius_distance(mix, np.eye(2) / 2.0))
    return _fail_if(worst, tol)


def check_transpose_variant_relations(tol):
    rng = _rng(16)
    y = pauli("Y")
    transpose = standard_channels()["transpose"]
    worst = 0.0
    for _ in range(20):
        phi = protocols.haar_random_qubit(rng)
        res = protocols.transpose_variant(phi)
        plain = protocols.modified_protocol(phi)
        # the sigma_y rotation lands on the A clone only; S keeps plain clones
        worst = max(worst, qmath.frobenius_distance(res.rho_a.matrix, y @ plain.rho_s.matrix @ y))
        worst = max(worst, res.rho_s.distance(plain.rho_s))
        worst = max(worst, res.rho_b.distance(apply_channel(transpose, phi.density())))
    return _fail_if(worst, tol)


def check_mixed_ancilla_matches_protocol(tol):
    rng = _rng(17)
    singlet = bell_state(BellState.PSI_MINUS, (S, A))
    worst = 0.0
    for _ in range(50):
        phi = protocols.haar_random_qubit(rng)
        reduced = protocols.mixed_ancilla_clone(phi)
        full = protocols.modified_protocol(phi)
        worst = max(worst, reduced.rho_sa.distance(full.rho_sa))
        worst = max(worst, abs(reduced.p_success - 0.75))
        worst = max(worst, abs(fidelity(reduced.rho_s, phi) - 5.0 / 6.0))
        antisym = np.vdot(singlet.amplitudes, reduced.rho_sa.matrix @ singlet.amplitudes)
        worst = max(worst, abs(antisym))
    return _fail_if(worst, tol)


def check_beamsplitter_unitarity(tol):
    rng = _rng(18)
    worst = 0.0
    for _ in range(20):
        phi = protocols.haar_random_qubit(rng)
        chi = protocols.haar_random_qubit(rng)
        v = rng.uniform(0.0, 1.0)
        for _, member in photonics.prepare_input(phi, PureState((S,), chi.amplitudes), v):
            out = photonics.beamsplitter(member)
            worst = max(worst, abs(out.total_probability() - member.total_probability()))
    return _fail_if(worst, tol)


def check_photonics_matches_clone_state(tol):
    """Bunched-pair polarization state equals the protocol-level clone state."""
    worst = 0.0
    for amps in ((1, 0), (1 / math.sqrt(2), 1 / math.sqrt(2)), (1 / math.sqrt(2), 1j / math.sqrt(2))):
        phi = PureState((S,), amps)
        rho, _ = photonics.postselected_clone_state(phi, v=1.0)
        worst = max(worst, rho.distance(protocols.modified_protocol(phi).rho_sa))
    return _fail_if(worst, tol)


def check_marginal_fidelity_limits(tol):
    rng = _rng(19)
    worst = 0.0
    for _ in range(10):
        phi = protocols.haar_random_qubit(rng)
        rho_on, _ = photonics.postselected_clone_state(phi, v=1.0)
        rho_off, _ = photonics.postselected_clone_state(phi, v=0.0)
        worst = max(worst, abs(fidelity(rho_on.partial_trace({A}), phi) - 5.0 / 6.0))
        worst = max(worst, abs(fidelity(rho_off.partial_trace({A}), phi) - 3.0 / 4.0))
    return _fail_if(worst, tol)


def check_a2b_channel_flat(tol):
    phi = PureState((S,), (1, 0))
    records = photonics.hom_scan(phi, np.linspace(-120.0, 120.0, 25))
    values = [r.p_A2B for r in records]
    return _fail_if(max(values) - min(values), tol)


def check_enhancement_ratio(tol):
    phi = PureState((S,), (1 / math.sqrt(2), 1 / math.sqrt(2)))
    peak = photonics.hom_scan(phi, [0.0])[0]
    base = photonics.baseline_record(phi)
    r = photonics.extract_R(peak, base)
    f = photonics.fidelity_from_R(r)
    return _fail_if(max(abs(r - 2.0), abs(f - 5.0 / 6.0)), tol)


def check_enhancement_linear_in_visibility(tol):
    """Exact engine: R(v) = 1 + v across the scan range."""
    phi = PureState((S,), (1, 0))
    base = photonics.baseline_record(phi)
    worst = 0.0
    for v in (0.2, 0.5, 0.8):
        z = 2.0 * photonics.SPEED_OF_LIGHT_UM_PER_FS * 80.0 * math.sqrt(-math.log(v))
        record = photonics.hom_scan(phi, [z], tau_coh_fs=80.0)[0]
        worst = max(worst, abs(photonics.extract_R(record, base) - (1.0 + record.visibility)))
    return _fail_if(worst, tol)


def check_monte_carlo_unbiased(tol):
    """Mean count rate over 30 seeds within 3 sigma of the exact value per z."""
    del tol  # statistical bound, not a numerical tolerance
    phi = PureState((S,), (1, 0))
    trials, seeds = 20000, 30
    for z in (0.0, 12.0, 30.0, 120.0):
        exact = photonics.hom_scan(phi, [z])[0]
        for attr_p, attr_n in (("p_A1A2", "n_A1A2"), ("p_A2B", "n_A2B")):
            p = getattr(exact, attr_p)
            rates = []
            for seed in range(seeds):
                rec = photonics.hom_scan(phi, [z], trials=trials, seed=seed)[0]
                rates.append(getattr(rec, attr_n) / trials)
            sigma_mean = math.sqrt(p * (1.0 - p) / (trials * seeds))
            if abs(np.mean(rates) - p) > 3.0 * sigma_mean:
                return (f"mean rate {np.mean(rates):.6f} vs exact {p:.6f} "
                        f"outside 3 sigma at z={z}")
    return None


def check_csv_determinism(tol):
    del tol
    from . import cli
    argv = ["hom-scan", "--state", "H", "--mode", "monte-carlo",
            "--trials", "2000", "--seed", "7", "--steps", "9",
            "--z-min", "-60", "--z-max", "60"]
    first = cli.render_command_output(argv)
    second = cli.render_command_output(argv)
    if first != second:
        return "repeated renders differ byte-for-byte"
    return None


def check_csv_roundtrip(tol):
    from . import cli
    text = cli.render_command_output(["hom-scan", "--state", "H", "--steps", "9",
                                      "--z-min", "-60", "--z-max", "60"])
    rows = [line.split(",") for line in text.splitlines()
            if line and not line.startswith("#")]
    header, data = rows[0], rows[1:]
    col = header.index("p_A1A2")
    phi = PureState((S,), (1, 0))
    worst = 0.0
    for row in data:
        z = float(row[0])
        exact = photonics.exact_coincidence_probabilities(phi, photonics.visibility_model(z, 80.0))[0]
        worst = max(worst, abs(float(row[col]) - exact))
    # fixed 12-decimal formatting bounds the reparse error
    return _fail_if(worst, max(tol, 5e-13))


def check_state_spec_parsing(tol):
    from . import cli
    expected = {
        "H": (1, 0), "V": (0, 1),
        "+": (1 / math.sqrt(2), 1 / math.sqrt(2)),
        "-": (1 / math.sqrt(2), -1 / math.sqrt(2)),
        "R": (1 / math.sqrt(2), 1j / math.sqrt(2)),
        "L": (1 / math.sqrt(2), -1j / math.sqrt(2)),
    }
    worst = 0.0
    for text, amps in expected.items():
        got = cli.parse_state(text).state
        worst = max(worst, float(np.linalg.norm(got.amplitudes - np.asarray(amps, complex))))
    got = cli.parse_state("theta=90,phi=0").state
    worst = max(worst, float(np.linalg.norm(
        got.amplitudes - np.array([1, 1], complex) / math.sqrt(2))))
    return _fail_if(worst, tol)


# (name, check, default tolerance); the explicit atol argument of run_all
# overrides the default uniformly.
CHECKS: list[tuple[str, Callable[[float], Optional[str]], float]] = [
    ("qmath.tensor_associativity", check_tensor_associativity, 1e-10),
    ("qmath.partial_trace_of_product", check_partial_trace_of_product, 1e-10),
    ("qmath.partial_trace_preserves_trace", check_partial_trace_preserves_trace, 1e-12),
    ("qmath.dagger_antihomomorphism", check_dagger_antihomomorphism, 1e-10),
    ("qcore.pauli_y_product", check_pauli_y_product, 1e-12),
    ("qcore.bell_orthonormality", check_bell_orthonormality, 1e-12),
    ("qcore.unot_twirl_identity", check_unot_twirl_identity, 1e-12),
    ("qcore.unot_universal_fidelity", check_unot_universal_fidelity, 1e-12),
    ("qcore.depolarizing_collapses", check_depolarizing_collapses, 1e-12),
    ("qcore.channels_trace_preserving", check_channels_trace_preserving, 1e-10),
    ("qcore.singlet_projector_su2_invariant", check_singlet_projector_su2_invariant, 1e-10),
    ("protocols.teleport_identity", check_teleport_identity, 1e-12),
    ("protocols.uncorrected_mixture_depolarizes", check_uncorrected_mixture_depolarizes, 1e-12),
    ("protocols.branch_probabilities", check_branch_probabilities, 1e-12),
    ("protocols.clone_universality", check_clone_universality, 1e-12),
    ("protocols.rho_sa_swap_symmetric", check_rho_sa_swap_symmetric, 1e-12),
    ("protocols.unot_mixture_oracle", check_unot_mixture_oracle, 1e-12),
    ("protocols.branch_weighted_depolarizing", check_branch_weighted_depolarizing, 1e-12),
    ("protocols.transpose_variant_relations", check_transpose_variant_relations, 1e-12),
    ("protocols.mixed_ancilla_matches_protocol", check_mixed_ancilla_matches_protocol, 1e-12),
    ("photonics.beamsplitter_unitarity", check_beamsplitter_unitarity, 1e-10),
    ("photonics.matches_clone_state", check_photonics_matches_clone_state, 1e-10),
    ("photonics.marginal_fidelity_limits", check_marginal_fidelity_limits, 1e-10),
    ("photonics.a2b_channel_flat", check_a2b_channel_flat, 1e-12),
    ("photonics.enhancement_ratio", check_enhancement_ratio, 1e-10),
    ("photonics.enhancement_linear_in_visibility", check_enhancement_linear_in_visibility, 1e-10),
    ("photonics.monte_carlo_unbiased", check_monte_carlo_unbiased, 0.0),
    ("cli.csv_determinism", check_csv_determinism, 0.0),
    ("cli.csv_roundtrip", check_csv_roundtrip, 5e-13),
    ("cli.state_spec_parsing", check_state_spec_parsing, 1e-12),
]


def run_all(atol: float | None = None) -> list[CheckResult]:
    results = []
    for name, fn, default in CHECKS:
        tol = default if atol is None else atol
        try:
            detail = fn(tol)
        except Exception as exc:  # a crash is a failed check, not a crashed suite
            detail = f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, detail is None, detail or ""))
    return results
