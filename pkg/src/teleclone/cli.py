"""Command-line harness.

Four commands: ``teleport`` (four-branch Bell protocol table), ``clone``
(clone / flipped-state fidelities for either dichotomic variant),
``hom-scan`` (delay scan of the two-photon experiment, exact or Monte
Carlo, optionally rendering a figure next to the CSV), and ``selftest``
(the full invariant suite).

Output is CSV on stdout or into ``--out``, preceded by '#' provenance
comment lines carrying the exact invocation, the resolved configuration,
the seed and the generator name, and followed by '#' summary lines.  Given
the same invocation the bytes are identical run to run.  Numeric fields are
fixed-notation with 12 decimal places so they reparse losslessly at the
tolerances the tables are meant to support.
"""

from __future__ import annotations

import argparse
import math
import shlex
import sys
from dataclasses import dataclass

import numpy as np

from . import photonics, protocols, selftest
from .qcore import A, B, S, DensityMatrix, PureState, fidelity, orthogonal_qubit, pauli

PROG = "teleclone"
GENERATOR_NAME = "numpy-pcg64"

_FLOAT_FMT = "{:.12f}"


@dataclass(frozen=True)
class StateSpec:
    """A parsed --state value, keeping the original text for provenance."""

    text: str
    state: PureState


_ALIAS_AMPLITUDES = {
    "H": (1.0, 0.0),
    "V": (0.0, 1.0),
    "+": (1.0 / math.sqrt(2), 1.0 / math.sqrt(2)),
    "-": (1.0 / math.sqrt(2), -1.0 / math.sqrt(2)),
    "R": (1.0 / math.sqrt(2), 1j / math.sqrt(2)),
    "L": (1.0 / math.sqrt(2), -1j / math.sqrt(2)),
}


def parse_state(text: str) -> StateSpec:
    """Parse H, V, +, -, R, L or Bloch angles 'theta=<deg>,phi=<deg>'."""
    token = text.strip()
    if token in _ALIAS_AMPLITUDES:
        return StateSpec(token, PureState((S,), _ALIAS_AMPLITUDES[token]))
    if token.startswith("theta="):
        try:
            fields = dict(part.split("=", 1) for part in token.split(","))
            theta = math.radians(float(fields["theta"]))
            phi = math.radians(float(fields["phi"]))
        except (KeyError, ValueError) as exc:
            raise ValueError(f"bad Bloch-angle state spec {text!r}: {exc}") from None
        amps = (math.cos(theta / 2.0), np.exp(1j * phi) * math.sin(theta / 2.0))
        return StateSpec(token, PureState((S,), amps))
    raise ValueError(f"unrecognized state spec {text!r} "
                     "(expected H, V, +, -, R, L or theta=<deg>,phi=<deg>)")


def _state_spec_arg(text: str) -> StateSpec:
    try:
        return parse_state(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _fmt(x: float) -> str:
    return _FLOAT_FMT.format(x)


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--state", type=_state_spec_arg, default="H",
                        help="input qubit: H, V, +, -, R, L or theta=<deg>,phi=<deg>")
    shared.add_argument("--variant", choices=("psi_minus", "phi_plus"), default="psi_minus",
                        help="which Bell state the dichotomic measurement identifies")
    shared.add_argument("--mode", choices=("exact", "monte-carlo", "monte_carlo"),
                        default="exact", help="exact probabilities or sampled counts")
    shared.add_argument("--trials", type=int, default=100000,
                        help="pair generations per stage position in Monte Carlo mode")
    shared.add_argument("--seed", type=int, default=42, help="master RNG seed")
    shared.add_argument("--z-min", type=float, default=-120.0, help="scan start, micrometers")
    shared.add_argument("--z-max", type=float, default=120.0, help="scan end, micrometers")
    shared.add_argument("--steps", type=int, default=49, help="number of scan positions")
    shared.add_argument("--tau-coh", type=float, default=80.0,
                        help="photon coherence time, femtoseconds")
    shared.add_argument("--out", default=None, help="CSV/report destination (default stdout)")
    shared.add_argument("--config", default=None,
                        help="key=value file supplying flag defaults; flags override")

    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Teleportation-based optimal cloning / universal-NOT simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    teleport = sub.add_parser("teleport", parents=[shared],
                              help="four-branch teleportation table")
    clone = sub.add_parser("clone", parents=[shared],
                           help="clone and flipped-state fidelities")
    scan = sub.add_parser("hom-scan", parents=[shared],
                          help="delay scan of the two-photon experiment")
    scan.add_argument("--plot", default=None,
                      help="also render the scan to this image file")
    selftest_cmd = sub.add_parser("selftest", parents=[shared],
                                  help="run the full invariant suite")
    selftest_cmd.add_argument("--atol", type=float, default=None,
                              help="override every check tolerance (negative-control knob)")
    # config-file defaults must be pushed into each subparser; see _preload_config
    parser.command_parsers = [teleport, clone, scan, selftest_cmd]
    return parser


_CONFIG_KEYS = {
    "state": "state", "variant": "variant", "mode": "mode", "trials": "trials",
    "seed": "seed", "z-min": "z_min", "z_min": "z_min", "z-max": "z_max",
    "z_max": "z_max", "steps": "steps", "tau-coh": "tau_coh", "tau_coh": "tau_coh",
    "out": "out", "plot": "plot", "atol": "atol",
}


def _load_config_defaults(path: str, parser: argparse.ArgumentParser) -> None:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        parser.error(f"argument --config: cannot read {path!r}: {exc}")
    defaults = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            parser.error(f"argument --config: {path}:{lineno}: expected key=value, got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            parser.error(f"argument --config: {path}:{lineno}: unknown key {key!r}")
        defaults[_CONFIG_KEYS[key]] = value
    # string defaults are converted and validated by each flag's type callback;
    # subparsers keep their own default tables, so push into every one
    parser.set_defaults(**defaults)
    for command_parser in getattr(parser, "command_parsers", []):
        command_parser.set_defaults(**defaults)


def _coerce_args(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Normalize values that may arrive as raw strings from config defaults."""
    if isinstance(args.state, str):
        try:
            args.state = parse_state(args.state)
        except ValueError as exc:
            parser.error(f"argument --state: {exc}")
    for name in ("trials", "seed", "steps"):
        setattr(args, name, int(getattr(args, name)))
    for name in ("z_min", "z_max", "tau_coh"):
        setattr(args, name, float(getattr(args, name)))
    args.mode = args.mode.replace("_", "-")


def _provenance_lines(argv: list[str], args: argparse.Namespace, keys: list[str]) -> list[str]:
    resolved = []
    for key in keys:
        value = getattr(args, key)
        if isinstance(value, StateSpec):
            value = value.text
        resolved.append(f"{key}={value}")
    return [
        "# invocation: " + shlex.join([PROG] + argv),
        "# seed: " + str(args.seed),
        "# generator: " + GENERATOR_NAME,
        "# config: " + " ".join(resolved),
    ]


def _run_teleport(args, argv) -> str:
    phi = args.state.state
    outcomes = protocols.standard_teleport(phi)
    target = PureState((B,), phi.amplitudes)
    lines = _provenance_lines(argv, args, ["state"])
    lines.append("bell_outcome,probability,corrected_fidelity,uncorrected_fidelity")
    mixture = np.zeros((2, 2), dtype=complex)
    for o in outcomes:
        mixture += o.probability * o.uncorrected.matrix
        lines.append(",".join([
            o.bell_result.value, _fmt(o.probability),
            _fmt(fidelity(o.bob_state, target)),
            _fmt(fidelity(o.uncorrected, target)),
        ]))
    mixture_fid = fidelity(DensityMatrix((B,), mixture), target)
    lines.append("# uncorrected_mixture_fidelity = " + _fmt(mixture_fid))
    return "\n".join(lines) + "\n"


def _run_clone(args, argv) -> str:
    phi = args.state.state
    if args.variant == "psi_minus":
        result = protocols.modified_protocol(phi)
        target_s = target_a = phi
        target_b = orthogonal_qubit(phi)
    else:
        # the phi_plus projection is the singlet one rotated by sigma_y on
        # wire A, so the rotation shows up on the A clone and on B only
        result = protocols.transpose_variant(phi)
        y = pauli("Y")
        target_s = phi
        target_a = PureState((S,), y @ phi.amplitudes)
        target_b = PureState((S,), y @ orthogonal_qubit(phi).amplitudes)

    rows = [
        ("p_singlet", result.p_singlet),
        ("p_complement", result.p_complement),
        ("F_clone_S", fidelity(result.rho_s, PureState((S,), target_s.amplitudes))),
        ("F_clone_A", fidelity(result.rho_a, PureState((A,), target_a.amplitudes))),
        ("F_unot_B", fidelity(result.rho_b, PureState((B,), target_b.amplitudes))),
    ]
    lines = _provenance_lines(argv, args, ["state", "variant"])
    lines.append("quantity,value")
    lines.extend(f"{name},{_fmt(value)}" for name, value in rows)
    lines.append("# variant = " + args.variant)
    if args.variant == "phi_plus":
        lines.append("# targets: S clone vs input, A clone and B vs their sigma_y rotations")
    return "\n".join(lines) + "\n"


def _run_hom_scan(args, argv) -> tuple[str, list, photonics.CoincidenceRecord]:
    if args.steps < 2:
        raise ValueError("argument --steps: a scan needs at least 2 positions")
    if not args.z_min < args.z_max:
        raise ValueError("argument --z-min: scan bounds need z_min < z_max")
    if args.tau_coh <= 0:
        raise ValueError("argument --tau-coh: coherence time must be positive")
    trials = None
    if args.mode == "monte-carlo":
        if args.trials < 1:
            raise ValueError("argument --trials: Monte Carlo mode needs trials >= 1")
        trials = args.trials

    phi = args.state.state
    z_values = np.linspace(args.z_min, args.z_max, args.steps)
    records = photonics.hom_scan(phi, z_values, args.tau_coh, trials, args.seed)
    baseline = photonics.baseline_record(phi, args.tau_coh, trials, args.seed)
    peak = min(records, key=lambda r: abs(r.z_um))
    ratio = photonics.extract_R(peak, baseline)
    fid = photonics.fidelity_from_R(ratio)

    lines = _provenance_lines(
        argv, args, ["state", "mode", "trials", "seed", "z_min", "z_max", "steps", "tau_coh"])
    lines.append("z_um,visibility,p_A1A2,p_A2B,n_A1A2,n_A2B,trials")
    for r in records:
        lines.append(",".join([
            _fmt(r.z_um), _fmt(r.visibility), _fmt(r.p_A1A2), _fmt(r.p_A2B),
            str(r.n_A1A2), str(r.n_A2B), str(r.trials),
        ]))
    lines.append("# peak_z_um = " + _fmt(peak.z_um))
    lines.append("# baseline_z_um = " + _fmt(baseline.z_um))
    lines.append("# R = " + _fmt(ratio))
    lines.append("# F = " + _fmt(fid))
    return "\n".join(lines) + "\n", records, baseline


def _render_scan_figure(records, baseline, path: str, mode: str) -> None:
    import matplotlib
    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    z = [r.z_um for r in records]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if mode == "monte-carlo":
        ax.plot(z, [r.n_A1A2 / r.trials for r in records], "o", color="C0",
                label="[D_A1, D_A2] counts/trials")
        ax.plot(z, [r.n_A2B / r.trials for r in records], "s", color="C1",
                label="[D_A2, D_B] counts/trials")
    ax.plot(z, [r.p_A1A2 for r in records], "-", color="C0", label="[D_A1, D_A2] exact")
    ax.plot(z, [r.p_A2B for r in records], "-", color="C1", label="[D_A2, D_B] exact")
    ax.axhline(baseline.p_A1A2, color="gray", linestyle=":", linewidth=1,
               label="machine off")
    ax.set_xlabel("stage position z (um)")
    ax.set_ylabel("coincidence probability per pair")
    ax.set_title("Two-photon coincidences vs delay")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _run_selftest(args) -> tuple[str, int]:
    results = selftest.run_all(args.atol)
    lines = []
    failed = 0
    for r in results:
        if r.passed:
            lines.append(f"PASS  {r.name}")
        else:
            failed += 1
            lines.append(f"FAIL  {r.name}  ({r.detail})")
    lines.append(f"selftest: {len(results)} checks, {failed} failed")
    return "\n".join(lines) + "\n", (1 if failed else 0)


def render_command_output(argv: list[str]) -> str:
    """Parse and execute, returning the would-be output text (test hook)."""
    parser = build_parser()
    _preload_config(argv, parser)
    args = parser.parse_args(argv)
    _coerce_args(args, parser)
    if args.command == "teleport":
        return _run_teleport(args, argv)
    if args.command == "clone":
        return _run_clone(args, argv)
    if args.command == "hom-scan":
        return _run_hom_scan(args, argv)[0]
    raise ValueError(f"render_command_output does not support {args.command!r}")


def _preload_config(argv: list[str], parser: argparse.ArgumentParser) -> None:
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif token.startswith("--config="):
            path = token.split("=", 1)[1]
    if path is not None:
        _load_config_defaults(path, parser)


def _emit(text: str, out_path: str | None, echo_comments: bool = True) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    if echo_comments:
        for line in text.splitlines():
            if line.startswith("#"):
                sys.stdout.write(line + "\n")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _preload_config(argv, parser)
    args = parser.parse_args(argv)
    _coerce_args(args, parser)

    try:
        if args.command == "teleport":
            _emit(_run_teleport(args, argv), args.out)
        elif args.command == "clone":
            _emit(_run_clone(args, argv), args.out)
        elif args.command == "hom-scan":
            text, records, baseline = _run_hom_scan(args, argv)
            _emit(text, args.out)
            if args.plot:
                _render_scan_figure(records, baseline, args.plot, args.mode)
        elif args.command == "selftest":
            report, status = _run_selftest(args)
            _emit(report, args.out, echo_comments=False)
            return status
    except ValueError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
