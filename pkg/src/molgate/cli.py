"""Command-line front end.

Subcommands
-----------
feasibility  separation window, decay rates and gate budget per species
gate         simulate encode / wait / decode and print a JSON report
sweep        gate duration and robustness versus lattice wavelength (CSV)
bell         CHSH value at canonical axes and the maximal CHSH value (JSON)
density      angular probability density |psi(theta1, theta2)|^2 on a grid (CSV)

Exit codes: 0 success, 2 bad input (unknown species, parse errors, invalid
ranges), 3 dipole coupling outside the perturbative regime, 4 too much
population outside the storage qubits. Data goes to stdout (or ``--output``),
diagnostics to stderr.

Scenario file (TOML, UTF-8) for ``gate`` and ``bell``::

    molecule = "NaCs"             # or an inline table:
    # [molecule]
    # name = "X"; b_rot_cm1 = ...; mu_debye = ...; omega_vib_cm1 = ...
    r_nm = 300.0                  # exactly one of r_nm, lambda_nm (r = lambda / 2)
    wait = "1tau"                 # seconds, or a multiple of the gate time: "0.5tau"
    mode = "ideal"                # or "rwa" (then pulse_durations_s is required)
    input = "++product"           # "00", "01", "10", "11", "++product"
    # coefficients = [[1, 1], [1, "1j"]]   # product state (a0|0>+a1|1>)(b0|0>+b1|1>)
    n_max = 4
    strictness = 10.0
    target_phase = 3.141592653589793
    pulse_phases = [0.0, 0.0]
    pulse_durations_s = [1e-6, 1e-6]
    pulse_detunings_rad_s = [0.0, 0.0]
    output = "report.json"

Command-line flags override the file.
"""

import argparse
import csv
from dataclasses import dataclass, field
import io
import json
import math
import re
import sys

import numpy as np

from .entangle import (
    MAX_LEAKAGE,
    MeasurementAxes,
    chsh_optimize,
    chsh_value,
    concurrence,
    density_matrix,
    reduce_to_qubits,
    strip_local_phases,
)
from .errors import MolgateError, PerturbationRegimeError, RegistryParseError, RegistryValidationError, SubspaceError
from .feasibility import DEFAULT_RATIO, feasibility_table, sweep
from .gate import gate_duration, run_gate
from .molecules import MoleculeParams, builtin_registry, load_registry, merge_registries
from .pairsys import PairBasis, PairState, angular_density, storage_indices
from .rotor import LevelLabel
from .units import CONSTANTS, NM

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_INPUT, EXIT_REGIME, EXIT_LEAKAGE = 0, 2, 3, 4

_LENGTH_UNITS = {"nm": NM, "m": 1.0, "um": 1e-6, "bohr": CONSTANTS.bohr, "au": CONSTANTS.bohr}
_TIME_UNITS = {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15}
_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"

SQ2 = 1 / math.sqrt(2)
NAMED_QUBIT_STATES = {
    "00": [1, 0, 0, 0],
    "01": [0, 1, 0, 0],
    "10": [0, 0, 1, 0],
    "11": [0, 0, 0, 1],
    "++product": [0.5, 0.5, 0.5, 0.5],
    "bell": [SQ2, 0, 0, SQ2],
    "phi-": [SQ2, 0, 0, -SQ2],
    "psi+": [0, SQ2, SQ2, 0],
    "psi-": [0, SQ2, -SQ2, 0],
}
GATE_INPUTS = ("00", "01", "10", "11", "++product")


class InputError(MolgateError):
    """Bad command-line or scenario input; maps to exit code 2."""


def parse_length(text):
    """'300nm', '7.03 au', '3e-7m' -> metres. A bare number is read as nm."""
    m = re.fullmatch(rf"\s*({_NUM})\s*([a-zA-Z]*)\s*", str(text))
    if not m:
        raise InputError(f"cannot parse length {text!r}")
    unit = m.group(2).lower() or "nm"
    if unit not in _LENGTH_UNITS:
        raise InputError(f"unknown length unit {unit!r} (use {', '.join(_LENGTH_UNITS)})")
    value = float(m.group(1)) * _LENGTH_UNITS[unit]
    if value <= 0:
        raise InputError("length must be positive")
    return value


def parse_wait(text):
    """Seconds (number or with a time unit) or ``'<x>tau'``.

    Returns ``(seconds, None)`` or ``(None, multiple_of_tau)``.
    """
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        if text < 0:
            raise InputError("wait time must be non-negative")
        return float(text), None
    s = str(text).strip().lower()
    m = re.fullmatch(rf"({_NUM})?\s*\*?\s*tau", s)
    if m:
        mult = float(m.group(1)) if m.group(1) else 1.0
        if mult < 0:
            raise InputError("wait time must be non-negative")
        return None, mult
    m = re.fullmatch(rf"({_NUM})\s*([a-z]*)", s)
    if not m or (m.group(2) or "s") not in _TIME_UNITS:
        raise InputError(f"cannot parse wait time {text!r}")
    value = float(m.group(1)) * _TIME_UNITS[m.group(2) or "s"]
    if value < 0:
        raise InputError("wait time must be non-negative")
    return value, None


def _coef(x):
    if isinstance(x, str):
        try:
            return complex(x.replace(" ", ""))
        except ValueError:
            raise InputError(f"cannot parse coefficient {x!r}") from None
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise InputError(f"coefficient {x!r} is not a number")
    return complex(x)


def parse_coefficients(spec):
    """'a0,a1;b0,b1' or [[a0, a1], [b0, b1]] -> normalized four qubit amplitudes."""
    if isinstance(spec, str):
        parts = [p.split(",") for p in spec.split(";")]
    else:
        parts = spec
    if len(parts) != 2 or any(len(p) != 2 for p in parts):
        raise InputError("coefficients need two molecules with two amplitudes each")
    a = np.array([_coef(x) for x in parts[0]])
    b = np.array([_coef(x) for x in parts[1]])
    if np.linalg.norm(a) == 0 or np.linalg.norm(b) == 0:
        raise InputError("single-molecule coefficients cannot vanish")
    return np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))


def qubit_amplitudes(name):
    try:
        return np.array(NAMED_QUBIT_STATES[name], dtype=complex)
    except KeyError:
        raise InputError(f"unknown state {name!r} (use {', '.join(NAMED_QUBIT_STATES)})") from None


@dataclass
class ScenarioConfig:
    """Everything a gate run needs; see the module docstring for the file schema."""

    molecule: str | None = None
    inline_molecule: MoleculeParams | None = None
    r: float | None = None  # m
    lambda_: float | None = None  # m
    wait: float | None = None  # s
    wait_tau: float | None = 1.0
    mode: str = "ideal"
    input: str = "++product"
    coefficients: np.ndarray | None = None
    n_max: int = 4
    strictness: float = 10.0
    target_phase: float = math.pi
    pulse_phases: tuple = (0.0, 0.0)
    pulse_durations: tuple = (None, None)
    pulse_detunings: tuple = (0.0, 0.0)
    output: str | None = field(default=None)

    KEYS = ("molecule", "r_nm", "lambda_nm", "wait", "mode", "input", "coefficients", "n_max", "strictness",
            "target_phase", "pulse_phases", "pulse_durations_s", "pulse_detunings_rad_s", "output")

    @classmethod
    def from_toml(cls, text):
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise InputError(f"malformed scenario file: {exc}") from None
        unknown = sorted(set(doc) - set(cls.KEYS))
        if unknown:
            raise InputError(f"unknown scenario key {unknown[0]!r}")
        cfg = cls()
        mol = doc.get("molecule")
        if isinstance(mol, dict):
            try:
                cfg.inline_molecule = MoleculeParams(
                    name=mol.get("name", "custom"), b_rot=mol.get("b_rot_cm1"), mu=mol.get("mu_debye"),
                    omega_vib=mol.get("omega_vib_cm1"),
                )
            except RegistryValidationError as exc:
                raise InputError(f"scenario molecule: {exc}") from None
        elif mol is not None:
            cfg.molecule = str(mol)
        if "r_nm" in doc:
            cfg.r = float(doc["r_nm"]) * NM
        if "lambda_nm" in doc:
            cfg.lambda_ = float(doc["lambda_nm"]) * NM
        if "wait" in doc:
            cfg.wait, cfg.wait_tau = parse_wait(doc["wait"])
        for key in ("mode", "input", "output"):
            if key in doc:
                setattr(cfg, key, str(doc[key]))
        if "coefficients" in doc:
            cfg.coefficients = parse_coefficients(doc["coefficients"])
        if "n_max" in doc:
            cfg.n_max = int(doc["n_max"])
        for key in ("strictness", "target_phase"):
            if key in doc:
                setattr(cfg, key, float(doc[key]))
        for key, attr in (("pulse_phases", "pulse_phases"), ("pulse_durations_s", "pulse_durations"),
                          ("pulse_detunings_rad_s", "pulse_detunings")):
            if key in doc:
                val = doc[key]
                if not isinstance(val, list) or len(val) != 2:
                    raise InputError(f"{key} needs two entries")
                setattr(cfg, attr, tuple(float(v) for v in val))
        return cfg

    def update_from_args(self, args):
        if getattr(args, "molecule", None):
            self.molecule, self.inline_molecule = args.molecule, None
        if getattr(args, "r", None) is not None:
            self.r, self.lambda_ = parse_length(args.r), None
        if getattr(args, "lambda_", None) is not None:
            self.lambda_, self.r = parse_length(args.lambda_), None
        if getattr(args, "wait", None) is not None:
            self.wait, self.wait_tau = parse_wait(args.wait)
        if getattr(args, "mode", None):
            self.mode = args.mode
        if getattr(args, "input", None):
            self.input, self.coefficients = args.input, None
        if getattr(args, "coefficients", None):
            self.coefficients = parse_coefficients(args.coefficients)
        for name in ("n_max", "strictness", "target_phase", "output"):
            value = getattr(args, name, None)
            if value is not None:
                setattr(self, name, value)
        if getattr(args, "pulse_duration", None) is not None:
            self.pulse_durations = (args.pulse_duration, args.pulse_duration)
        return self

    def validate(self):
        if (self.r is None) == (self.lambda_ is None):
            raise InputError("give exactly one of r and lambda")
        if self.molecule is None and self.inline_molecule is None:
            raise InputError("no molecule given")
        if self.mode not in ("ideal", "rwa"):
            raise InputError(f"unknown pulse mode {self.mode!r}")
        if self.coefficients is None and self.input not in GATE_INPUTS:
            raise InputError(f"unknown input state {self.input!r} (use {', '.join(GATE_INPUTS)})")
        if self.mode == "rwa" and None in self.pulse_durations:
            raise InputError("rwa mode needs pulse durations")
        return self

    @property
    def separation(self):
        return self.r if self.r is not None else self.lambda_ / 2

    def amplitudes(self):
        if self.coefficients is not None:
            return np.asarray(self.coefficients, dtype=complex)
        return qubit_amplitudes(self.input)

    def params(self, registry):
        if self.inline_molecule is not None:
            return self.inline_molecule
        return find_species(registry, self.molecule)


def find_species(registry, name):
    try:
        return registry[name]
    except KeyError:
        raise InputError(f"unknown species {name!r}; known: {', '.join(sorted(registry))}") from None


def load_registries(paths):
    regs = [builtin_registry()]
    for path in paths or ():
        try:
            with open(path, encoding="utf-8") as fh:
                regs.append(load_registry(fh.read()))
        except OSError as exc:
            raise InputError(f"cannot read registry {path}: {exc.strerror}") from None
        except (RegistryParseError, RegistryValidationError) as exc:
            raise InputError(f"{path}: {exc}") from None
    return merge_registries(*regs)


def _fmt(x, spec):
    return "-" if x is None else format(x, spec)


def _write(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote {path}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def cmd_feasibility(args):
    registry = load_registries(args.registry)
    if args.molecule:
        species = [find_species(registry, n) for n in args.molecule]
    else:
        species = [p for p in registry.values() if p.complete or args.include_partial]
    if args.ratio <= 0:
        raise InputError("--ratio must be positive")
    r_design = None if args.r_design is None else parse_length(args.r_design)
    rows = feasibility_table(species, args.ratio, r_design)

    if args.format == "json":
        text = _json([r.to_dict() for r in rows])
    elif args.format == "csv":
        header = list(rows[0].to_dict()) if rows else []
        text = _csv(header, [[("" if v is None else v) for v in r.to_dict().values()] for r in rows])
    else:
        lines = [f"{'species':<8}{'r_min/nm':>10}{'r_max/nm':>10}{'gamma_rot/s-1':>15}{'gamma_vib/s-1':>15}"
                 f"{'r/nm':>9}{'tau/s':>11}{'gates':>10}"]
        for r in rows:
            lines.append(
                f"{r.name:<8}{_fmt(r.r_min_nm, '10.2f')}{_fmt(r.r_max_nm, '10.1f')}{_fmt(r.gamma_rot, '15.3e')}"
                f"{_fmt(r.gamma_vib, '15.3e')}{_fmt(r.r_design_nm, '9.1f')}{_fmt(r.tau, '11.3e')}"
                f"{_fmt(r.robustness, '10.3g')}"
            )
            if r.partial:
                print(f"{r.name}: incomplete constants, some columns left empty", file=sys.stderr)
        text = "\n".join(lines) + "\n"
    _write(text, args.output)
    return EXIT_OK


def _scenario(args):
    cfg = ScenarioConfig()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                cfg = ScenarioConfig.from_toml(fh.read())
        except OSError as exc:
            raise InputError(f"cannot read scenario {args.config}: {exc.strerror}") from None
    return cfg.update_from_args(args).validate()


def _run_scenario(cfg, registry):
    params = cfg.params(registry)
    params.require("b_rot", "omega_vib")
    r = cfg.separation
    wait = cfg.wait
    if wait is None:
        wait = cfg.wait_tau * gate_duration(params.mu_si, r)
    return run_gate(
        cfg.amplitudes(), params, r, mode=cfg.mode, wait=wait, n_max=cfg.n_max, strictness=cfg.strictness,
        target_phase=cfg.target_phase, pulse_phases=cfg.pulse_phases, pulse_durations=cfg.pulse_durations,
        pulse_detunings=cfg.pulse_detunings,
    )


def cmd_gate(args):
    registry = load_registries(args.registry)
    cfg = _scenario(args)
    result = _run_scenario(cfg, registry)
    _write(_json(result.report.to_dict()), cfg.output)
    return EXIT_OK


def parse_lambda_range(text):
    m = re.fullmatch(rf"\s*({_NUM}):({_NUM}):({_NUM})\s*", text)
    if not m:
        raise InputError(f"lambda range must look like start:stop:step, got {text!r}")
    lo, hi, step = (float(g) for g in m.groups())
    if not 0 < lo < hi or step <= 0:
        raise InputError("lambda range must be positive and increasing with a positive step")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def cmd_sweep(args):
    registry = load_registries(args.registry)
    params = find_species(registry, args.molecule)
    lambdas = parse_lambda_range(args.lambda_)
    points = sweep(params, lambdas_nm=lambdas)
    if args.format == "json":
        text = _json([{"lambda_half_nm": p.lambda_half_nm, "tau_s": p.tau_s, "robustness": p.robustness}
                      for p in points])
    else:
        text = _csv(["lambda_half_nm", "tau_s", "robustness"],
                    [[repr(p.lambda_half_nm), repr(p.tau_s), repr(p.robustness)] for p in points])
    _write(text, args.output)
    return EXIT_OK


def _bell_state(args, registry):
    """Four storage-qubit amplitudes, the leakage they carry, and a source description."""
    if args.state:
        return qubit_amplitudes(args.state), 0.0, {"state": args.state}
    if args.report:
        try:
            with open(args.report, encoding="utf-8") as fh:
                rep = json.load(fh)
            amps = np.array([complex(re_, im) for re_, im in rep["output_qubit_amplitudes"]])
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise InputError(f"cannot read gate report {args.report}: {exc}") from None
        if amps.shape != (4,):
            raise InputError("gate report must hold four qubit amplitudes")
        leak = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
        if leak >= args.max_leakage:
            raise SubspaceError(leak, args.max_leakage)
        return amps / np.linalg.norm(amps), leak, {"report": args.report}
    cfg = _scenario(args)
    result = _run_scenario(cfg, registry)
    _, leak = reduce_to_qubits(result.output, max_leakage=args.max_leakage)
    amps = np.asarray(result.output.amplitudes)[storage_indices(result.output.basis)]
    src = {"molecule": result.report.molecule, "r": result.report.r, "wait_time": result.report.wait_time}
    return amps / np.linalg.norm(amps), leak, src


def cmd_bell(args):
    registry = load_registries(args.registry)
    amps, leak, source = _bell_state(args, registry)
    amps = strip_local_phases(amps)
    rho = density_matrix(amps)
    best = chsh_optimize(rho)
    report = {
        "source": source,
        "leakage": leak,
        "qubit_amplitudes": [[float(a.real), float(a.imag)] for a in amps],
        "concurrence": concurrence(rho),
        "chsh_canonical": chsh_value(rho, MeasurementAxes.canonical()),
        "canonical_axes": MeasurementAxes.canonical().to_dict(),
        "chsh_max": best.value,
        "optimal_axes": best.axes.to_dict(),
        "correlation_singular_values": [float(s) for s in best.singular_values],
        "violates_local_realism": bool(best.value > 2 + 1e-9),
    }
    _write(_json(report), args.output)
    return EXIT_OK


def density_state(name):
    """Two-molecule rotational states on N <= 1 used for angular density maps."""
    basis = PairBasis.rotational(1)
    k = {(a, b): basis.ket(LevelLabel(a), LevelLabel(b)).amplitudes for a in (0, 1) for b in (0, 1)}
    states = {
        "psi1": k[0, 0],
        "psi2": SQ2 * (k[0, 1] + k[1, 0]),
        "psi3": SQ2 * (k[0, 1] - k[1, 0]),
        "psi4": k[1, 1],
        "++": 0.5 * (k[0, 0] + k[0, 1] + k[1, 0] + k[1, 1]),
    }
    if name not in states:
        raise InputError(f"unknown density state {name!r} (use {', '.join(states)})")
    return PairState(basis, states[name])


def cmd_density(args):
    if args.n_theta < 2:
        raise InputError("--n-theta must be at least 2")
    theta = np.linspace(0.0, math.pi, args.n_theta)
    dens = angular_density(density_state(args.state), theta, theta)
    rows = [[repr(float(t1)), repr(float(t2)), repr(float(dens[i, j]))]
            for i, t1 in enumerate(theta) for j, t2 in enumerate(theta)]
    _write(_csv(["theta1", "theta2", "density"], rows), args.output)
    return EXIT_OK


def _add_gate_options(p, with_input=True):
    p.add_argument("--config", help="scenario file (TOML)")
    p.add_argument("--molecule", help="species name")
    p.add_argument("--r", help="separation, e.g. 300nm, 7.03au (bare numbers are nm)")
    p.add_argument("--lambda", dest="lambda_", help="lattice wavelength; r = lambda/2")
    p.add_argument("--wait", help="wait time: seconds, 12us, or a multiple of the gate time like 0.5tau")
    p.add_argument("--mode", choices=("ideal", "rwa"))
    if with_input:
        p.add_argument("--input", help=f"qubit input: {', '.join(GATE_INPUTS)}")
        p.add_argument("--coefficients", help="product state 'a0,a1;b0,b1' (normalized on load)")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--strictness", type=float, help="required margin 2B_rot / coupling (default 10)")
    p.add_argument("--target-phase", type=float, dest="target_phase")
    p.add_argument("--pulse-duration", type=float, dest="pulse_duration", help="pulse length in s (rwa mode)")


def build_parser():
    parser = argparse.ArgumentParser(prog="molgate", description=__doc__.split("\n")[0])
    parser.add_argument("--registry", action="append", metavar="FILE", help="extra molecule data file (TOML)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("feasibility", help="separation window and gate budget per species")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--all", action="store_true", help="every species with complete constants (the default)")
    g.add_argument("--molecule", action="append", help="species name (repeatable)")
    p.add_argument("--include-partial", action="store_true", dest="include_partial",
                   help="also list species with missing constants")
    p.add_argument("--ratio", type=float, default=DEFAULT_RATIO, help="safety factor (default 1000)")
    p.add_argument("--r-design", dest="r_design", help="separation for tau and robustness (default: window center)")
    p.add_argument("--format", choices=("table", "csv", "json"), default="table")
    p.add_argument("--csv", dest="csv_path", help="shortcut for --format csv --output PATH")
    p.add_argument("--output")
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("gate", help="simulate the phase gate and print a JSON report")
    _add_gate_options(p)
    p.add_argument("--output", help="write the JSON report here")
    p.set_defaults(func=cmd_gate)

    p = sub.add_parser("sweep", help="tau and robustness versus lattice wavelength")
    p.add_argument("--molecule", required=True)
    p.add_argument("--lambda", dest="lambda_", required=True, help="start:stop:step in nm, stop inclusive")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bell", help="CHSH analysis of a two-qubit state")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--state", help=f"named state: {', '.join(NAMED_QUBIT_STATES)}")
    src.add_argument("--report", help="gate JSON report whose output state is analysed")
    _add_gate_options(p)
    p.add_argument("--max-leakage", type=float, default=MAX_LEAKAGE, dest="max_leakage")
    p.add_argument("--output")
    p.set_defaults(func=cmd_bell)

    p = sub.add_parser("density", help="angular density grid of a rotational pair state")
    p.add_argument("--state", default="psi2", help="psi1, psi2, psi3, psi4 or ++")
    p.add_argument("--n-theta", type=int, default=61, dest="n_theta")
    p.add_argument("--output")
    p.set_defaults(func=cmd_density)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "csv_path", None):
        args.format, args.output = "csv", args.csv_path
    try:
        return args.func(args)
    except PerturbationRegimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except SubspaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LEAKAGE
    except (MolgateError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
