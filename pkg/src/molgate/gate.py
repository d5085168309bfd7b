"""The three-step dipole phase gate and its figures of merit."""

from dataclasses import asdict, dataclass, field
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .dynamics import Propagator
from .entangle import concurrence, reduce_to_qubits
from .errors import ContractError, SubspaceError
from .pairsys import (
    DEFAULT_STRICTNESS,
    PairBasis,
    PairState,
    build_h0,
    build_vdip,
    check_perturbative,
    plus_shift_delta,
    storage_indices,
)
from .pulses import check_bandwidth, decode_sequence, encode_sequence, sequence_unitary
from .units import CONSTANTS

REPORT_SCHEMA_VERSION = 1
QUBIT_LABELS = ("00", "01", "10", "11")


def gate_duration(mu, r):
    """Wait time 4 pi eps0 * 3 pi hbar r^3 / mu^2 that accumulates a pi phase on |++>."""
    if mu <= 0 or r <= 0:
        raise ValueError("dipole moment and separation must be positive")
    return 3.0 * math.pi * CONSTANTS.hbar * r**3 / (CONSTANTS.coulomb_prefactor * mu**2)


def wrap_phase(x):
    """Reduce to (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y


def conditional_phase(phi00, phi01, phi10, phi11):
    return wrap_phase(phi00 + phi11 - phi01 - phi10)


def phase_gate(phi):
    return np.diag([1, 1, 1, np.exp(1j * phi)]).astype(complex)


def gate_fidelity(achieved, target_phase, atol=1e-8):
    """|Tr(P(phi)^dag D U)|/4 maximized over local Z rotations D.

    With D = diag(e^{ia}, e^{ib}) x diag(e^{ic}, e^{id}) the trace only
    depends on p = a - b and q = c - d; the maximum over q is analytic,
    leaving a one-dimensional search over p.

    Parameters
    ----------
    achieved : (4, 4) array
        Gate restricted to the storage qubits (|00>, |01>, |10>, |11>).
    target_phase : float
    atol : float or None
        Unitarity tolerance; ``None`` accepts non-unitary (leaky) blocks.
    """
    u = np.asarray(achieved, dtype=complex)
    if u.shape != (4, 4):
        raise ContractError("gate_fidelity expects a 4x4 matrix")
    if atol is not None and np.abs(u.conj().T @ u - np.eye(4)).max() > atol:
        raise ContractError("achieved gate is not unitary")
    w = np.conj(np.diag(phase_gate(target_phase))) * np.diag(u)

    def neg(p):
        e = np.exp(1j * p)
        return -(abs(w[1] * e + w[3]) + abs(w[0] * e + w[2]))

    grid = np.linspace(-math.pi, math.pi, 361)
    vals = [neg(p) for p in grid]
    p0 = grid[int(np.argmin(vals))]
    res = minimize_scalar(neg, bounds=(p0 - 0.02, p0 + 0.02), method="bounded", options={"xatol": 1e-12})
    best = max(-res.fun, -min(vals))
    return float(min(best / 4.0, 1.0))


@dataclass
class GateReport:
    molecule: str
    r: float
    wait_time: float
    tau: float
    delta: float
    mode: str
    phases: dict
    conditional_phase: float
    fidelity: float
    target_phase: float
    leakage: dict
    output_leakage: float
    concurrence_out: float | None
    output_qubit_amplitudes: list = field(default_factory=list)
    schema_version: int = REPORT_SCHEMA_VERSION

    def to_dict(self):
        d = asdict(self)
        d["output_qubit_amplitudes"] = [[float(np.real(a)), float(np.imag(a))] for a in self.output_qubit_amplitudes]
        return d


@dataclass(frozen=True, eq=False)
class GateResult:
    output: PairState
    report: GateReport
    gate_map: np.ndarray  # full-space map D U_I E
    storage_block: np.ndarray  # 4x4 restriction to the storage qubits


def embed_qubits(basis, amplitudes, v_storage=0):
    """PairState on ``basis`` from four storage-qubit amplitudes (|00>, |01>, |10>, |11>)."""
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.shape != (4,):
        raise ContractError("expected four qubit amplitudes")
    full = np.zeros(len(basis), dtype=complex)
    full[storage_indices(basis, v_storage)] = amps
    return PairState(basis, full)


def run_gate(input_state, params, r, mode="ideal", wait=None, n_max=4, v_storage=0, v_aux=1,
             strictness=DEFAULT_STRICTNESS, target_phase=math.pi, pulse_phases=(0.0, 0.0),
             pulse_durations=(None, None), pulse_detunings=(0.0, 0.0)):
    """Encode both molecules, wait under H0 + V_d, decode, and score the result.

    Phases are interaction-picture phases: the free rotor/vibrational phases
    accumulated during the wait are divided out.

    Parameters
    ----------
    input_state : PairState or array of 4 qubit amplitudes
        Must be supported on the storage qubits.
    params : MoleculeParams
        Needs b_rot and omega_vib.
    r : float
        Separation in m.
    wait : float, optional
        Free-evolution time in s; defaults to :func:`gate_duration`.

    Raises
    ------
    PerturbationRegimeError
        If the dipole coupling is not small against 2 B_rot.
    """
    params.require("b_rot", "omega_vib")
    mu, b_rot = params.mu_si, params.b_rot_joule
    check_perturbative(mu, r, b_rot, strictness)
    basis = PairBasis.gate(n_max, v_storage, v_aux)

    if isinstance(input_state, PairState):
        if input_state.basis != basis:
            raise ContractError("input state is not on the gate basis")
        psi_in = input_state
    else:
        amps = np.asarray(input_state, dtype=complex)
        if abs(np.linalg.norm(amps) - 1) > 1e-10:
            raise ValueError("input qubit amplitudes are not normalized")
        psi_in = embed_qubits(basis, amps, v_storage)
    idx = storage_indices(basis, v_storage)
    if 1 - np.sum(np.abs(psi_in.amplitudes[idx]) ** 2) > 1e-10:
        raise ValueError("input state has support outside the storage qubits")

    tau = gate_duration(mu, r)
    wait = tau if wait is None else float(wait)
    if wait < 0:
        raise ValueError("wait time must be non-negative")

    seq_kw = dict(v_storage=v_storage, v_aux=v_aux, phases=pulse_phases, mode="rwa" if mode == "rwa" else "ideal",
                  durations=pulse_durations, detunings=pulse_detunings)
    enc_seq = encode_sequence(**seq_kw)
    for p in enc_seq.pulses:
        check_bandwidth(p, b_rot)
    enc = sequence_unitary(basis, enc_seq)
    dec = sequence_unitary(basis, decode_sequence(**seq_kw))

    h0 = build_h0(basis, params)
    h = h0 + build_vdip(basis, mu, r)
    u_int = Propagator(h).interaction_unitary(wait, h0)
    gate_map = np.kron(dec, dec) @ u_int @ np.kron(enc, enc)
    block = gate_map[np.ix_(idx, idx)]

    phases = {lbl: float(np.angle(block[k, k])) for k, lbl in enumerate(QUBIT_LABELS)}
    leakage = {lbl: float(max(0.0, 1 - np.sum(np.abs(block[:, k]) ** 2))) for k, lbl in enumerate(QUBIT_LABELS)}
    out = PairState.normalized(basis, gate_map @ psi_in.amplitudes)
    try:
        rho, out_leak = reduce_to_qubits(out, v_storage)
        conc = concurrence(rho)
    except SubspaceError as exc:
        out_leak, conc = exc.leakage, None

    report = GateReport(
        molecule=params.name,
        r=r,
        wait_time=wait,
        tau=tau,
        delta=plus_shift_delta(mu, r),
        mode=mode,
        phases=phases,
        conditional_phase=conditional_phase(phases["00"], phases["01"], phases["10"], phases["11"]),
        fidelity=gate_fidelity(block, target_phase, atol=None),
        target_phase=target_phase,
        leakage=leakage,
        output_leakage=float(out_leak),
        concurrence_out=None if conc is None else float(conc),
        output_qubit_amplitudes=list(out.amplitudes[idx]),
    )
    return GateResult(out, report, gate_map, block)
