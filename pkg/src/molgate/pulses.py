"""Laser pulses as two-level rotations, and the |1> <-> |+> transfer sequences.

A pulse of area A and phase phi acting on the transition ``from -> to``
applies, in the (from, to) subspace,

    [[cos(A/2),          -exp(-i phi) sin(A/2)],
     [exp(i phi) sin(A/2),  cos(A/2)          ]]

so a pi/2 pulse takes ``|from>`` to ``(|from> + exp(i phi)|to>)/sqrt(2)``.
Laser polarization is along the inter-molecular axis, hence Delta M = 0.
"""

from dataclasses import dataclass, field, replace
import math
import warnings

import numpy as np

from .errors import ContractError
from .pairsys import PairState
from .rotor import LevelLabel
from .units import CONSTANTS

MODES = ("ideal", "rwa")


class PulseBandwidthWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PulseSpec:
    """One pulse on a single-molecule transition.

    Two-photon Raman transfers (Delta N = 0 or 2) are modeled as one
    effective rotation and must name the ``intermediate`` level they are
    detuned from; that level is never populated.
    """

    from_level: LevelLabel
    to_level: LevelLabel
    area: float
    phase: float = 0.0
    detuning: float = 0.0  # rad/s, only used in "rwa" mode
    mode: str = "ideal"
    intermediate: LevelLabel | None = None
    duration: float | None = None  # s

    def __post_init__(self):
        object.__setattr__(self, "from_level", LevelLabel(*self.from_level).validate())
        object.__setattr__(self, "to_level", LevelLabel(*self.to_level).validate())
        if self.intermediate is not None:
            object.__setattr__(self, "intermediate", LevelLabel(*self.intermediate).validate())
        dn = abs(self.from_level.N - self.to_level.N)
        if self.intermediate is None and dn != 1:
            raise ValueError(f"one-photon pulse needs |Delta N| = 1, got {dn}")
        if self.intermediate is not None and dn not in (0, 2):
            raise ValueError(f"Raman pulse needs Delta N in (0, 2), got {dn}")
        if self.from_level == self.to_level:
            raise ValueError("pulse must connect two distinct levels")
        if not 0.0 <= self.area <= 2 * math.pi + 1e-12:
            raise ValueError(f"pulse area must lie in [0, 2 pi], got {self.area}")
        if self.mode not in MODES:
            raise ValueError(f"unknown pulse mode {self.mode!r}")
        if self.mode == "rwa" and (self.duration is None or self.duration <= 0):
            raise ValueError("rwa pulses need a positive duration")

    @property
    def is_raman(self):
        return self.intermediate is not None

    def inverse(self):
        """The pulse undoing this one: same area, phase shifted by pi, opposite detuning."""
        return replace(self, phase=(self.phase + math.pi) % (2 * math.pi), detuning=-self.detuning)

    def matrix(self):
        """2x2 unitary on (from_level, to_level)."""
        half = self.area / 2
        e = np.exp(1j * self.phase)
        if self.mode == "ideal" or self.detuning == 0.0:
            c, s = math.cos(half), math.sin(half)
            return np.array([[c, -s / e], [e * s, c]], dtype=complex)
        rabi = self.area / self.duration
        gen = math.hypot(rabi, self.detuning)
        x = gen * self.duration / 2
        c, s = math.cos(x), math.sin(x)
        d = self.detuning / gen
        w = rabi / gen
        # rotating-frame propagator of the detuned two-level problem
        return np.array([[c + 1j * d * s, -w * s / e], [e * w * s, c - 1j * d * s]], dtype=complex)


@dataclass(frozen=True)
class PulseSequence:
    pulses: tuple = field(default_factory=tuple)
    label: str = "custom"

    def inverse(self, label=None):
        return PulseSequence(tuple(p.inverse() for p in reversed(self.pulses)), label or f"inverse_{self.label}")


def check_bandwidth(pulse, b_rot, factor=10.0):
    """Warn unless the pulse's spectral width 1/dt is below (2 B_rot / hbar) / factor."""
    if pulse.duration is None:
        return True
    ok = 1.0 / pulse.duration < 2 * b_rot / CONSTANTS.hbar / factor
    if not ok:
        warnings.warn(
            f"pulse {pulse.from_level}->{pulse.to_level} of {pulse.duration:.3g} s is too short to resolve "
            f"the 2B_rot rotational spacing",
            PulseBandwidthWarning,
            stacklevel=2,
        )
    return ok


def _single_molecule_unitary(basis, pulse):
    n = basis.n_levels
    try:
        i = basis.level_index[pulse.from_level]
        j = basis.level_index[pulse.to_level]
    except KeyError:
        raise ContractError(f"pulse levels {pulse.from_level}, {pulse.to_level} not in basis") from None
    u = np.eye(n, dtype=complex)
    m = pulse.matrix()
    u[np.ix_([i, j], [i, j])] = m
    return u


def _apply_single(state, u, molecule_index):
    c = state.as_matrix()
    if molecule_index == 1:
        out = u @ c
    elif molecule_index == 2:
        out = c @ u.T
    else:
        raise ValueError("molecule_index must be 1 or 2")
    return PairState.normalized(state.basis, out.ravel())


def apply_pulse(state, pulse, molecule_index):
    return _apply_single(state, _single_molecule_unitary(state.basis, pulse), molecule_index)


def sequence_unitary(basis, seq):
    """Single-molecule unitary of a whole sequence on ``basis.levels``."""
    u = np.eye(basis.n_levels, dtype=complex)
    for p in seq.pulses:
        u = _single_molecule_unitary(basis, p) @ u
    return u


def apply_sequence(state, seq, molecule_index):
    return _apply_single(state, sequence_unitary(state.basis, seq), molecule_index)


def encode_sequence(v_storage=0, v_aux=1, v_raman=2, phases=(0.0, 0.0), mode="ideal", durations=(None, None),
                    detunings=(0.0, 0.0)):
    """pi/2 pulse |2,vs> -> |1,va>, then Raman pi transfer |2,vs> -> |0,va> via |1,vr>."""
    half = PulseSpec(LevelLabel(2, v_storage), LevelLabel(1, v_aux), math.pi / 2, phases[0], detunings[0], mode,
                     duration=durations[0])
    raman = PulseSpec(LevelLabel(2, v_storage), LevelLabel(0, v_aux), math.pi, phases[1], detunings[1], mode,
                      intermediate=LevelLabel(1, v_raman), duration=durations[1])
    return PulseSequence((half, raman), "encode_plus")


def decode_sequence(**kwargs):
    return encode_sequence(**kwargs).inverse("decode_plus")


def _require_levels(state, v_storage, v_aux):
    need = [LevelLabel(0, v_storage), LevelLabel(2, v_storage), LevelLabel(0, v_aux), LevelLabel(1, v_aux)]
    missing = [l for l in need if l not in state.basis.level_index]
    if missing:
        raise ContractError(f"basis lacks levels {', '.join(map(str, missing))}")


def encode_plus(state, molecule_index, v_storage=0, v_aux=1, **kwargs):
    """Map the qubit state |1> = |2,vs> of one molecule to |+> = (|0,va> + |1,va>)/sqrt(2)."""
    _require_levels(state, v_storage, v_aux)
    return apply_sequence(state, encode_sequence(v_storage=v_storage, v_aux=v_aux, **kwargs), molecule_index)


def decode_plus(state, molecule_index, v_storage=0, v_aux=1, **kwargs):
    """Exact inverse of :func:`encode_plus`."""
    _require_levels(state, v_storage, v_aux)
    return apply_sequence(state, decode_sequence(v_storage=v_storage, v_aux=v_aux, **kwargs), molecule_index)
