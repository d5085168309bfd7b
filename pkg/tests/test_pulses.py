import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from molgate.errors import ContractError
from molgate.pairsys import PairBasis, PairState
from molgate.pulses import (
    PulseBandwidthWarning,
    PulseSequence,
    PulseSpec,
    apply_pulse,
    apply_sequence,
    check_bandwidth,
    decode_plus,
    encode_plus,
    encode_sequence,
    sequence_unitary,
)
from molgate.rotor import LevelLabel as L

from conftest import PLUS, random_unit_complex

S2 = 1 / math.sqrt(2)
B = PairBasis.gate(4)
ONE, ZERO = L(2, 0), L(0, 0)


def single(level_amps):
    """Product with molecule 2 parked in |0,v0>; returns molecule-1 amplitudes on ``B.levels``."""
    return B.product_state(level_amps, {ZERO: 1.0})


def mol1_amplitudes(state):
    return state.as_matrix()[:, B.level_index[ZERO]]


def vec(level_amps):
    v = np.zeros(B.n_levels, dtype=complex)
    for lvl, a in level_amps.items():
        v[B.level_index[lvl]] = a
    return v


def fidelity(a, b):
    return abs(np.vdot(a, b)) ** 2


@pytest.mark.parametrize("src,dst", [(L(2, 0), L(1, 1)), (L(0, 0), L(1, 0)), (L(3, 1), L(2, 1))])
def test_two_pi_is_minus_identity(src, dst):
    m = PulseSpec(src, dst, 2 * math.pi, phase=0.4).matrix()
    np.testing.assert_allclose(m, -np.eye(2), atol=1e-15)


@pytest.mark.parametrize("phi", [0.0, 0.7, math.pi])
def test_half_pi_creates_superposition(phi):
    p = PulseSpec(L(2, 0), L(1, 1), math.pi / 2, phase=phi)
    out = apply_pulse(single({ONE: 1.0}), p, 1)
    expected = vec({L(2, 0): S2, L(1, 1): S2 * np.exp(1j * phi)})
    np.testing.assert_allclose(mol1_amplitudes(out), expected, atol=1e-15)


def test_pi_twice_equals_two_pi():
    p = PulseSpec(L(2, 0), L(1, 1), math.pi, phase=1.1)
    np.testing.assert_allclose(p.matrix() @ p.matrix(), PulseSpec(L(2, 0), L(1, 1), 2 * math.pi).matrix(), atol=1e-15)


def test_pulse_validation():
    with pytest.raises(ValueError):
        PulseSpec(L(0, 0), L(2, 0), math.pi)  # Delta N = 2 without an intermediate
    with pytest.raises(ValueError):
        PulseSpec(L(0, 0), L(1, 0), math.pi, intermediate=L(1, 2))  # Raman with Delta N = 1
    with pytest.raises(ValueError):
        PulseSpec(L(0, 0), L(1, 0), 7.0)
    with pytest.raises(ValueError):
        PulseSpec(L(0, 0), L(1, 0), 1.0, mode="rwa")
    with pytest.raises(ValueError):
        PulseSpec(L(0, 0), L(1, 0), 1.0, mode="adiabatic")
    assert PulseSpec(L(2, 0), L(0, 1), math.pi, intermediate=L(1, 2)).is_raman


def test_level_not_in_basis():
    small = PairBasis.rotational(1)
    with pytest.raises(ContractError):
        apply_pulse(small.ket(L(0), L(0)), PulseSpec(L(2, 0), L(1, 1), 1.0), 1)
    with pytest.raises(ContractError):
        encode_plus(small.ket(L(0), L(0)), 1)


def test_encode_one_gives_plus():
    out = encode_plus(single({ONE: 1.0}), 1)
    assert fidelity(mol1_amplitudes(out), vec(PLUS)) == pytest.approx(1.0, abs=1e-14)


def test_encode_leaves_zero():
    out = encode_plus(single({ZERO: 1.0}), 1)
    np.testing.assert_allclose(mol1_amplitudes(out), vec({ZERO: 1.0}), atol=1e-15)


def test_encode_linear():
    out = encode_plus(single({ZERO: S2, ONE: S2}), 1)
    expected = S2 * vec({ZERO: 1.0}) + S2 * vec(PLUS)
    np.testing.assert_allclose(mol1_amplitudes(out), expected, atol=1e-15)


@pytest.mark.parametrize("level", [ZERO, ONE])
def test_decode_encode_roundtrip(level):
    s = single({level: 1.0})
    back = decode_plus(encode_plus(s, 1), 1)
    assert abs(s.overlap(back)) ** 2 >= 1 - 1e-10


def test_decode_plus_gives_one():
    out = decode_plus(single(PLUS), 1)
    assert fidelity(mol1_amplitudes(out), vec({ONE: 1.0})) == pytest.approx(1.0, abs=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["ideal", "rwa"]), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi),
       st.floats(-1e8, 1e8))
def test_roundtrip_property(seed, mode, ph1, ph2, det):
    rng = np.random.default_rng(seed)
    s = PairState(B, random_unit_complex(rng, len(B)))
    kw = dict(phases=(ph1, ph2), mode=mode, durations=(1e-7, 2e-7) if mode == "rwa" else (None, None),
              detunings=(det, -det))
    for mol in (1, 2):
        back = decode_plus(encode_plus(s, mol, **kw), mol, **kw)
        assert abs(s.overlap(back)) ** 2 >= 1 - 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_pulses_are_unitary(seed, area, phase):
    s = PairState(B, random_unit_complex(np.random.default_rng(seed), len(B)))
    out = apply_pulse(s, PulseSpec(L(2, 0), L(1, 1), area, phase), 2)
    assert abs(np.linalg.norm(out.amplitudes) - 1) <= 1e-10
    u = sequence_unitary(B, encode_sequence(phases=(phase, area)))
    assert np.abs(u.conj().T @ u - np.eye(len(u))).max() <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_molecule_pulses_commute(seed, a1, a2):
    s = PairState(B, random_unit_complex(np.random.default_rng(seed), len(B)))
    p1 = PulseSpec(L(2, 0), L(1, 1), a1, 0.3)
    p2 = PulseSpec(L(2, 0), L(0, 1), a2, 1.2, intermediate=L(1, 2))
    x = apply_pulse(apply_pulse(s, p1, 1), p2, 2)
    y = apply_pulse(apply_pulse(s, p2, 2), p1, 1)
    assert np.abs(x.amplitudes - y.amplitudes).max() <= 1e-12


def test_rwa_resonant_matches_ideal():
    ideal = PulseSpec(L(2, 0), L(1, 1), math.pi / 2, 0.5)
    rwa = PulseSpec(L(2, 0), L(1, 1), math.pi / 2, 0.5, mode="rwa", duration=1e-7)
    np.testing.assert_allclose(ideal.matrix(), rwa.matrix(), atol=1e-15)


def test_rwa_detuned_oracle():
    # rotating-frame two-level Hamiltonian (hbar = 1) propagated with expm
    from scipy.linalg import expm

    area, phi, dur, det = 2.1, 0.4, 1e-7, 3e6
    rabi = area / dur
    h = 0.5 * np.array([[-det, -1j * rabi * np.exp(-1j * phi)], [1j * rabi * np.exp(1j * phi), det]])
    ref = expm(-1j * h * dur)
    m = PulseSpec(L(2, 0), L(1, 1), area, phi, det, mode="rwa", duration=dur).matrix()
    np.testing.assert_allclose(m, ref, atol=1e-12)


def test_inverse_sequence():
    seq = encode_sequence(phases=(0.2, 1.3))
    u, v = sequence_unitary(B, seq), sequence_unitary(B, seq.inverse())
    np.testing.assert_allclose(v @ u, np.eye(len(u)), atol=1e-14)
    assert isinstance(seq.inverse(), PulseSequence)
    assert seq.inverse().pulses[0].is_raman


def test_bandwidth_warning(nacs):
    b = nacs.b_rot_joule
    long = PulseSpec(L(2, 0), L(1, 1), math.pi / 2, mode="rwa", duration=1e-6)
    short = PulseSpec(L(2, 0), L(1, 1), math.pi / 2, mode="rwa", duration=1e-11)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert check_bandwidth(long, b)
    with pytest.warns(PulseBandwidthWarning):
        assert not check_bandwidth(short, b)


def test_apply_sequence_molecule_index():
    with pytest.raises(ValueError):
        apply_sequence(single({ONE: 1.0}), encode_sequence(), 3)
