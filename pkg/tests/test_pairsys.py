import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from molgate.errors import ContractError, PerturbationRegimeError
from molgate.gate import gate_duration
from molgate.molecules import MoleculeParams, lookup
from molgate.pairsys import (
    HermitianOperator,
    PairBasis,
    PairState,
    build_h0,
    build_hamiltonian,
    build_vdip,
    check_perturbative,
    coupling_ratio,
    exact_spectrum,
    perturbative_spectrum,
    plus_shift_delta,
    storage_indices,
    time_avg_vd,
)
from molgate.rotor import LevelLabel as L
from molgate.units import CONSTANTS, NM

EPS0 = 1 / (4 * math.pi * CONSTANTS.coulomb_prefactor)


def splitting_oracle(mu, r):
    """mu^2 / (6 pi eps0 r^3), evaluated from eps0 directly."""
    return mu**2 / (6 * math.pi * EPS0 * r**3)


def test_basis_indexing_is_bijective():
    b = PairBasis.gate(4)
    assert len(b) == 100
    assert sorted(b.index.values()) == list(range(100))
    assert b.index_of(L(2, 0), L(1, 1)) == b.level_index[L(2, 0)] * 10 + b.level_index[L(1, 1)]


def test_basis_rejects_duplicates():
    with pytest.raises(ContractError):
        PairBasis([L(0), L(0)])
    with pytest.raises(ContractError):
        PairBasis.gate(1)


def test_h0_rotational_example(nacs):
    b = PairBasis.rotational(1)
    h = build_h0(b, nacs, include_vibration=False).matrix / nacs.b_rot_joule
    np.testing.assert_allclose(np.diag(h).real, [0, 2, 2, 4], atol=1e-12)
    assert h[1, 1] == h[2, 2]


def test_h0_single_state(nacs):
    h = build_h0(PairBasis([L(0)]), nacs, include_vibration=False)
    assert h.matrix.shape == (1, 1) and h.matrix[0, 0] == 0


def test_vdip_elements(nacs):
    b = PairBasis.rotational(1)
    mu, r = nacs.mu_si, 300 * NM
    v = build_vdip(b, mu, r)
    ref = -splitting_oracle(mu, r)
    assert v.matrix[b.index_of(L(0), L(1)), b.index_of(L(1), L(0))] == pytest.approx(ref, rel=1e-12)
    assert v.matrix[b.index_of(L(0), L(0)), b.index_of(L(1), L(1))] == pytest.approx(ref, rel=1e-12)
    assert v.matrix[0, 0] == 0


def test_vdip_selection_rule(nacs):
    b = PairBasis.gate(4)
    v = build_vdip(b, nacs.mu_si, 200 * NM).matrix
    for (a1, a2), i in b.index.items():
        for (c1, c2), j in b.index.items():
            allowed = abs(a1.N - c1.N) == 1 and abs(a2.N - c2.N) == 1 and a1.v == c1.v and a2.v == c2.v
            if not allowed:
                assert v[i, j] == 0
            else:
                assert v[i, j] != 0


def test_r_nonpositive_rejected(nacs):
    with pytest.raises(ValueError):
        build_vdip(PairBasis.rotational(1), nacs.mu_si, 0.0)
    with pytest.raises(ValueError):
        plus_shift_delta(nacs.mu_si, -1.0)


def test_hermitian_operator_contract():
    b = PairBasis([L(0), L(1)])
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = 1.0
    with pytest.raises(ContractError):
        HermitianOperator(b, m)
    with pytest.raises(ContractError):
        HermitianOperator(b, np.eye(3))


def test_pair_state_contract():
    b = PairBasis([L(0), L(1)])
    with pytest.raises(ValueError):
        PairState(b, [1, 1, 0, 0])
    s = PairState.normalized(b, [1, 1, 0, 0])
    assert s.overlap(s) == pytest.approx(1)


@pytest.mark.parametrize("name", ["RbCs", "NaCs", "KRb"])
@pytest.mark.parametrize("r_nm", [100, 300, 500])
def test_hamiltonian_hermitian(name, r_nm):
    p = lookup(name)
    h = build_hamiltonian(PairBasis.gate(4), p, r_nm * NM).matrix
    assert np.abs(h - h.conj().T).max() <= 1e-12 * np.abs(h).max()


def test_perturbative_rbcs_example():
    p = lookup("RbCs")
    ps = perturbative_spectrum(p.mu_si, 500 * NM, p.b_rot_joule)
    assert abs(ps.shifts["psi3"]) == pytest.approx(7.8e-31, rel=0.01)
    assert abs(ps.shifts["psi3"]) == pytest.approx(splitting_oracle(p.mu_si, 500 * NM), rel=1e-12)
    # 1.2 kHz * h
    assert abs(ps.shifts["psi3"]) / (2 * math.pi * CONSTANTS.hbar) == pytest.approx(1.18e3, rel=0.02)
    assert ps.shifts["psi2"] < 0 < ps.shifts["psi3"]


def test_perturbative_zero_dipole():
    ps = perturbative_spectrum(0.0, 100 * NM, 1e-24)
    assert all(v == 0 for v in ps.shifts.values())


def test_perturbative_guard_carries_ratio():
    p = lookup("RbCs")
    with pytest.raises(PerturbationRegimeError) as info:
        perturbative_spectrum(p.mu_si, 10 * NM, p.b_rot_joule)
    assert info.value.ratio == pytest.approx(coupling_ratio(p.mu_si, 10 * NM, p.b_rot_joule))
    assert info.value.ratio > 0.1
    assert check_perturbative(p.mu_si, 300 * NM, p.b_rot_joule) < 0.1


def test_exact_spectrum_trivial():
    b = PairBasis([L(0), L(1)])
    h = HermitianOperator(b, np.diag([4.0, 2, 2, 0]).astype(complex))
    np.testing.assert_allclose(exact_spectrum(h).eigenvalues, [0, 2, 2, 4])
    one = HermitianOperator(PairBasis([L(0)]), np.array([[3.5]]))
    assert exact_spectrum(one).eigenvalues[0] == 3.5
    with pytest.raises(ContractError):
        exact_spectrum(np.eye(2))


def _central_pair(spec, basis):
    i01, i10 = basis.index_of(L(0), L(1)), basis.index_of(L(1), L(0))
    vecs = spec.eigenvectors
    k2 = int(np.argmax(np.abs(vecs[i01] + vecs[i10]) ** 2))
    k3 = int(np.argmax(np.abs(vecs[i01] - vecs[i10]) ** 2))
    return k2, k3


def test_exact_splitting_large_r(nacs):
    b = PairBasis.rotational(1)
    r = 400 * NM
    spec = exact_spectrum(build_hamiltonian(b, nacs, r, include_vibration=False), dps=30)
    k2, k3 = _central_pair(spec, b)
    d = splitting_oracle(nacs.mu_si, r)
    assert float(spec.eigenvalues[k3] - spec.eigenvalues[k2]) == pytest.approx(2 * d, rel=(d / nacs.b_rot_joule) ** 2 + 1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 6.0), st.floats(60.0, 800.0))
def test_psi2_below_psi3(mu_debye, r_nm):
    p = MoleculeParams("X", 0.05, mu_debye, 100.0)
    r = r_nm * NM
    if coupling_ratio(p.mu_si, r, p.b_rot_joule) >= 0.1:
        return
    b = PairBasis.rotational(2)
    spec = exact_spectrum(build_hamiltonian(b, p, r, include_vibration=False))
    k2, k3 = _central_pair(spec, b)
    assert spec.eigenvalues[k2] < spec.eigenvalues[k3]


def test_plusplus_decomposition(nacs):
    ps = perturbative_spectrum(nacs.mu_si, 300 * NM, nacs.b_rot_joule)
    b = ps.basis
    pp = PairState(b, np.full(4, 0.5))
    amps = [ps.states[k].overlap(pp) for k in ("psi1", "psi2", "psi3", "psi4")]
    np.testing.assert_allclose(amps, [0.5, 1 / math.sqrt(2), 0, 0.5], atol=1e-12)


def test_tau_delta_identity(nacs):
    for r in (100 * NM, 300 * NM, 777 * NM):
        d = plus_shift_delta(nacs.mu_si, r)
        assert gate_duration(nacs.mu_si, r) * d == pytest.approx(math.pi * CONSTANTS.hbar, rel=1e-13)


def test_delta_nacs_and_scaling(nacs):
    d = plus_shift_delta(nacs.mu_si, 300 * NM)
    assert d / CONSTANTS.hbar == pytest.approx(2.45e5, rel=0.01)
    assert plus_shift_delta(nacs.mu_si, 600 * NM) == pytest.approx(d / 8, rel=1e-13)


def test_time_average_examples(nacs):
    mu, r, b = nacs.mu_si, 300 * NM, nacs.b_rot_joule
    assert time_avg_vd(1.0, 0.0, mu, r, b) == pytest.approx(0.0, abs=1e-45)
    s = 1 / math.sqrt(2)
    avg = time_avg_vd(s, s, mu, r, b)
    assert abs(avg) == pytest.approx(CONSTANTS.coulomb_prefactor * mu**2 / (3 * r**3), rel=1e-12)
    assert abs(avg) == pytest.approx(plus_shift_delta(mu, r), rel=1e-12)
    with pytest.raises(ValueError):
        time_avg_vd(1.0, 1.0, mu, r, b)


def test_time_average_maximized_at_equal_weights(nacs):
    mu, r, b = nacs.mu_si, 300 * NM, nacs.b_rot_joule
    angles = np.linspace(0, math.pi / 2, 41)
    vals = [abs(time_avg_vd(math.cos(a), math.sin(a) * np.exp(0.7j), mu, r, b)) for a in angles]
    assert np.argmax(vals) == 20
    # the average scales as |alpha beta|^2 = sin(2a)^2 / 4
    np.testing.assert_allclose(np.array(vals) / vals[20], np.sin(2 * angles) ** 2, atol=1e-12)


def test_storage_indices_order():
    b = PairBasis.gate(4)
    idx = storage_indices(b)
    assert [b.states[i] for i in idx] == [
        (L(0, 0), L(0, 0)), (L(0, 0), L(2, 0)), (L(2, 0), L(0, 0)), (L(2, 0), L(2, 0))
    ]
