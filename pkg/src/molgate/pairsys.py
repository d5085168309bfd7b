"""Two-molecule product space, Hamiltonian assembly and spectra."""

from dataclasses import dataclass, field
import itertools
import math

import mpmath
import numpy as np

from .errors import ContractError, PerturbationRegimeError
from .rotor import LevelLabel, cos_theta_element, level_energy, rot_energy, y_n0
from .units import CONSTANTS

HERMITICITY_RTOL = 1e-12
NORM_TOL = 1e-10
DEFAULT_STRICTNESS = 10.0


class PairBasis:
    """Ordered product basis ``levels x levels`` for two identical molecules.

    Index ``i * n + j`` holds ``(levels[i], levels[j])`` with molecule 1 first.
    """

    def __init__(self, levels):
        levels = tuple(LevelLabel(*l).validate() for l in levels)
        if len(set(levels)) != len(levels):
            raise ContractError("duplicate single-molecule levels")
        if not levels:
            raise ContractError("empty basis")
        self.levels = levels
        self.level_index = {l: i for i, l in enumerate(levels)}
        self.states = tuple(itertools.product(levels, levels))
        self.index = {s: k for k, s in enumerate(self.states)}

    @classmethod
    def rotational(cls, n_max, v=0):
        return cls([LevelLabel(n, v) for n in range(n_max + 1)])

    @classmethod
    def gate(cls, n_max=4, v_storage=0, v_aux=1):
        """Levels N = 0..n_max in the storage and auxiliary vibrational states."""
        if n_max < 2:
            raise ContractError("the gate needs N up to 2 at least")
        if v_storage == v_aux:
            raise ContractError("storage and auxiliary vibrational levels must differ")
        return cls([LevelLabel(n, v) for v in (v_storage, v_aux) for n in range(n_max + 1)])

    def __len__(self):
        return len(self.states)

    def __eq__(self, other):
        return isinstance(other, PairBasis) and self.levels == other.levels

    def __hash__(self):
        return hash(self.levels)

    def __repr__(self):
        return f"PairBasis({len(self.levels)} levels, dim={len(self)})"

    @property
    def n_levels(self):
        return len(self.levels)

    def index_of(self, l1, l2):
        try:
            return self.index[(LevelLabel(*l1), LevelLabel(*l2))]
        except KeyError:
            raise ContractError(f"state ({l1}, {l2}) not in basis") from None

    def ket(self, l1, l2):
        amps = np.zeros(len(self), dtype=complex)
        amps[self.index_of(l1, l2)] = 1.0
        return PairState(self, amps)

    def product_state(self, phi1, phi2):
        """Product of two single-molecule states given as ``{level: amplitude}``."""
        a = np.zeros(self.n_levels, dtype=complex)
        b = np.zeros(self.n_levels, dtype=complex)
        for vec, spec in ((a, phi1), (b, phi2)):
            for lvl, amp in spec.items():
                try:
                    vec[self.level_index[LevelLabel(*lvl)]] += amp
                except KeyError:
                    raise ContractError(f"level {lvl} not in basis") from None
        return PairState(self, np.kron(a, b))


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    basis: PairBasis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = len(self.basis)
        if m.shape != (n, n):
            raise ContractError(f"operator shape {m.shape} does not match basis dimension {n}")
        scale = np.abs(m).max() if m.size else 0.0
        if np.abs(m - m.conj().T).max(initial=0.0) > HERMITICITY_RTOL * scale:
            raise ContractError("operator is not hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __add__(self, other):
        if other.basis != self.basis:
            raise ContractError("operators live on different bases")
        return HermitianOperator(self.basis, self.matrix + other.matrix)

    def expectation(self, state):
        if state.basis != self.basis:
            raise ContractError("state and operator live on different bases")
        return float(np.real(np.vdot(state.amplitudes, self.matrix @ state.amplitudes)))


@dataclass(frozen=True, eq=False)
class PairState:
    basis: PairBasis
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.shape != (len(self.basis),):
            raise ContractError(f"amplitude vector of length {a.shape} for basis of dimension {len(self.basis)}")
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm {norm:.12g})")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def normalized(cls, basis, amplitudes):
        a = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(a)
        if norm == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(basis, a / norm)

    def amplitude(self, l1, l2):
        return self.amplitudes[self.basis.index_of(l1, l2)]

    def overlap(self, other):
        """<self|other>."""
        if other.basis != self.basis:
            raise ContractError("states live on different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def as_matrix(self):
        """Amplitudes reshaped to ``(levels of molecule 1, levels of molecule 2)``."""
        n = self.basis.n_levels
        return self.amplitudes.reshape(n, n)


def storage_levels(v_storage=0):
    """Qubit levels |0> = |N=0, v> and |1> = |N=2, v>."""
    return LevelLabel(0, v_storage), LevelLabel(2, v_storage)


def storage_indices(basis, v_storage=0):
    """Basis indices of |00>, |01>, |10>, |11> in the storage encoding."""
    q = storage_levels(v_storage)
    return [basis.index_of(q[a], q[b]) for a in (0, 1) for b in (0, 1)]


def build_h0(basis, params, include_vibration=True):
    """Diagonal field-free Hamiltonian, sum of single-molecule level energies (J).

    With ``include_vibration=False`` only the rotational energies are used and
    ``params.omega_vib`` is not needed.
    """
    if include_vibration:
        e = np.array([level_energy(l, params) for l in basis.levels])
    else:
        b = params.b_rot_joule
        e = np.array([rot_energy(l.N, b) for l in basis.levels])
    diag = (e[:, None] + e[None, :]).ravel()
    return HermitianOperator(basis, np.diag(diag).astype(complex))


def dipole_prefactor(mu, r):
    """(1/2 pi eps0) mu^2 / r^3 in J, the M=0 cos*cos coupling strength."""
    if r <= 0:
        raise ValueError(f"separation must be positive, got {r}")
    return 2.0 * CONSTANTS.coulomb_prefactor * mu**2 / r**3


def build_vdip(basis, mu, r):
    """M=0 dipole-dipole operator -(1/2 pi eps0)(mu^2/r^3) cos(t1) cos(t2).

    ``mu`` in C m, ``r`` in m. Diagonal in each molecule's vibrational index.
    """
    pref = dipole_prefactor(mu, r)
    levels = basis.levels
    n = len(levels)
    single = np.zeros((n, n))
    for i, a in enumerate(levels):
        for j, b in enumerate(levels):
            if a.v == b.v:
                single[i, j] = cos_theta_element(b.N, a.N)
    return HermitianOperator(basis, (-pref * np.kron(single, single)).astype(complex))


def build_hamiltonian(basis, params, r, include_vibration=True):
    return build_h0(basis, params, include_vibration) + build_vdip(basis, params.mu_si, r)


def coupling_ratio(mu, r, b_rot):
    """|<01|V_d|10>| / (2 B_rot); the perturbative regime needs this << 1."""
    return dipole_prefactor(mu, r) / 3.0 / (2.0 * b_rot)


def check_perturbative(mu, r, b_rot, strictness=DEFAULT_STRICTNESS):
    ratio = coupling_ratio(mu, r, b_rot)
    if ratio >= 1.0 / strictness:
        raise PerturbationRegimeError(ratio, 1.0 / strictness)
    return ratio


@dataclass(frozen=True)
class PerturbativeSpectrum:
    basis: PairBasis
    states: dict
    shifts: dict
    ratio: float


def perturbative_spectrum(mu, r, b_rot, strictness=DEFAULT_STRICTNESS):
    """Zero-order eigenstates psi1..psi4 on N<=1 and their first-order shifts.

    Raises :class:`PerturbationRegimeError` when the coupling is not small
    against 2 B_rot by the factor ``strictness``.
    """
    ratio = check_perturbative(mu, r, b_rot, strictness)
    basis = PairBasis.rotational(1)
    s = 1 / math.sqrt(2)
    k = {(a, b): basis.ket(LevelLabel(a), LevelLabel(b)).amplitudes for a in (0, 1) for b in (0, 1)}
    states = {
        "psi1": PairState(basis, k[0, 0]),
        "psi2": PairState(basis, s * (k[0, 1] + k[1, 0])),
        "psi3": PairState(basis, s * (k[0, 1] - k[1, 0])),
        "psi4": PairState(basis, k[1, 1]),
    }
    split = dipole_prefactor(mu, r) / 3.0
    shifts = {"psi1": 0.0, "psi2": -split, "psi3": split, "psi4": 0.0}
    return PerturbativeSpectrum(basis, states, shifts, ratio)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues and matching eigenvectors.

    When computed in extended precision, ``eigenvalues`` is an object array
    of ``mpmath.mpf`` so that small differences survive; ``eigenvectors`` is
    always a complex128 matrix whose columns are the eigenvectors.
    """

    basis: PairBasis
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def state(self, k):
        return PairState.normalized(self.basis, self.eigenvectors[:, k])


def exact_spectrum(h, dps=None):
    """Diagonalize a :class:`HermitianOperator`.

    Parameters
    ----------
    h : HermitianOperator
    dps : int, optional
        Decimal digits for an mpmath diagonalization. Needed when level
        differences far below ``eps * ||h||`` matter.
    """
    if not isinstance(h, HermitianOperator):
        raise ContractError("exact_spectrum expects a HermitianOperator")
    m = h.matrix
    if dps is None:
        evals, evecs = np.linalg.eigh(m)
        return Spectrum(h.basis, evals, evecs)

    with mpmath.workdps(dps):
        if np.abs(m.imag).max(initial=0.0) == 0.0:
            E, Q = mpmath.eigsy(mpmath.matrix(m.real.tolist()))
        else:
            E, Q = mpmath.eighe(mpmath.matrix(m.tolist()))
        n = m.shape[0]
        vals = [E[i] for i in range(n)]
        order = sorted(range(n), key=lambda i: vals[i])
        evals = np.empty(n, dtype=object)
        evals[:] = [vals[i] for i in order]
        evecs = np.array([[complex(Q[r, c]) for c in order] for r in range(n)])
    return Spectrum(h.basis, evals, evecs)


def plus_shift_delta(mu, r):
    """|<++|V_d|++>| averaged over a rotation: (1/4 pi eps0) mu^2 / (3 r^3)."""
    if r <= 0:
        raise ValueError(f"separation must be positive, got {r}")
    return CONSTANTS.coulomb_prefactor * mu**2 / (3.0 * r**3)


def time_avg_vd(alpha, beta, mu, r, b_rot, n_samples=64):
    """Rotation-period average of <Omega_t Omega_t|V_d|Omega_t Omega_t>.

    Both molecules start in ``alpha|0> + beta|1>`` and evolve freely under
    the rotor Hamiltonian; the result is signed (negative = attractive).
    """
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > NORM_TOL:
        raise ValueError("single-molecule superposition is not normalized")
    basis = PairBasis.rotational(1)
    v = build_vdip(basis, mu, r).matrix
    t_rot = CONSTANTS.hbar * math.pi / b_rot
    # periodic trapezoid: exact for the trigonometric polynomial integrand
    t = t_rot * np.arange(n_samples) / n_samples
    e1 = rot_energy(1, b_rot)
    vals = np.empty(n_samples)
    for k, tk in enumerate(t):
        single = np.array([alpha, beta * np.exp(-1j * e1 * tk / CONSTANTS.hbar)])
        psi = np.kron(single, single)
        vals[k] = np.real(np.vdot(psi, v @ psi))
    return float(vals.mean())


def angular_density(state, theta1, theta2):
    """|psi(theta1, theta2)|^2 on a grid, summed over vibrational sectors."""
    theta1 = np.asarray(theta1, dtype=float)
    theta2 = np.asarray(theta2, dtype=float)
    levels = state.basis.levels
    c = state.as_matrix()
    y1 = np.array([y_n0(l.N, theta1) for l in levels])
    y2 = np.array([y_n0(l.N, theta2) for l in levels])
    out = np.zeros((theta1.size, theta2.size))
    vs = sorted({l.v for l in levels})
    for va in vs:
        ia = [i for i, l in enumerate(levels) if l.v == va]
        for vb in vs:
            ib = [j for j, l in enumerate(levels) if l.v == vb]
            amp = y1[ia].T @ c[np.ix_(ia, ib)] @ y2[ib]
            out += np.abs(amp) ** 2
    return out
