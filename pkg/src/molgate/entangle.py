"""Two-qubit entanglement measures and the CHSH Bell witness."""

from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import minimize

from .errors import ContractError, SubspaceError
from .pairsys import PairState, storage_indices

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
SIGMA_YY = np.kron(PAULI[1], PAULI[1])
TSIRELSON = 2 * math.sqrt(2)
MAX_LEAKAGE = 0.05


def density_matrix(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def check_density_matrix(rho, dim=4):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim == 1:
        rho = density_matrix(rho)
    if rho.shape != (dim, dim):
        raise ContractError(f"expected a {dim}x{dim} density matrix")
    if np.abs(rho - rho.conj().T).max() > 1e-12:
        raise ContractError("density matrix is not hermitian")
    if abs(np.trace(rho) - 1) > 1e-10:
        raise ContractError("density matrix does not have unit trace")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ContractError("density matrix is not positive semidefinite")
    return rho


def reduce_to_qubits(state, v_storage=0, max_leakage=MAX_LEAKAGE):
    """Storage-qubit density matrix of a pair state and the population lost outside it.

    Returns
    -------
    rho : (4, 4) ndarray
        Renormalized projector onto the |00>, |01>, |10>, |11> components.
    leakage : float
    """
    if not isinstance(state, PairState):
        raise ContractError("reduce_to_qubits expects a PairState")
    a = state.amplitudes[storage_indices(state.basis, v_storage)]
    kept = float(np.sum(np.abs(a) ** 2))
    leakage = max(0.0, 1.0 - kept)
    if leakage >= max_leakage:
        raise SubspaceError(leakage, max_leakage)
    return density_matrix(a / math.sqrt(kept)), leakage


def concurrence(rho):
    """Wootters concurrence of a two-qubit state (ket or density matrix).

    With rho = W W^dag (W = eigenvectors scaled by sqrt(p)), the Wootters
    lambdas are the singular values of W^T (sigma_y x sigma_y) W. This
    avoids square roots of near-zero eigenvalues of sqrt(rho) rho~ sqrt(rho).
    """
    rho = check_density_matrix(rho)
    p, v = np.linalg.eigh(rho)
    w = v * np.sqrt(np.clip(p, 0, None))
    lam = np.linalg.svd(w.T @ SIGMA_YY @ w, compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def entanglement_entropy(state, v_storage=0):
    """Entropy (in bits) of one molecule's reduced state for a pure two-qubit state.

    Accepts four qubit amplitudes, a :class:`PairState` with negligible
    leakage, or a pure 4x4 density matrix.
    """
    if isinstance(state, PairState):
        rho, leak = reduce_to_qubits(state, v_storage)
        if leak > 1e-6:
            raise ContractError(f"state leaks {leak:.2e} out of the qubit subspace")
        state = rho
    arr = np.asarray(state, dtype=complex)
    if arr.ndim == 2:
        rho = check_density_matrix(arr)
        if abs(np.real(np.trace(rho @ rho)) - 1) > 1e-10:
            raise ContractError("entanglement_entropy needs a pure state")
        w, v = np.linalg.eigh(rho)
        arr = v[:, -1]
    if arr.shape != (4,):
        raise ContractError("expected four qubit amplitudes")
    arr = arr / np.linalg.norm(arr)
    p = np.linalg.svd(arr.reshape(2, 2), compute_uv=False) ** 2
    p = p[p > 1e-300]
    return float(max(0.0, -np.sum(p * np.log2(p))))


@dataclass(frozen=True)
class MeasurementAxes:
    """Bloch-sphere directions a, a' (molecule 1) and b, b' (molecule 2)."""

    a: np.ndarray
    a_prime: np.ndarray
    b: np.ndarray
    b_prime: np.ndarray

    def __post_init__(self):
        for name in ("a", "a_prime", "b", "b_prime"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or abs(np.linalg.norm(v) - 1) > 1e-12:
                raise ValueError(f"axis {name} must be a unit 3-vector")
            object.__setattr__(self, name, v)

    @classmethod
    def canonical(cls):
        """a = z, a' = x, b and b' at +-45 degrees between them."""
        z, x = np.array([0.0, 0, 1]), np.array([1.0, 0, 0])
        s = 1 / math.sqrt(2)
        return cls(z, x, s * (z + x), s * (z - x))

    def to_dict(self):
        return {k: [float(c) for c in getattr(self, k)] for k in ("a", "a_prime", "b", "b_prime")}


def sigma(axis):
    return np.tensordot(np.asarray(axis, dtype=float), PAULI, axes=1)


def correlation(rho, a, b):
    return float(np.real(np.trace(rho @ np.kron(sigma(a), sigma(b)))))


def chsh_value(rho, axes):
    """|E(a,b) + E(a',b) + E(a,b') - E(a',b')| with E the spin correlation."""
    rho = check_density_matrix(rho)
    return abs(
        correlation(rho, axes.a, axes.b)
        + correlation(rho, axes.a_prime, axes.b)
        + correlation(rho, axes.a, axes.b_prime)
        - correlation(rho, axes.a_prime, axes.b_prime)
    )


def correlation_matrix(rho):
    rho = check_density_matrix(rho)
    return np.array([[correlation(rho, e1, e2) for e2 in np.eye(3)] for e1 in np.eye(3)])


@dataclass(frozen=True)
class ChshResult:
    value: float
    axes: MeasurementAxes
    singular_values: np.ndarray


def chsh_optimize(rho):
    """Maximal CHSH value 2 sqrt(s1^2 + s2^2) and axes attaining it.

    s1 >= s2 are the two largest singular values of the spin correlation
    matrix; the axes follow from its singular vectors.
    """
    t = correlation_matrix(rho)
    u, s, vt = np.linalg.svd(t)
    value = 2 * math.sqrt(s[0] ** 2 + s[1] ** 2)
    angle = math.atan2(s[1], s[0])
    v1, v2 = vt[0], vt[1]
    b = math.cos(angle) * v1 + math.sin(angle) * v2
    b_prime = math.cos(angle) * v1 - math.sin(angle) * v2
    axes = MeasurementAxes(u[:, 0], u[:, 1], b / np.linalg.norm(b), b_prime / np.linalg.norm(b_prime))
    return ChshResult(value, axes, s)


def _unit(theta, phi):
    return np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])


def chsh_search(rho, n_starts=12, seed=0):
    """Numerical maximum of :func:`chsh_value` over axes (cross-check of the closed form)."""
    rho = check_density_matrix(rho)
    rng = np.random.default_rng(seed)

    def neg(x):
        axes = [_unit(x[2 * k], x[2 * k + 1]) for k in range(4)]
        return -abs(
            correlation(rho, axes[0], axes[2])
            + correlation(rho, axes[1], axes[2])
            + correlation(rho, axes[0], axes[3])
            - correlation(rho, axes[1], axes[3])
        )

    best = 0.0
    for _ in range(n_starts):
        x0 = rng.uniform(0, 2 * math.pi, 8)
        res = minimize(neg, x0, method="BFGS")
        best = max(best, -res.fun)
    return float(best)


def strip_local_phases(amplitudes):
    """Remove global and local Z phases so the |00>, |01>, |10> amplitudes are real and non-negative.

    Local phases do not change entanglement; fixing them leaves the
    conditional phase on the |11> amplitude. Components below 1e-12 are
    skipped when choosing the phases.
    """
    a = np.asarray(amplitudes, dtype=complex).copy()
    if a.shape != (4,):
        raise ContractError("expected four qubit amplitudes")
    have = np.abs(a) > 1e-12
    ang = np.angle(a)
    g = ang[0] if have[0] else 0.0
    # phase(|ij>) -> phase - g - i*p - j*q
    q = ang[1] - g if have[1] else None
    p = ang[2] - g if have[2] else None
    if have[3] and (p is None) != (q is None):
        if p is None:
            p = ang[3] - g - q
        else:
            q = ang[3] - g - p
    p, q = p or 0.0, q or 0.0
    return a * np.exp(-1j * (g + np.array([0.0, q, p, p + q])))
