"""Exact unitary evolution through spectral decomposition."""

from dataclasses import dataclass
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import ContractError, SamplingError
from .pairsys import HermitianOperator, PairState
from .units import CONSTANTS


def _blocks(matrix):
    """Index sets of the connected components of the operator's coupling graph."""
    n_comp, labels = connected_components(csr_matrix(np.abs(matrix) > 0), directed=False)
    return [np.flatnonzero(labels == k) for k in range(n_comp)]


class Propagator:
    """U(t) = exp(-i H t / hbar) for a time-independent hermitian operator.

    Each block of H that is decoupled from the rest is diagonalized on its
    own after removing its mean diagonal energy, which keeps eigenvalue
    errors at the scale of the block's spread rather than of ``||H||``.
    """

    def __init__(self, h):
        if not isinstance(h, HermitianOperator):
            raise ContractError("Propagator needs a HermitianOperator")
        self.h = h
        self.basis = h.basis
        m = h.matrix
        self._blocks = []
        for idx in _blocks(m):
            sub = m[np.ix_(idx, idx)]
            shift = float(np.real(np.diag(sub)).mean())
            evals, evecs = np.linalg.eigh(sub - shift * np.eye(len(idx)))
            self._blocks.append((idx, shift, evals, evecs))

    @property
    def eigenvalues(self):
        vals = np.concatenate([shift + evals for _, shift, evals, _ in self._blocks])
        return np.sort(vals)

    def unitary(self, t):
        n = self.h.dim
        u = np.zeros((n, n), dtype=complex)
        for idx, shift, evals, evecs in self._blocks:
            phase = np.exp(-1j * (evals + shift) * t / CONSTANTS.hbar)
            u[np.ix_(idx, idx)] = (evecs * phase) @ evecs.conj().T
        return u

    def interaction_unitary(self, t, h_free):
        """exp(+i H_free t/hbar) exp(-i H t/hbar) for a diagonal ``h_free``.

        Block offsets cancel exactly between the two factors.
        """
        d = np.real(np.diag(h_free.matrix))
        if h_free.basis != self.basis:
            raise ContractError("free and full operators live on different bases")
        if np.abs(h_free.matrix - np.diag(d)).max(initial=0.0) > 0:
            raise ContractError("interaction_unitary requires a diagonal free Hamiltonian")
        n = self.h.dim
        u = np.zeros((n, n), dtype=complex)
        for idx, shift, evals, evecs in self._blocks:
            left = np.exp(1j * (d[idx] - shift) * t / CONSTANTS.hbar)
            phase = np.exp(-1j * evals * t / CONSTANTS.hbar)
            u[np.ix_(idx, idx)] = left[:, None] * ((evecs * phase) @ evecs.conj().T)
        return u


def evolve(state, prop, t):
    """U(t)|state>."""
    if state.basis != prop.basis:
        raise ContractError("state and propagator live on different bases")
    if t < 0:
        raise ValueError("evolution time must be non-negative")
    return PairState.normalized(state.basis, prop.unitary(t) @ state.amplitudes)


@dataclass(frozen=True)
class PhaseFit:
    slope: float  # rad/s
    residual: float  # rad, max deviation from the fitted line
    times: np.ndarray
    phases: np.ndarray
    min_overlap: float


def rotational_grid(b_rot, n_periods, samples_per_period=16):
    """Uniform time grid spanning an integer number of rotational periods pi*hbar/B."""
    t_rot = CONSTANTS.hbar * math.pi / b_rot
    return np.linspace(0.0, n_periods * t_rot, int(n_periods * samples_per_period) + 1)


def interaction_phase(state, h_full, h_free, t_grid, t_rot=None, min_periods=10):
    """Phase of <psi_free(t)|psi_full(t)> along ``t_grid`` and its slope.

    The slope comes from a least-squares line through the origin fitted to
    the unwrapped phase.

    Raises
    ------
    SamplingError
        If the grid is too coarse for unambiguous unwrapping or the overlap
        passes too close to zero.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2 or np.any(np.diff(t_grid) <= 0) or t_grid[0] < 0:
        raise ValueError("t_grid must be strictly increasing, non-negative, with at least two points")
    if t_rot is not None and t_grid[-1] - t_grid[0] < min_periods * t_rot * (1 - 1e-12):
        raise ValueError(f"t_grid must span at least {min_periods} rotational periods")
    if state.basis != h_full.basis or state.basis != h_free.basis:
        raise ContractError("state and operators live on different bases")

    v_norm = np.linalg.norm(h_full.matrix - h_free.matrix, 2)
    prop = Propagator(h_full)
    diag_free = np.abs(h_free.matrix - np.diag(np.diag(h_free.matrix))).max(initial=0.0) == 0
    if not diag_free:
        prop_free = Propagator(h_free)

    psi = state.amplitudes
    overlaps = np.empty(t_grid.size, dtype=complex)
    for k, t in enumerate(t_grid):
        if diag_free:
            overlaps[k] = np.vdot(psi, prop.interaction_unitary(t, h_free) @ psi)
        else:
            overlaps[k] = np.vdot(prop_free.unitary(t) @ psi, prop.unitary(t) @ psi)

    mags = np.abs(overlaps)
    min_overlap = float(mags.min())
    if min_overlap < 1e-6:
        raise SamplingError(f"overlap with the free evolution nearly vanishes ({min_overlap:.2e}); phase undefined")
    max_step = v_norm * np.diff(t_grid).max() / (CONSTANTS.hbar * min_overlap)
    if max_step > math.pi:
        raise SamplingError(f"phase may advance {max_step:.2f} rad between samples; use a denser grid")

    phases = np.unwrap(np.angle(overlaps))
    slope = float(np.dot(t_grid, phases) / np.dot(t_grid, t_grid))
    residual = float(np.abs(phases - slope * t_grid).max())
    return PhaseFit(slope, residual, t_grid, phases, min_overlap)
