"""Single-molecule rigid-rotor levels and angular matrix elements (M = 0)."""

import math
from typing import NamedTuple

import numpy as np
from scipy.special import eval_legendre

from .units import CONSTANTS


class LevelLabel(NamedTuple):
    """Rotational quantum number ``N`` (projection 0) and vibrational index ``v``."""

    N: int
    v: int = 0

    def validate(self):
        if int(self.N) != self.N or int(self.v) != self.v or self.N < 0 or self.v < 0:
            raise ValueError(f"invalid level label {tuple(self)}")
        return self

    def __str__(self):
        return f"|{self.N},v{self.v}>"


def rot_energy(N, b_rot):
    """Rigid-rotor energy ``b_rot * N(N+1)`` in the units of ``b_rot``."""
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    return b_rot * N * (N + 1)


def level_energy(label, params):
    """Rotational plus harmonic vibrational energy of a level, in J."""
    label = LevelLabel(*label).validate()
    hbar_omega = CONSTANTS.hbar * params.omega_vib_rad_s
    return rot_energy(label.N, params.b_rot_joule) + hbar_omega * (label.v + 0.5)


def cos_theta_element(N, N_prime):
    """<N',0|cos(theta)|N,0>; nonzero only for |N - N'| = 1."""
    if N < 0 or N_prime < 0:
        raise ValueError("rotational quantum numbers must be >= 0")
    if abs(N - N_prime) != 1:
        return 0.0
    k = max(N, N_prime)
    return k / math.sqrt((2 * k - 1) * (2 * k + 1))


def y_n0(N, theta):
    """Spherical harmonic Y_{N,0}(theta) (independent of phi)."""
    theta = np.asarray(theta, dtype=float)
    return math.sqrt((2 * N + 1) / (4 * math.pi)) * eval_legendre(N, np.cos(theta))


def _sin_trig_integrals(N, N_prime, n_theta, n_phi):
    # int Y_N'0 Y_N0 sin(theta) {cos phi, sin phi} dOmega on a product grid:
    # Gauss-Legendre in cos(theta), periodic trapezoid in phi.
    x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    w_phi = 2 * np.pi / n_phi
    theta = np.arccos(x)
    radial = w * y_n0(N_prime, theta) * y_n0(N, theta) * np.sqrt(1 - x**2)
    cx = (radial[:, None] * np.cos(phi)[None, :] * w_phi).sum()
    sy = (radial[:, None] * np.sin(phi)[None, :] * w_phi).sum()
    return cx, sy


def azimuthal_term_element(N1, N1_prime, N2, N2_prime, n_theta=48, n_phi=16):
    """<N1' N2'| sin(t1) sin(t2) cos(p1 - p2) |N1 N2> between M=0 product states.

    Evaluated by quadrature; cos(p1 - p2) = cos p1 cos p2 + sin p1 sin p2
    splits the four-angle integral into products of single-molecule ones.
    """
    c1, s1 = _sin_trig_integrals(N1, N1_prime, n_theta, n_phi)
    c2, s2 = _sin_trig_integrals(N2, N2_prime, n_theta, n_phi)
    return float(c1 * c2 + s1 * s2)
