"""Physical constants and the handful of unit conversions used throughout.

Everything inside the package is SI. Spectroscopic inputs (cm^-1, Debye,
nm, bohr) are converted at the boundary with the helpers below.
"""

from dataclasses import dataclass
import math

from scipy import constants as _sc


@dataclass(frozen=True)
class Constants:
    hbar: float
    h: float
    c: float
    eps0: float
    coulomb_prefactor: float  # 1/(4 pi eps0)
    debye: float  # C m per Debye
    bohr: float  # m per bohr
    hc: float  # J cm, converts wavenumbers in cm^-1 to energy

    def __post_init__(self):
        for name, value in vars(self).items():
            if not value > 0:
                raise ValueError(f"constant {name} must be positive, got {value}")


CONSTANTS = Constants(
    hbar=_sc.hbar,
    h=_sc.h,
    c=_sc.c,
    eps0=_sc.epsilon_0,
    coulomb_prefactor=1.0 / (4.0 * math.pi * _sc.epsilon_0),
    debye=1e-21 / _sc.c,
    bohr=_sc.physical_constants["Bohr radius"][0],
    hc=_sc.h * _sc.c * 100.0,
)

NM = 1e-9


def _check_nonnegative(value, what):
    if value < 0:
        raise ValueError(f"{what} must be non-negative, got {value}")


def wavenumber_to_energy(v_tilde):
    """Energy in J of a wavenumber given in cm^-1."""
    _check_nonnegative(v_tilde, "wavenumber")
    return v_tilde * CONSTANTS.hc


def wavenumber_to_angular_frequency(v_tilde):
    """Angular frequency 2*pi*c*v in rad/s of a wavenumber given in cm^-1."""
    _check_nonnegative(v_tilde, "wavenumber")
    return 2.0 * math.pi * CONSTANTS.c * 100.0 * v_tilde


def energy_to_wavenumber(energy):
    return energy / CONSTANTS.hc


def debye_to_si(mu):
    """Dipole moment in C m of a value given in Debye."""
    _check_nonnegative(mu, "dipole moment")
    return mu * CONSTANTS.debye


def nm_to_m(x):
    _check_nonnegative(x, "length")
    return x * NM


def bohr_to_m(x):
    _check_nonnegative(x, "length")
    return x * CONSTANTS.bohr
