"""Closed-form design estimates: decay rates, separation window, gate budget."""

from dataclasses import asdict, dataclass
import math

import numpy as np

from .errors import IncompleteParametersError
from .gate import gate_duration
from .units import CONSTANTS, NM

DEFAULT_RATIO = 1e3


def gamma_rot(params):
    """Spontaneous decay rate (1/s) of the N=2 -> N=0 storage transition, order-of-magnitude form."""
    params.require("b_rot")
    b = params.b_rot_joule
    c = CONSTANTS
    return c.coulomb_prefactor * 4 * params.mu_si**2 * b**3 / (3 * c.hbar**4 * c.c**3)


def gamma_vib(params):
    """Spontaneous decay rate (1/s) of the excited vibrational level."""
    params.require("omega_vib")
    w = params.omega_vib_rad_s
    c = CONSTANTS
    return c.coulomb_prefactor * 4 * params.mu_si**2 * w**3 / (3 * c.hbar * c.c**3)


def r_min(params, ratio=DEFAULT_RATIO):
    """Smallest separation (m) with r^3 = ratio * mu^2 / (4 pi eps0 3 B_rot)."""
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    params.require("b_rot")
    rhs = CONSTANTS.coulomb_prefactor * params.mu_si**2 / (3 * params.b_rot_joule)
    return (ratio * rhs) ** (1 / 3)


def r_max(params, ratio=DEFAULT_RATIO):
    """Largest separation (m) with r^3 = c^3 / (4 pi omega_vib^3 ratio)."""
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    w = params.require("omega_vib").omega_vib_rad_s
    return (CONSTANTS.c**3 / (4 * math.pi * w**3 * ratio)) ** (1 / 3)


def robustness(params, r):
    """Number of gates 1/(gamma_vib tau) within the vibrational lifetime."""
    return 1.0 / (gamma_vib(params) * gate_duration(params.mu_si, r))


@dataclass(frozen=True)
class FeasibilityRow:
    """One species of the design table.

    ``tau`` and ``robustness`` are evaluated at ``r_design_nm`` (default: the
    geometric mean of the window). Fields that need a missing molecular
    constant are ``None`` and ``partial`` is set.
    """

    name: str
    ratio: float
    r_min_nm: float | None
    r_max_nm: float | None
    gamma_rot: float | None
    gamma_vib: float | None
    r_design_nm: float | None
    tau: float | None
    robustness: float | None
    partial: bool = False

    def to_dict(self):
        return asdict(self)


def feasibility_row(params, ratio=DEFAULT_RATIO, r_design=None):
    def opt(fn, *a):
        try:
            return fn(*a)
        except IncompleteParametersError:
            return None

    lo, hi = opt(r_min, params, ratio), opt(r_max, params, ratio)
    if r_design is None and lo is not None and hi is not None:
        r_design = math.sqrt(lo * hi)
    g_vib = opt(gamma_vib, params)
    tau = gate_duration(params.mu_si, r_design) if r_design is not None else None
    return FeasibilityRow(
        name=params.name,
        ratio=ratio,
        r_min_nm=None if lo is None else lo / NM,
        r_max_nm=None if hi is None else hi / NM,
        gamma_rot=opt(gamma_rot, params),
        gamma_vib=g_vib,
        r_design_nm=None if r_design is None else r_design / NM,
        tau=tau,
        robustness=None if tau is None or g_vib is None else 1.0 / (g_vib * tau),
        partial=not params.complete,
    )


def feasibility_table(registry, ratio=DEFAULT_RATIO, r_design=None):
    """Rows for every species in ``registry`` (list or name -> params mapping), in order."""
    items = registry.values() if isinstance(registry, dict) else registry
    return [feasibility_row(p, ratio, r_design) for p in items]


@dataclass(frozen=True)
class SweepPoint:
    lambda_half_nm: float
    tau_s: float
    robustness: float


def sweep(params, lambda_range=None, n_points=None, lambdas_nm=None):
    """Gate duration and robustness versus lattice spacing r = lambda/2.

    Give either ``lambda_range=(lo, hi)`` in nm with ``n_points``, or an
    explicit sequence ``lambdas_nm``. Points come back ordered by lambda.
    """
    if lambdas_nm is None:
        if lambda_range is None or n_points is None:
            raise ValueError("give lambda_range and n_points, or lambdas_nm")
        lo, hi = lambda_range
        if not 0 < lo < hi or n_points < 2:
            raise ValueError("lambda range must be positive and increasing with at least two points")
        lambdas_nm = np.linspace(lo, hi, int(n_points))
    lambdas_nm = np.sort(np.asarray(lambdas_nm, dtype=float))
    if lambdas_nm.size == 0 or lambdas_nm[0] <= 0:
        raise ValueError("wavelengths must be positive")
    g = gamma_vib(params)
    out = []
    for lam in lambdas_nm:
        r = lam / 2 * NM
        tau = gate_duration(params.mu_si, r)
        out.append(SweepPoint(float(lam / 2), float(tau), float(1.0 / (g * tau))))
    return out
