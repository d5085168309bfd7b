"""Simulate the dipole-dipole phase gate between two polar molecules and estimate its feasibility."""

from .entangle import chsh_optimize, chsh_value, concurrence, entanglement_entropy
from .feasibility import feasibility_table, r_max, r_min, robustness, sweep
from .gate import gate_duration, gate_fidelity, run_gate
from .molecules import MoleculeParams, builtin_registry, load_registry, lookup
from .pairsys import PairBasis, PairState

__version__ = "0.1.0"

__all__ = [
    "MoleculeParams",
    "PairBasis",
    "PairState",
    "builtin_registry",
    "chsh_optimize",
    "chsh_value",
    "concurrence",
    "entanglement_entropy",
    "feasibility_table",
    "gate_duration",
    "gate_fidelity",
    "load_registry",
    "lookup",
    "r_max",
    "r_min",
    "robustness",
    "run_gate",
    "sweep",
]
