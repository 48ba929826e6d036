"""Compensating composite pulse sequences: synthesis, simulation and verification."""
from .errors import ErrorModel, ModelError, Pulse, UnsupportedPulseError, apply_sequence, imperfect
from .linalg import exp_su2, fidelity, infidelity, log_su2, rotation
from .sequences import FAMILIES, Sequence, SynthesisError, catalog, get_family

__version__ = "0.1.0"

__all__ = [
    "ErrorModel",
    "FAMILIES",
    "ModelError",
    "Pulse",
    "Sequence",
    "SynthesisError",
    "UnsupportedPulseError",
    "apply_sequence",
    "catalog",
    "exp_su2",
    "fidelity",
    "get_family",
    "imperfect",
    "infidelity",
    "log_su2",
    "rotation",
]
