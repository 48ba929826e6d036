"""Systematic control-error models and imperfect pulse propagators."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any

import numpy as np

from .linalg import IDENTITY, compose, exp_su2

if TYPE_CHECKING:
    from .sequences import Sequence


class UnsupportedPulseError(ValueError):
    """A pulse axis the error model cannot realise."""


class ModelError(ValueError):
    """Unknown model name or malformed parameters."""


@dataclass(frozen=True)
class Pulse:
    """Square pulse: rotation by ``theta`` about an axis with phase ``phi``.

    ``axis`` is ``"planar"`` (axis in the x-y plane), ``"z"`` or ``"tilted"``
    (lifted out of the plane by ``elevation``; only produced by retargeting).
    """

    theta: float
    phi: float = 0.0
    axis: str = "planar"
    elevation: float = 0.0

    def direction(self) -> np.ndarray:
        if self.axis == "planar":
            return np.array([math.cos(self.phi), math.sin(self.phi), 0.0])
        if self.axis == "z":
            return np.array([0.0, 0.0, 1.0])
        ce = math.cos(self.elevation)
        return np.array(
            [ce * math.cos(self.phi), ce * math.sin(self.phi), math.sin(self.elevation)]
        )

    def vector(self) -> np.ndarray:
        """Ideal rotation vector ``theta * axis``."""
        return self.theta * self.direction()

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"theta": self.theta, "phi": self.phi, "axis": self.axis}
        if self.axis == "tilted":
            d["elevation"] = self.elevation
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Pulse":
        return cls(
            float(d["theta"]),
            float(d.get("phi", 0.0)),
            d.get("axis", "planar"),
            float(d.get("elevation", 0.0)),
        )


# model name -> parameter names
MODEL_PARAMS: dict[str, tuple[str, ...]] = {
    "amplitude": ("eps",),
    "pulse_length": ("eps",),
    "addressing": ("eps", "addressed"),
    "detuning": ("delta",),
    "amplitude_detuning": ("eps", "delta"),
    "pulse_length_detuning": ("eps", "delta"),
    "ising": ("eps",),
}

# models with a single error parameter entering linearly in the generator
LINEAR_MODELS = ("amplitude", "pulse_length", "addressing", "detuning")

_ALIASES = {
    "pulse-length": "pulse_length",
    "amplitude-detuning": "amplitude_detuning",
    "pulse-length-detuning": "pulse_length_detuning",
    "ising-coupling": "ising",
}


def canonical_model_name(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in MODEL_PARAMS:
        raise ModelError(f"unknown error model {name!r}")
    return name


@dataclass(frozen=True)
class ErrorModel:
    """Tagged systematic-error model.

    ``eps`` is the amplitude / pulse-length / addressing / Ising parameter,
    ``delta`` the dimensionless detuning (offset over Rabi frequency).
    For ``addressing`` the flag ``addressed`` selects which spin is simulated;
    an unaddressed spin sees ``rotation(theta * eps, phi)``.
    """

    name: str
    eps: complex | float = 0.0
    delta: complex | float = 0.0
    addressed: bool = False
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "name", canonical_model_name(self.name))

    # -- constructors --------------------------------------------------
    @classmethod
    def amplitude(cls, eps: float) -> "ErrorModel":
        return cls("amplitude", eps=eps)

    @classmethod
    def pulse_length(cls, eps: float) -> "ErrorModel":
        return cls("pulse_length", eps=eps)

    @classmethod
    def addressing(cls, eps: float, addressed: bool = False) -> "ErrorModel":
        return cls("addressing", eps=eps, addressed=addressed)

    @classmethod
    def detuning(cls, delta: float) -> "ErrorModel":
        return cls("detuning", delta=delta)

    @classmethod
    def amplitude_detuning(cls, eps: float, delta: float) -> "ErrorModel":
        return cls("amplitude_detuning", eps=eps, delta=delta)

    @classmethod
    def pulse_length_detuning(cls, eps: float, delta: float) -> "ErrorModel":
        return cls("pulse_length_detuning", eps=eps, delta=delta)

    # -- properties ----------------------------------------------------
    @property
    def is_linear(self) -> bool:
        return self.name in LINEAR_MODELS

    @property
    def planar_only(self) -> bool:
        return self.name == "addressing"

    @property
    def strength(self) -> complex | float:
        """The single error parameter of a linear model."""
        return self.delta if self.name == "detuning" else self.eps

    @property
    def out_of_regime(self) -> bool:
        return any(abs(x) >= 1 for x in (self.eps, self.delta))

    def with_strength(self, value) -> "ErrorModel":
        """Same model with its (single) error parameter replaced."""
        if self.name == "detuning":
            return replace(self, delta=value)
        return replace(self, eps=value)

    # -- propagators ---------------------------------------------------
    def linear_parts(self, p: Pulse) -> tuple[np.ndarray, np.ndarray]:
        """``(ideal, direction)`` with ``imperfect = exp_su2(ideal + s * direction)``.

        ``s`` is :attr:`strength`. Only defined for linear models.
        """
        if not self.is_linear:
            raise ModelError(f"{self.name} is not a single-parameter linear model")
        self._check(p)
        v = p.vector()
        if self.name in ("amplitude", "pulse_length"):
            return v, v
        if self.name == "detuning":
            return v, np.array([0.0, 0.0, p.theta])
        if self.addressed:
            return v, np.zeros(3)
        return np.zeros(3), v

    def generator(self, p: Pulse) -> np.ndarray:
        """Rotation vector of the imperfect pulse."""
        self._check(p)
        v = p.vector()
        if self.name in ("amplitude", "pulse_length", "ising"):
            return v * (1 + self.eps)
        if self.name == "addressing":
            return v if self.addressed else v * self.eps
        z = np.array([0.0, 0.0, p.theta])
        if self.name == "detuning":
            return v + self.delta * z
        if self.name == "amplitude_detuning":
            return v * (1 + self.eps) + self.delta * z
        # pulse_length_detuning: (u_z + delta)(1 + eps) couples both errors
        return (v + self.delta * z) * (1 + self.eps)

    def ideal(self, p: Pulse) -> np.ndarray:
        if self.name == "addressing" and not self.addressed:
            return IDENTITY.copy()
        return exp_su2(p.vector())

    def _check(self, p: Pulse) -> None:
        if self.planar_only and p.axis != "planar":
            raise UnsupportedPulseError(
                f"{p.axis} pulse cannot be realised under the {self.name} model"
            )

    # -- serialisation -------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        params: dict[str, Any] = {}
        for k in MODEL_PARAMS[self.name]:
            val = getattr(self, k)
            params[k] = val if isinstance(val, bool) else float(np.real(val))
        return {"model": self.name, "params": params}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ErrorModel":
        name = canonical_model_name(d["model"])
        params = dict(d.get("params", {}))
        unknown = set(params) - set(MODEL_PARAMS[name])
        if unknown:
            raise ModelError(f"unexpected parameters for {name}: {sorted(unknown)}")
        return cls(name, **params)


def imperfect(p: Pulse, m: ErrorModel) -> np.ndarray:
    """Propagator of pulse ``p`` deformed by the error model ``m``."""
    return exp_su2(m.generator(p))


def apply_sequence(s: "Sequence", m: ErrorModel) -> np.ndarray:
    """Imperfect propagator of a whole sequence (first pulse applied first)."""
    real = not any(np.iscomplexobj(x) for x in (m.eps, m.delta))
    return compose((imperfect(p, m) for p in s.pulses), renormalize=real)


def ideal_target(s: "Sequence", m: ErrorModel) -> np.ndarray:
    """Gate the sequence should produce for the spin simulated under ``m``."""
    if m.name == "addressing" and not m.addressed:
        return IDENTITY.copy()
    return s.target
