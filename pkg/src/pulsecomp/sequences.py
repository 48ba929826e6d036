"""Compensating pulse-sequence families.

Pulse lists are in application order: ``pulses[0]`` acts first, so the
ideal product is ``U_m ... U_2 U_1``. A "correction block prepended" to a
sequence in operator notation therefore appears at the *end* of the list.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np
from scipy.optimize import least_squares

from .errors import ErrorModel, Pulse, UnsupportedPulseError
from .expansion import ExtractionError, sequence_error_series
from .linalg import (
    compose,
    euler_decompose,
    exp_su2,
    fidelity,
    log_su2,
    rotation,
    so3,
)

TWO_PI = 2 * np.pi
MAX_SK_ORDER = 4
MAX_TS_LEVEL = 3


class SynthesisError(ValueError):
    """Invalid synthesis parameters (angle out of range, order cap, ...)."""


class UnsupportedRetargetError(UnsupportedPulseError):
    """Retargeting would need pulse axes the error model cannot realise."""


@dataclass(frozen=True, eq=False)
class Sequence:
    """Ordered pulse train with the gate it is meant to implement.

    ``model_orders`` maps error-model names to the claimed cancellation
    order; ``order_claim`` is the order under the first (declared) model.
    """

    pulses: tuple[Pulse, ...]
    target: np.ndarray
    family: str
    order_claim: int = 0
    model_orders: dict[str, int] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if self.order_claim < 0:
            raise ValueError("order_claim must be non-negative")

    def __len__(self) -> int:
        return len(self.pulses)

    @property
    def declared_model(self) -> str | None:
        return next(iter(self.model_orders), None)

    def order_for(self, model: str) -> int:
        return self.model_orders.get(model, 0)

    def ideal(self) -> np.ndarray:
        return compose(exp_su2(p.vector()) for p in self.pulses)

    def then(self, other: "Sequence", family: str | None = None) -> "Sequence":
        """``other`` applied after ``self``; orders combine by minimum."""
        orders = {
            k: min(v, other.model_orders[k])
            for k, v in self.model_orders.items()
            if k in other.model_orders
        }
        return Sequence(
            self.pulses + other.pulses,
            other.target @ self.target,
            family or f"{self.family}+{other.family}",
            min(orders.values()) if orders else 0,
            orders,
        )

    # -- serialisation -------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "target": [[[float(z.real), float(z.imag)] for z in row] for row in self.target],
            "order_claim": self.order_claim,
            "model_orders": dict(self.model_orders),
            "pulses": [p.to_dict() for p in self.pulses],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Sequence":
        pulses = [Pulse.from_dict(p) for p in d["pulses"]]
        if "target" in d:
            target = np.array([[complex(re, im) for re, im in row] for row in d["target"]])
        else:
            target = compose(exp_su2(p.vector()) for p in pulses)
        return cls(
            tuple(pulses),
            target,
            d.get("family", "custom"),
            int(d.get("order_claim", 0)),
            dict(d.get("model_orders", {})),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_text(self) -> str:
        """One-line ``theta@phi`` form (planar pulses only)."""
        parts = []
        for p in self.pulses:
            if p.axis != "planar":
                raise ValueError("text format holds planar pulses only")
            parts.append(f"{p.theta!r}@{p.phi!r}")
        return " ".join(parts)

    @classmethod
    def from_text(cls, text: str, family: str = "custom") -> "Sequence":
        pulses = []
        for tok in text.split():
            th, _, ph = tok.partition("@")
            pulses.append(Pulse(float(th), float(ph or 0.0)))
        target = compose(exp_su2(p.vector()) for p in pulses)
        return cls(tuple(pulses), target, family)


def _planar(theta: float, phi: float) -> Pulse:
    """Planar pulse with a non-negative angle (negative angles flip the axis)."""
    if theta < 0:
        return Pulse(-theta, phi + np.pi)
    return Pulse(theta, phi)


def _check_range(theta: float, limit: float, name: str) -> None:
    if not np.isfinite(theta) or theta < 0 or theta > limit * (1 + 1e-15):
        raise SynthesisError(f"{name}: theta={theta!r} outside [0, {limit:.6g}]")


# -- plain and Solovay-Kitaev ------------------------------------------------


def plain(theta: float, phi: float = 0.0) -> Sequence:
    """The uncompensated single pulse."""
    return Sequence(
        (Pulse(theta, phi),),
        rotation(theta, phi),
        "plain",
        0,
        {"amplitude": 0, "pulse_length": 0, "addressing": 0, "detuning": 0},
    )


_PASSBAND = ("amplitude", "pulse_length", "addressing")


def sk1_phase(theta: float) -> float:
    return math.acos(-theta / (4 * np.pi))


def sk1(theta: float, phi: float = 0.0) -> Sequence:
    _check_range(theta, 4 * np.pi, "sk1")
    p = sk1_phase(theta)
    pulses = (Pulse(theta, phi), Pulse(TWO_PI, phi + p), Pulse(TWO_PI, phi - p))
    return Sequence(
        pulses,
        rotation(theta, phi),
        "sk1",
        1,
        dict.fromkeys(_PASSBAND, 1),
        {"theta": theta, "phi": phi, "phase": p},
    )


def s_block(alpha: float, psi: float) -> list[Pulse]:
    """Two full-turn pulses whose error vectors sum to ``alpha`` along ``psi``.

    Under amplitude, pulse-length or (unaddressed) addressing errors the pair
    acts as ``exp_su2(eps * alpha * (cos psi, sin psi, 0)) + O(eps^2)``, and
    ``s_block(-alpha, psi)`` is its exact inverse.
    """
    a = max(1, math.ceil(abs(alpha) / (4 * np.pi)))
    ph = math.acos(alpha / (4 * np.pi * a))
    return [Pulse(TWO_PI * a, psi + ph), Pulse(TWO_PI * a, psi - ph)]


def rhombus_phase(theta: float, sign: int = -1) -> float:
    """Phase of the four-pulse rhombus correction.

    The printed phase ``arcsin(sin(2 phi)/2)`` has the wrong orientation: it
    doubles the second-order term instead of cancelling it. ``sign=-1``
    (default) gives the cancelling phase, ``sign=+1`` the printed one.
    """
    return sign * math.asin(math.sin(2 * sk1_phase(theta)) / 2)


def sk2(theta: float, variant: str = "standard", printed_rhombus: bool = False) -> Sequence:
    """Second-order passband sequence: a correction block after :func:`sk1`."""
    base = sk1(theta)
    p = sk1_phase(theta)
    if variant == "standard":
        c, s = 2 * np.pi * math.cos(p), 2 * np.pi * math.sin(p)
        block = (
            s_block(-s, np.pi / 2)
            + s_block(c, 0.0)
            + s_block(s, np.pi / 2)
            + s_block(-c, 0.0)
        )
    elif variant == "rhombus":
        g = rhombus_phase(theta, +1 if printed_rhombus else -1)
        block = [
            Pulse(TWO_PI, np.pi),
            Pulse(TWO_PI, g),
            Pulse(TWO_PI, 0.0),
            Pulse(TWO_PI, g + np.pi),
        ]
    else:
        raise SynthesisError(f"unknown sk2 variant {variant!r}")
    orders = dict.fromkeys(_PASSBAND, 1 if printed_rhombus else 2)
    return Sequence(
        base.pulses + tuple(block),
        base.target,
        f"sk2-{variant}",
        orders["amplitude"],
        orders,
        {"theta": theta, "variant": variant},
    )


def inverse_block(pulses: list[Pulse]) -> list[Pulse]:
    """Exact inverse under amplitude, pulse-length and addressing errors."""
    return [Pulse(p.theta, p.phi + np.pi) for p in reversed(pulses)]


def pure_error_block(w: np.ndarray, j: int) -> list[Pulse]:
    """Full-turn pulses acting as ``exp_su2(eps**j * w) + O(eps**(j+1))``.

    Built from :func:`s_block` pairs by nested balanced group commutators
    whose inverse factors are exact inverses, so the lower-order terms of
    the factors cancel. With planar pulses only, odd ``j`` needs a planar
    ``w`` and even ``j`` a ``w`` along z.
    """
    w = np.asarray(w, dtype=float)
    norm = np.linalg.norm(w)
    if j == 1:
        if abs(w[2]) > 1e-9 * max(norm, 1.0):
            raise ExtractionError("first-order block cannot have a z component")
        return s_block(float(np.hypot(w[0], w[1])), math.atan2(w[1], w[0]))
    if norm == 0:
        return []
    if j % 2 == 0:
        if np.hypot(w[0], w[1]) > 1e-9 * norm:
            raise ExtractionError(f"order-{j} term is not along z")
        r = math.sqrt(abs(w[2]))
        u = np.array([r, 0.0, 0.0])
        v = np.array([0.0, math.copysign(r, w[2]), 0.0])
    else:
        if abs(w[2]) > 1e-9 * norm:
            raise ExtractionError(f"order-{j} term is not planar")
        r = math.sqrt(norm)
        u = r * np.cross([0.0, 0.0, 1.0], w / norm)
        v = np.array([0.0, 0.0, r])
    # written P1(u)^-1 P(v)^-1 P1(u) P(v); listed in application order
    pv = pure_error_block(v, j - 1)
    pu = pure_error_block(u, 1)
    return pv + pu + inverse_block(pv) + inverse_block(pu)


def sk_n(n: int, theta: float, model: str = "amplitude") -> Sequence:
    """Order-``n`` Solovay-Kitaev sequence seeded by :func:`sk1`.

    Each level measures the leading lab-frame error coefficient of the
    current sequence under ``model`` and appends a pure-error block that
    cancels it.
    """
    if not 1 <= n <= MAX_SK_ORDER:
        raise SynthesisError(f"sk_n order must be in 1..{MAX_SK_ORDER}")
    seq = sk1(theta)
    m = ErrorModel(model)
    if m.name not in _PASSBAND:
        raise SynthesisError(f"sk_n supports {_PASSBAND}, not {m.name}")
    for k in range(1, n):
        coeffs = sequence_error_series(seq, m, k + 1)
        residual = max((np.linalg.norm(c) for c in coeffs[:k]), default=0.0)
        if residual > 1e-7:
            raise ExtractionError(
                f"level {k} sequence still has low-order error {residual:.3g}"
            )
        block = pure_error_block(-coeffs[k], k + 1)
        seq = Sequence(seq.pulses + tuple(block), seq.target, "skn")
    orders = dict.fromkeys(_PASSBAND, n)
    return Sequence(
        seq.pulses, seq.target, f"sk{n}" if n > 1 else "sk1", n, orders,
        {"theta": theta, "n": n, "model": m.name},
    )


# -- Wimperis and Trotter-Suzuki ---------------------------------------------


_WIMPERIS_ORDERS = {
    "B2": {"amplitude": 2, "pulse_length": 2},
    "N2": {"addressing": 2},
    "P2": {"amplitude": 2, "pulse_length": 2, "addressing": 2},
}


def wimperis(kind: str, theta: float) -> Sequence:
    kind = kind.upper()
    if kind in ("B2", "N2"):
        _check_range(theta, 4 * np.pi, kind)
        p = math.acos(-theta / (4 * np.pi))
        if kind == "B2":
            corr = [Pulse(np.pi, p), Pulse(TWO_PI, 3 * p), Pulse(np.pi, p)]
        else:
            corr = [Pulse(np.pi, p), Pulse(TWO_PI, -p), Pulse(np.pi, p)]
    elif kind == "P2":
        _check_range(theta, 8 * np.pi, kind)
        p = math.acos(-theta / (8 * np.pi))
        corr = [Pulse(TWO_PI, p), Pulse(TWO_PI, -p), Pulse(TWO_PI, -p), Pulse(TWO_PI, p)]
    else:
        raise SynthesisError(f"unknown Wimperis kind {kind!r}")
    orders = dict(_WIMPERIS_ORDERS[kind])
    return Sequence(
        (Pulse(theta, 0.0), *corr),
        rotation(theta, 0.0),
        kind.lower(),
        2,
        orders,
        {"theta": theta, "phase": p},
    )


def ts_factor(kind: str, j: int) -> int:
    """Phase factor ``f_j`` with ``f_j = (2**(2j-1) - 2) f_{j-1}``."""
    f = 4 if kind.upper() == "P" else 2
    for i in range(2, j + 1):
        f *= 2 ** (2 * i - 1) - 2
    return f


def printed_ts_factor(kind: str, j: int) -> int:
    """The ``(2**(2j-1) - 1)`` recursion; kept only to show it fails."""
    f = 4 if kind.upper() == "P" else 2
    for i in range(2, j + 1):
        f *= 2 ** (2 * i - 1) - 1
    return f


def _t1(k: float, phi: float) -> list[Pulse]:
    # written M(2k pi, -phi) M(2k pi, phi)
    return [_planar(TWO_PI * k, phi), _planar(TWO_PI * k, -phi)]


def _t2(kind: str, k: int, phi: float, printed_odd: bool) -> list[Pulse]:
    if kind == "P":
        return _t1(k, phi) + _t1(k, -phi)
    if kind == "N" or k % 2 == 0:
        # T1(k/2, -phi) T1(k/2, phi) with the adjacent equal pulses merged
        return [_planar(np.pi * k, phi), _planar(TWO_PI * k, -phi), _planar(np.pi * k, phi)]
    if printed_odd:
        # written M(k pi, phi) M(k pi, 3 phi) M(k pi, 3 phi)
        return [_planar(np.pi * k, 3 * phi), _planar(np.pi * k, 3 * phi), _planar(np.pi * k, phi)]
    return [_planar(np.pi * k, phi), _planar(TWO_PI * k, 3 * phi), _planar(np.pi * k, phi)]


def ts_block(kind: str, j: int, k: int, phi: float, printed_odd: bool = False) -> list[Pulse]:
    """Correction block ``T_{2j}(k, phi)`` in application order."""
    if j == 1:
        return _t2(kind, k, phi, printed_odd)
    inner = ts_block(kind, j - 1, k, phi, printed_odd)
    reps = 2 ** (2 * j - 2)
    middle = ts_block(kind, j - 1, -2 * k, phi, printed_odd)
    return inner * reps + middle + inner * reps


_TS_ORDERS = {
    "B": ("amplitude", "pulse_length"),
    "N": ("addressing",),
    "P": ("amplitude", "pulse_length", "addressing"),
}


def trotter_suzuki(
    kind: str,
    j: int,
    theta: float,
    printed_odd: bool = False,
    factor: int | None = None,
) -> Sequence:
    """Order-``2j`` Trotter-Suzuki sequence of the B, N or P family.

    ``factor`` overrides ``f_j`` (used to test alternative recursions);
    ``printed_odd`` selects the literal odd-k B motif.
    """
    kind = kind.upper()
    if kind not in _TS_ORDERS:
        raise SynthesisError(f"unknown Trotter-Suzuki family {kind!r}")
    if not 1 <= j <= MAX_TS_LEVEL:
        raise SynthesisError(f"level j must be in 1..{MAX_TS_LEVEL}")
    f = ts_factor(kind, j) if factor is None else factor
    _check_range(theta, TWO_PI * f, f"{kind}{2 * j}")
    phi = math.acos(-theta / (TWO_PI * f))
    order = 2 * j
    if kind == "B" and printed_odd:
        order = 0
    return Sequence(
        (Pulse(theta, 0.0), *ts_block(kind, j, 1, phi, printed_odd)),
        rotation(theta, 0.0),
        f"{kind.lower()}{2 * j}",
        order,
        dict.fromkeys(_TS_ORDERS[kind], order),
        {"theta": theta, "j": j, "phase": phi, "factor": f},
    )


# -- CORPSE family -----------------------------------------------------------


def corpse_angles(theta: float, n1: int = 1, n2: int = 1, n3: int = 0) -> tuple[float, float, float]:
    k = math.asin(math.sin(theta / 2) / 2)
    return (
        TWO_PI * n1 + theta / 2 - k,
        TWO_PI * n2 - 2 * k,
        TWO_PI * n3 + theta / 2 - k,
    )


def corpse(theta: float, n1: int = 1, n2: int = 1, n3: int = 0) -> Sequence:
    t1, t2, t3 = corpse_angles(theta, n1, n2, n3)
    if min(t1, t2, t3) < 0:
        raise SynthesisError(
            f"corpse: negative pulse angle for theta={theta!r}, n=({n1},{n2},{n3})"
        )
    return Sequence(
        (Pulse(t1, 0.0), Pulse(t2, np.pi), Pulse(t3, 0.0)),
        rotation(theta, 0.0),
        "corpse",
        1,
        {"detuning": 1},
        {"theta": theta, "n": (n1, n2, n3)},
    )


def _b2_segment(x: float, psi: float) -> list[Pulse]:
    p = math.acos(-x / (4 * np.pi))
    return [Pulse(x, psi), Pulse(np.pi, psi + p), Pulse(TWO_PI, psi + 3 * p), Pulse(np.pi, psi + p)]


def b2corpse(theta: float) -> Sequence:
    """CORPSE with each segment replaced by a B2 sequence for that segment."""
    t1, t2, t3 = corpse_angles(theta)
    for t in (t1, t2, t3):
        _check_range(t, 4 * np.pi, "b2corpse segment")
    pulses = _b2_segment(t1, 0.0) + _b2_segment(t2, np.pi) + _b2_segment(t3, 0.0)
    return Sequence(
        tuple(pulses),
        rotation(theta, 0.0),
        "b2corpse",
        2,
        {"amplitude": 2, "pulse_length": 2, "detuning": 1},
        {"theta": theta},
    )


def flip_block(a: float, psi: float) -> list[Pulse]:
    """Pulse pair ``(a, psi), (a, psi + pi)``: ideal identity.

    Under detuning the pair's logarithm is odd in ``delta``; its first-order
    vector is :func:`flip_vector`.
    """
    return [Pulse(a, psi), Pulse(a, psi + np.pi)]


def flip_vector(a: float, psi: float) -> np.ndarray:
    """First-order detuning vector of :func:`flip_block`."""
    perp = np.array([math.sin(psi), -math.cos(psi), 0.0])
    return 2 * (math.sin(a) * np.array([0.0, 0.0, 1.0]) - (1 - math.cos(a)) * perp)


def _solve_flip_pair(target: np.ndarray) -> tuple[int, np.ndarray]:
    """Find ``r, (a1, psi1, a2, psi2)`` with ``r**2 * u x w = target``."""
    tnorm = np.linalg.norm(target)
    if abs(target[2]) <= 1e-9 * tnorm + 1e-14:
        # half-turn w = -4 perp(psi) and a small flip sharing psi give
        # u x w = -8 sin(a1) n(psi): exact for any planar target
        r = max(1, math.ceil(math.sqrt(tnorm / 8)))
        psi = math.atan2(target[1], target[0]) + np.pi
        return r, np.array([math.asin(tnorm / (8 * r * r)), psi, np.pi, psi])
    # |u x w| <= 16 for a single flip block per factor
    r = max(1, math.ceil(math.sqrt(tnorm / 8)))
    starts = [(2.0, 0.3, 2.0, 1.9), (1.0, 0.0, 2.5, 2.0), (2.5, -1.0, 1.5, 1.0), (1.5, 2.0, 2.2, -2.5)]
    while r < 64:
        goal = target / r**2

        def f(x):
            u = flip_vector(x[0], x[1])
            w = flip_vector(x[2], x[3])
            return np.cross(u, w) - goal

        for x0 in starts:
            sol = least_squares(f, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
            ok_range = all(0.05 < a < TWO_PI - 0.05 for a in (sol.x[0], sol.x[2]))
            if np.linalg.norm(f(sol.x)) < 1e-13 * max(1.0, tnorm) and ok_range:
                return r, sol.x
        r += 1
    raise ExtractionError("could not synthesise the second-order detuning correction")


def corpse2(theta: float) -> Sequence:
    """Second-order detuning-compensated CORPSE.

    The seed's measured second-order lab-frame term is cancelled by a
    balanced group commutator of two :func:`flip_block` factors (each
    repeated ``r`` times); both factors have no second-order term of their
    own, so the commutator's leading term is exactly their cross product.
    """
    seed = corpse(theta)
    c1, c2 = sequence_error_series(seed, ErrorModel.detuning(0.0), 2)
    if np.linalg.norm(c1) > 1e-8:
        raise ExtractionError(f"seed first-order term {np.linalg.norm(c1):.3g} not closed")
    if np.linalg.norm(c2) < 1e-14:
        block: list[Pulse] = []
    else:
        r, (a1, p1, a2, p2) = _solve_flip_pair(-c2)
        u_fwd = flip_block(a1, p1) * r
        w_fwd = flip_block(a2, p2) * r
        u_inv = flip_block(TWO_PI - a1, p1 + np.pi) * r
        w_inv = flip_block(TWO_PI - a2, p2 + np.pi) * r
        # written P(-u) P(-w) P(u) P(w)
        block = w_fwd + u_fwd + w_inv + u_inv
    return Sequence(
        seed.pulses + tuple(block),
        seed.target,
        "corpse2",
        2,
        {"detuning": 2},
        {"theta": theta},
    )


# -- retargeting and Euler concatenation -------------------------------------


def _axis_for(U_T: np.ndarray, theta: float) -> np.ndarray:
    v = log_su2(U_T)
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        return np.array([1.0, 0.0, 0.0])
    n = v / nv
    best = min(
        (n, -n),
        key=lambda c: 1 - fidelity(exp_su2(theta * c), U_T),
    )
    if 1 - fidelity(exp_su2(theta * best), U_T) > 1e-9:
        raise SynthesisError("target rotation angle does not match the sequence")
    return best


def _frame_to(n: np.ndarray) -> np.ndarray:
    """Rotation ``Upsilon`` (SU(2)) taking the x axis to ``n``; z-only when planar."""
    x = np.array([1.0, 0.0, 0.0])
    if abs(n[2]) < 1e-14:
        return exp_su2([0.0, 0.0, math.atan2(n[1], n[0])])
    c = np.cross(x, n)
    s = np.linalg.norm(c)
    if s < 1e-14:
        return np.eye(2, dtype=complex) if n[0] > 0 else exp_su2([0.0, 0.0, np.pi])
    return exp_su2(c / s * math.atan2(s, np.dot(x, n)))


def _transform_pulse(p: Pulse, O: np.ndarray) -> Pulse:
    d = O @ p.direction()
    if abs(d[2]) < 1e-12:
        return Pulse(p.theta, math.atan2(d[1], d[0]))
    if abs(abs(d[2]) - 1) < 1e-12:
        return Pulse(math.copysign(p.theta, d[2]), 0.0, "z")
    return Pulse(p.theta, math.atan2(d[1], d[0]), "tilted", math.asin(np.clip(d[2], -1, 1)))


def retarget(
    s: Sequence,
    U_T: np.ndarray,
    theta: float | None = None,
    planar_only: bool = False,
) -> Sequence:
    """Conjugate a sequence for ``rotation(theta, 0)`` so it implements ``U_T``.

    A z-axis frame change only shifts pulse phases. Other frames tilt pulse
    axes out of the plane, which ``planar_only`` rejects.
    """
    if theta is None:
        theta = float(s.params.get("theta", np.linalg.norm(log_su2(s.target))))
    n = _axis_for(U_T, theta)
    ups = _frame_to(n)
    O = so3(ups)
    pulses = tuple(_transform_pulse(p, O) for p in s.pulses)
    if planar_only and any(p.axis != "planar" for p in pulses):
        raise UnsupportedRetargetError("retarget lifts pulse axes out of the x-y plane")
    target = ups @ s.target @ ups.conj().T
    return Sequence(pulses, target, s.family, s.order_claim, dict(s.model_orders), dict(s.params))


def euler_compensated(U_T: np.ndarray, family: str | Callable[[float], Sequence] = "sk1") -> Sequence:
    """Compensated X-Y-X Euler concatenation of family sequences."""
    builder = get_family(family) if isinstance(family, str) else family
    a1, a2, a3 = euler_decompose(U_T)
    s1 = builder(a1)
    s2 = retarget(builder(a2), rotation(a2, np.pi / 2), theta=a2) if a2 > 0 else builder(0.0)
    s3 = builder(a3)
    out = s1.then(s2).then(s3, family=f"euler-{s1.family}")
    return out


# -- registry ----------------------------------------------------------------


FAMILIES: dict[str, Callable[..., Sequence]] = {
    "plain": plain,
    "sk1": sk1,
    "sk2": lambda theta: sk2(theta, "standard"),
    "sk2-rhombus": lambda theta: sk2(theta, "rhombus"),
    "sk3": lambda theta: sk_n(3, theta),
    "sk4": lambda theta: sk_n(4, theta),
    "b2": lambda theta: wimperis("B2", theta),
    "n2": lambda theta: wimperis("N2", theta),
    "p2": lambda theta: wimperis("P2", theta),
    "corpse": corpse,
    "corpse2": corpse2,
    "b2corpse": b2corpse,
}
for _k in "BNP":
    for _j in (1, 2, 3):
        FAMILIES[f"{_k.lower()}{2 * _j}-ts"] = (
            lambda theta, _k=_k, _j=_j: trotter_suzuki(_k, _j, theta)
        )
for _k in "BNP":
    for _j in (2, 3):
        FAMILIES[f"{_k.lower()}{2 * _j}"] = FAMILIES[f"{_k.lower()}{2 * _j}-ts"]


def get_family(name: str) -> Callable[..., Sequence]:
    try:
        return FAMILIES[name.lower()]
    except KeyError:
        raise SynthesisError(
            f"unknown family {name!r}; choose from {', '.join(sorted(FAMILIES))}"
        ) from None


def catalog(theta: float = np.pi / 2) -> dict[str, Sequence]:
    """One instance of every single-qubit family at angle ``theta``."""
    return {name: build(theta) for name, build in FAMILIES.items() if not name.endswith("-ts")}


def concat(seqs: Iterable[Sequence]) -> Sequence:
    seqs = list(seqs)
    out = seqs[0]
    for s in seqs[1:]:
        out = out.then(s)
    return out
