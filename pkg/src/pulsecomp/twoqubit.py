"""Two-qubit product operators, Ising gates and compensated Ising sequences.

Operators are ``H_{mu nu} = 2 H_mu (x) H_nu`` with ``H_1 = I/2``, so the 15
non-identity products are Hilbert-Schmidt orthonormal. Sequences built on
the Ising coupling live in the su(2) copy spanned by ``H_zz``, ``H_yz`` and
``H_x1``; :data:`SUBALGEBRA_MAP` sends ``Hx, Hy, Hz`` onto it.
"""
from __future__ import annotations

import json
import math
from typing import Sequence as Seq

import numpy as np
from scipy.linalg import expm

from .errors import ErrorModel, Pulse, apply_sequence
from .linalg import HX, HY, HZ, euler_unitary, infidelity, log_su2, rotation
from .sequences import SynthesisError, Sequence, wimperis

LABELS = ("1", "x", "y", "z")
_SINGLE = {"1": np.eye(2, dtype=complex) / 2, "x": HX, "y": HY, "z": HZ}


def product_operator(mu: str, nu: str) -> np.ndarray:
    return 2 * np.kron(_SINGLE[mu], _SINGLE[nu])


def basis() -> dict[str, np.ndarray]:
    """The 15 product operators keyed ``"xz"``, ``"x1"`` and so on."""
    return {
        mu + nu: product_operator(mu, nu)
        for mu in LABELS
        for nu in LABELS
        if (mu, nu) != ("1", "1")
    }


BASIS = basis()
BASIS_KEYS = tuple(BASIS)
LOCAL_KEYS = tuple(k for k in BASIS_KEYS if "1" in k)
NONLOCAL_KEYS = tuple(k for k in BASIS_KEYS if "1" not in k)
H_ZZ = BASIS["zz"]
H_YZ = BASIS["yz"]
H_X1 = BASIS["x1"]

# Hx, Hy, Hz -> span{H_zz, H_yz, H_x1}; preserves commutators
SUBALGEBRA_MAP = {"x": H_ZZ, "y": H_YZ, "z": -H_X1}


def gram() -> np.ndarray:
    ops = [BASIS[k] for k in BASIS_KEYS]
    return np.array([[np.trace(a.conj().T @ b) for b in ops] for a in ops])


def coefficients(M: np.ndarray) -> np.ndarray:
    """Coordinates of a traceless Hermitian 4x4 matrix in the product basis."""
    return np.array([np.trace(BASIS[k] @ M).real for k in BASIS_KEYS])


def bracket(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``-i [A, B]``, Hermitian when A and B are."""
    return -1j * (A @ B - B @ A)


def embed(v) -> np.ndarray:
    """Image of ``v . H`` under :data:`SUBALGEBRA_MAP`."""
    return sum(c * SUBALGEBRA_MAP[k] for c, k in zip(v, "xyz"))


def u_zz(theta: float) -> np.ndarray:
    h = np.exp(-0.5j * theta)
    return np.diag([h, h.conjugate(), h.conjugate(), h])


def local(q: int, theta: float, phi: float) -> np.ndarray:
    R = rotation(theta, phi)
    if q == 1:
        return np.kron(R, np.eye(2))
    if q == 2:
        return np.kron(np.eye(2), R)
    raise ValueError(f"qubit must be 1 or 2, got {q!r}")


def local_pair(U1: np.ndarray, U2: np.ndarray) -> np.ndarray:
    return np.kron(U1, U2)


K_X = local(1, np.pi / 2, 0.0) @ local(2, np.pi / 2, 0.0)
K_Y = local(1, np.pi / 2, np.pi / 2) @ local(2, np.pi / 2, np.pi / 2)


def u_xx(alpha: float) -> np.ndarray:
    return K_Y @ u_zz(alpha) @ K_Y.conj().T


def u_yy(alpha: float) -> np.ndarray:
    return K_X @ u_zz(alpha) @ K_X.conj().T


def cartan_a(axx: float, ayy: float, azz: float, order: str = "xyz") -> np.ndarray:
    """Commuting nonlocal core ``U_xx U_yy U_zz``; ``order`` permutes the factors."""
    factors = {"x": u_xx(axx), "y": u_yy(ayy), "z": u_zz(azz)}
    out = np.eye(4, dtype=complex)
    for k in order:
        out = out @ factors[k]
    return out


def _layer(params) -> np.ndarray:
    e1, e2 = params
    return np.kron(euler_unitary(e1), euler_unitary(e2))


def kak_synthesize(k2, a, k1) -> np.ndarray:
    """``K2 A K1``; each K layer is a pair of XYX Euler triples (qubit 1, qubit 2)."""
    for group in (*k2, a, *k1):
        if not np.all(np.isfinite(group)):
            raise ValueError("KAK parameters must be finite")
    return _layer(k2) @ cartan_a(*a) @ _layer(k1)


def cal_r(theta: float, phi: float) -> np.ndarray:
    """Ising-generated rotation ``exp(-i theta (cos phi H_zz + sin phi H_yz))``."""
    R = local(1, phi, 0.0)
    return R.conj().T @ u_zz(theta) @ R


def normalize_phase(U: np.ndarray) -> np.ndarray:
    """Divide by the principal fourth root of the determinant."""
    return U / np.linalg.det(U) ** 0.25


def fidelity4(U: np.ndarray, V: np.ndarray) -> float:
    return float(abs(np.trace(U.conj().T @ V)) / 4)


def infidelity4(U: np.ndarray, V: np.ndarray) -> float:
    return infidelity(U, V)


# ---------------------------------------------------------------- sequences
def _ising_block(theta: float, phi: float, eps_j: float, conj) -> np.ndarray:
    """``R^dag V_zz(theta (1 + eps_j)) R`` with ``R`` produced by ``conj(phi)``."""
    R, R_dag = conj(phi)
    return R_dag @ u_zz(theta * (1 + eps_j)) @ R


def _exact_conj(phi: float):
    R = local(1, phi, 0.0)
    return R, R.conj().T


def _bare_conj(eps_a: float):
    def conj(phi: float):
        if phi == 0:
            return np.eye(4), np.eye(4)
        return local(1, phi * (1 + eps_a), 0.0), local(1, phi * (1 + eps_a), np.pi)
    return conj


def _b2_local(angle: float, phase: float, eps_a: float) -> np.ndarray:
    s = wimperis("B2", angle)
    shifted = Sequence(
        tuple(Pulse(p.theta, p.phi + phase) for p in s.pulses), rotation(angle, phase), "b2"
    )
    return np.kron(apply_sequence(shifted, ErrorModel.amplitude(eps_a)), np.eye(2))


def _b2_conj(eps_a: float):
    def conj(phi: float):
        if phi == 0:
            return np.eye(4), np.eye(4)
        return _b2_local(phi, 0.0, eps_a), _b2_local(phi, np.pi, eps_a)
    return conj


def b2j_phase(theta: float) -> float:
    if not 0 <= theta <= 4 * np.pi:
        raise SynthesisError(f"theta={theta!r} outside [0, 4pi]")
    return math.acos(-theta / (4 * np.pi))


def _b2j_product(theta: float, eps_j: float, conj) -> np.ndarray:
    p = b2j_phase(theta)
    blocks = [(theta, 0.0), (np.pi, p), (2 * np.pi, 3 * p), (np.pi, p)]
    out = np.eye(4, dtype=complex)
    for angle, phase in blocks:
        out = _ising_block(angle, phase, eps_j, conj) @ out
    return out


def b2j(theta: float, eps_j: float) -> np.ndarray:
    """Ising gate ``u_zz(theta)`` with a B2 correction in the coupling strength."""
    return _b2j_product(theta, eps_j, _exact_conj)


def b2wj(theta: float, eps_j: float, eps_a: float) -> np.ndarray:
    """b2j whose qubit-1 frame rotations are themselves B2 sequences.

    The frame pulses suffer an amplitude error ``eps_a``.
    """
    return _b2j_product(theta, eps_j, _b2_conj(eps_a))


def b2j_bare(theta: float, eps_j: float, eps_a: float) -> np.ndarray:
    """b2j with plain amplitude-errored frame rotations, for comparison."""
    return _b2j_product(theta, eps_j, _bare_conj(eps_a))


def uncompensated(theta: float, eps_j: float) -> np.ndarray:
    return u_zz(theta * (1 + eps_j))


def transplant(s: Sequence, eps_j: float = 0.0) -> np.ndarray:
    """Run a planar single-qubit sequence through the Ising subalgebra.

    Each pulse ``(theta, phi)`` becomes ``cal_r`` with an ``eps_j``-scaled
    coupling, so amplitude-compensating sequences compensate ``eps_j``.
    """
    out = np.eye(4, dtype=complex)
    for p in s.pulses:
        if p.axis != "planar":
            raise SynthesisError("only planar pulses map onto Ising rotations")
        out = cal_r(p.theta * (1 + eps_j), p.phi) @ out
    return out


def subgroup_image(U: np.ndarray) -> np.ndarray:
    """SU(4) image of an SU(2) element under the subalgebra map."""
    return expm(-1j * embed(log_su2(U)))


# ---------------------------------------------------------------- JSON
def to_json(U: np.ndarray) -> str:
    return json.dumps([[[float(z.real), float(z.imag)] for z in row] for row in U])


def from_json(text: str) -> np.ndarray:
    rows = json.loads(text)
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def is_unitary(U: np.ndarray, tol: float = 1e-12) -> bool:
    return bool(np.linalg.norm(U.conj().T @ U - np.eye(len(U))) < tol)


__all__: Seq[str] = [
    "BASIS", "SUBALGEBRA_MAP", "basis", "gram", "coefficients", "bracket", "u_zz", "u_xx",
    "u_yy", "local", "cartan_a", "kak_synthesize", "cal_r", "b2j", "b2wj", "b2j_bare",
    "fidelity4", "infidelity4", "normalize_phase", "transplant", "to_json", "from_json",
]
