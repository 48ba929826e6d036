"""Closed-form SU(2) arithmetic.

Conventions used throughout the package:

* ``H = (Hx, Hy, Hz) = sigma / 2``.
* An algebra vector ``v`` (shape ``(3,)``) stands for the generator
  ``-i (v . H)``; ``exp_su2(v)`` is a rotation by ``|v|`` about ``v / |v|``.
* Unitaries are plain ``numpy`` complex arrays.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
PAULIS = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])
HX, HY, HZ = PAULIS / 2

# Products are re-projected onto the group after this many factors.
RENORM_INTERVAL = 64


class EulerAngles(NamedTuple):
    """X-Y-X Euler angles; ``U = Rx(alpha3) Ry(alpha2) Rx(alpha1)``."""

    alpha1: float
    alpha2: float
    alpha3: float


def rotation(theta: float, phi: float) -> np.ndarray:
    """Rotation by ``theta`` about the planar axis ``(cos phi, sin phi, 0)``."""
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    off = -1j * s * np.exp(-1j * phi)
    return np.array([[c, off], [-1j * s * np.exp(1j * phi), c]], dtype=complex)


def exp_su2(v) -> np.ndarray:
    """Exponential ``exp(-i v.H)`` in axis-angle closed form.

    Complex ``v`` is accepted; the result is then the analytic continuation,
    which the Cauchy-contour term extraction relies on.
    """
    v = np.asarray(v)
    t = np.sqrt(np.dot(v, v) + 0j)
    c = np.cos(t / 2)
    # sin(t/2)/t, even in t so the branch of the square root does not matter
    sc = 0.5 * np.sinc(t / (2 * np.pi))
    if not np.iscomplexobj(v):
        c = c.real
        sc = sc.real
    m = -1j * sc * v
    return np.array(
        [[c + m[2], m[0] - 1j * m[1]], [m[0] + 1j * m[1], c - m[2]]],
        dtype=complex,
    )


def phase_sign(U: np.ndarray) -> int:
    """Global sign ``s`` such that ``s * U`` has non-negative real trace."""
    return 1 if np.trace(U).real >= 0 else -1


def log_su2(U: np.ndarray) -> np.ndarray:
    """Principal logarithm of ``+U`` or ``-U``, whichever has angle <= pi.

    The discarded global sign is available from :func:`phase_sign`.
    """
    s = phase_sign(U)
    W = s * U
    # W = c I - i m.sigma with c = cos(t/2) >= 0 and m = sin(t/2) axis
    m = np.array([1j * np.trace(P @ W) / 2 for P in PAULIS]).real
    c = np.trace(W).real / 2
    sn = np.linalg.norm(m)
    if sn < 1e-300:
        return np.zeros(3)
    angle = 2 * np.arctan2(sn, c)
    return m * (angle / sn)


def log_sl2(M: np.ndarray) -> np.ndarray:
    """Analytic logarithm near the identity for complexified SU(2) elements.

    Returns complex ``v`` with ``exp_su2(v) == M``; only valid while ``M`` is
    close enough to ``I`` that the principal branch is the analytic one.
    """
    m = np.array([1j * np.trace(P @ M) / 2 for P in PAULIS])
    s = np.sqrt(np.dot(m, m) + 0j)
    if abs(s) < 1e-8:
        ratio = 1 + s * s / 6 + 3 * s**4 / 40
    else:
        ratio = np.arcsin(s) / s
    return 2 * ratio * m


def hs_inner(A: np.ndarray, B: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``tr(A^dagger B)``."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape or A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape} vs {B.shape}")
    return complex(np.vdot(A, B))


def fidelity(U: np.ndarray, V: np.ndarray) -> float:
    """Phase-insensitive gate fidelity ``|tr(U^dagger V)| / d``."""
    d = np.asarray(U).shape[0]
    return abs(hs_inner(U, V)) / d


def _pauli_strings(d: int) -> np.ndarray:
    if d == 2:
        return np.stack([IDENTITY, *PAULIS])
    if d == 4:
        singles = [IDENTITY, *PAULIS]
        return np.stack([np.kron(a, b) for a in singles for b in singles])
    raise ValueError(f"unsupported dimension {d}")


_PAULI_CACHE = {2: _pauli_strings(2), 4: _pauli_strings(4)}


def infidelity(U: np.ndarray, V: np.ndarray) -> float:
    """``1 - fidelity(U, V)`` without the cancellation of the naive formula.

    ``W = U^dagger V`` is expanded in the Pauli basis; the weight off the
    identity component gives ``1 - F^2`` directly, so infidelities far below
    machine epsilon stay resolvable.
    """
    U = np.asarray(U)
    W = U.conj().T @ np.asarray(V)
    d = W.shape[0]
    coeffs = np.einsum("kij,ji->k", _PAULI_CACHE[d], W) / d
    f = abs(coeffs[0])
    rest = float(np.sum(np.abs(coeffs[1:]) ** 2))
    # unitarity drift can make |c0|^2 + rest differ from 1; renormalise
    total = f * f + rest
    return max(0.0, rest / total / (1 + f / np.sqrt(total)))


def conjugate(T: np.ndarray, U: np.ndarray) -> np.ndarray:
    """Similarity transform ``T U T^dagger``."""
    return T @ U @ T.conj().T


def project_unitary(U: np.ndarray) -> np.ndarray:
    """Nearest unitary (polar factor); SU(2) inputs stay special."""
    if U.shape == (2, 2):
        a = (U[0, 0] + np.conj(U[1, 1])) / 2
        b = (U[1, 0] - np.conj(U[0, 1])) / 2
        n = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
        return np.array([[a, -np.conj(b)], [b, np.conj(a)]]) / n
    w, _, vh = np.linalg.svd(U)
    return w @ vh


def compose(
    factors: Iterable[np.ndarray], dim: int = 2, renormalize: bool = True
) -> np.ndarray:
    """Product of ``factors`` given in application order (first applied first).

    The running product is re-projected onto the unitary group every
    ``RENORM_INTERVAL`` multiplications. Pass ``renormalize=False`` for
    analytically continued (non-unitary) factors.
    """
    out = np.eye(dim, dtype=complex)
    for k, F in enumerate(factors, start=1):
        out = F @ out
        if renormalize and k % RENORM_INTERVAL == 0:
            out = project_unitary(out)
    return out


def so3(U: np.ndarray) -> np.ndarray:
    """Adjoint rotation ``O`` with ``U (v.H) U^dagger = (O v).H``."""
    Ud = U.conj().T
    return np.array(
        [[np.trace(P @ U @ Q @ Ud).real / 2 for Q in PAULIS] for P in PAULIS]
    )


def axis_rotation(axis: np.ndarray, angle: float) -> np.ndarray:
    """Right-handed SO(3) rotation matrix (Rodrigues)."""
    n = np.asarray(axis, dtype=float)
    n = n / np.linalg.norm(n)
    K = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + np.sin(angle) * K + (1 - np.cos(angle)) * (K @ K)


def euler_decompose(U: np.ndarray) -> EulerAngles:
    """X-Y-X Euler angles reproducing ``U`` up to global phase.

    Angles are reduced to ``[0, 4 pi)``. When the Y angle is 0 or pi the
    split between the two X rotations is degenerate; ``alpha1 = 0`` is chosen.
    """
    # K maps Hx -> Hz, turning the problem into a Z-Y-Z decomposition
    K = exp_su2([0.0, -np.pi / 2, 0.0])
    V = K @ U @ K.conj().T
    a00, a10 = V[0, 0], V[1, 0]
    alpha2 = 2 * np.arctan2(abs(a10), abs(a00))
    tol = 1e-12
    if abs(a10) < tol:
        total = -2 * np.angle(a00)
        alpha1, alpha3 = 0.0, total
    elif abs(a00) < tol:
        diff = 2 * np.angle(a10)
        alpha1, alpha3 = 0.0, diff
    else:
        total = -2 * np.angle(a00)
        diff = 2 * np.angle(a10)
        alpha3 = (total + diff) / 2
        alpha1 = (total - diff) / 2
    four_pi = 4 * np.pi
    return EulerAngles(
        float(np.mod(alpha1, four_pi)),
        float(np.mod(alpha2, four_pi)),
        float(np.mod(alpha3, four_pi)),
    )


def euler_unitary(angles: Sequence[float]) -> np.ndarray:
    """Inverse of :func:`euler_decompose`."""
    a1, a2, a3 = angles
    return rotation(a3, 0.0) @ exp_su2([0.0, a2, 0.0]) @ rotation(a1, 0.0)


def random_su2(rng: np.random.Generator) -> np.ndarray:
    """Haar-random SU(2) element."""
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    a = q[0] + 1j * q[1]
    b = q[2] + 1j * q[3]
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


def distance_up_to_phase(U: np.ndarray, V: np.ndarray) -> float:
    """Frobenius distance minimised over the global phase."""
    ip = hs_inner(U, V)
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.linalg.norm(U * phase - V))
