"""Numeric BCH / Magnus engine for square-pulse sequences.

The interaction-frame propagator ``U_I = ideal^dagger @ imperfect`` satisfies

    U_I = exp_su2(-(eps * omega1 + eps**2 * omega2 + eps**3 * omega3) + O(eps**4))

so each ``omega_n`` holds the coefficients ``c`` of ``Omega_n = +i c.H``.
A single over-rotated pulse ``Pulse(theta, 0)`` reports ``omega1 = (-theta, 0, 0)``
and SK1 on an unaddressed spin reports ``omega2 = (0, 0, -2 pi^2 sin 2 phi)``.

:class:`AlgebraPath` segments are the toggling-frame error vectors, so they
sum to ``-omega1``. Its ``signed_area`` is half the sum of partial sums
crossed with increments, which equals ``omega2``.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable, Sequence as Seq

import numpy as np

from .errors import ErrorModel, ideal_target, imperfect
from .linalg import axis_rotation, compose, exp_su2, log_sl2, phase_sign

QUAD_TOL = 1e-10
_MAX_NODES = 400


class QuadratureError(RuntimeError):
    """Nested quadrature failed to reach the requested tolerance."""


class ExtractionError(RuntimeError):
    """Taylor coefficients of the error generator could not be resolved."""


@dataclass(frozen=True)
class MagnusTerms:
    omega1: np.ndarray
    omega2: np.ndarray
    omega3: np.ndarray | None
    truncation_estimate: float

    def as_list(self) -> list[np.ndarray]:
        out = [self.omega1, self.omega2]
        if self.omega3 is not None:
            out.append(self.omega3)
        return out

    def generator(self, eps: float) -> np.ndarray:
        """Truncated ``log_su2(U_I)``, i.e. ``-sum eps**n omega_n``."""
        return -sum(eps ** (n + 1) * w for n, w in enumerate(self.as_list()))


@dataclass(frozen=True)
class AlgebraPath:
    """Toggling-frame error vector path.

    ``samples`` holds ``(t, vector)`` pairs where ``vector`` is the running
    integral of the error vector up to time ``t``; each pulse spans one unit
    of time.
    """

    samples: list[tuple[float, np.ndarray]]
    closure_residual: float
    signed_area: np.ndarray

    @property
    def segments(self) -> list[np.ndarray]:
        pts = [v for _, v in self.samples]
        return [b - a for a, b in zip(pts, pts[1:])]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "vx", "vy", "vz"])
        for t, v in self.samples:
            w.writerow([format(t, ".12g")] + [format(float(x), ".12g") for x in v])
        return buf.getvalue()


# -- truncated BCH and product formulas --------------------------------------


def bch_pair(a, b, order: int = 3) -> np.ndarray:
    """Truncated BCH series for ``log(exp_su2(a) @ exp_su2(b))``.

    Brackets of ``-i v.H`` generators are cross products of the vectors.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2 or 3")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = a + b
    if order >= 2:
        out = out + 0.5 * np.cross(a, b)
    if order >= 3:
        out = out + (np.cross(a, np.cross(a, b)) + np.cross(b, np.cross(b, a))) / 12
    return out


def trotter(a, b, n: int) -> np.ndarray:
    """Lie-Trotter product ``(exp(a/n) exp(b/n))**n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    step = exp_su2(np.asarray(a) / n) @ exp_su2(np.asarray(b) / n)
    return np.linalg.matrix_power(step, n)


def balanced_commutator(a, b, n: int) -> np.ndarray:
    """Balanced group commutator ``(e^{a/n} e^{b/n} e^{-a/n} e^{-b/n})**(n*n)``.

    Tends to ``exp_su2(a x b)`` as ``n`` grows.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a = np.asarray(a, dtype=float) / n
    b = np.asarray(b, dtype=float) / n
    step = exp_su2(a) @ exp_su2(b) @ exp_su2(-a) @ exp_su2(-b)
    return np.linalg.matrix_power(step, n * n)


# -- interaction-frame segments ----------------------------------------------


@dataclass
class _Segment:
    """Error vector ``h(s) = Ot @ Rot(axis, -s*theta) @ g`` on ``s in [0, 1]``."""

    Ot: np.ndarray
    axis: np.ndarray
    theta: float
    g_par: np.ndarray
    g_perp: np.ndarray
    g_cross: np.ndarray

    @classmethod
    def build(cls, O: np.ndarray, a: np.ndarray, g: np.ndarray) -> "_Segment":
        theta = float(np.linalg.norm(a))
        axis = a / theta if theta > 0 else np.array([1.0, 0.0, 0.0])
        g_par = np.dot(axis, g) * axis
        return cls(O.T, axis, theta, g_par, g - g_par, np.cross(axis, g))

    def h(self, s: np.ndarray) -> np.ndarray:
        c = np.cos(s * self.theta)[:, None]
        sn = np.sin(s * self.theta)[:, None]
        local = self.g_par + c * self.g_perp - sn * self.g_cross
        return local @ self.Ot.T

    def G(self, s: np.ndarray) -> np.ndarray:
        """Closed-form integral of ``h`` from 0 to ``s``."""
        th = self.theta
        s = np.asarray(s, dtype=float)
        sin_over = s * np.sinc(s * th / np.pi)
        one_minus_cos_over = 0.5 * th * s * s * np.sinc(s * th / (2 * np.pi)) ** 2
        local = (
            s[:, None] * self.g_par
            + sin_over[:, None] * self.g_perp
            - one_minus_cos_over[:, None] * self.g_cross
        )
        return local @ self.Ot.T

    @property
    def is_straight(self) -> bool:
        return self.theta == 0 or np.linalg.norm(self.g_perp) < 1e-15 * max(
            1.0, np.linalg.norm(self.g_par)
        )


def _segments(s, m: ErrorModel) -> list[_Segment]:
    if not m.is_linear:
        raise ValueError(
            f"interaction terms need a single-parameter linear model, got {m.name}"
        )
    O = np.eye(3)
    out = []
    for p in s.pulses:
        a, g = m.linear_parts(p)
        out.append(_Segment.build(O, a, g))
        theta = np.linalg.norm(a)
        if theta > 0:
            O = axis_rotation(a, theta) @ O
    return out


def _gauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def _segment_integrals(seg: _Segment, G0, K0, M0, n: int, depth: int):
    """Contributions of one segment to (omega2, omega3) plus updated K, M."""
    x, w = _gauss(n)
    h = seg.h(x)
    Gs = G0 + seg.G(x)
    hxG = np.cross(h, Gs)
    w2 = 0.5 * (w @ hxG)
    if depth < 3:
        return w2, None, None, None
    # inner integrals over [0, x_i] with nodes x_i * x_j
    inner = np.outer(x, x).ravel()
    h_in = seg.h(inner)
    G_in = G0 + seg.G(inner)
    wts = np.outer(x, w)  # weight for node (i, j) is x_i * w_j
    hxG_in = np.cross(h_in, G_in).reshape(n, n, 3)
    K = K0 + np.einsum("ij,ijk->ik", wts, hxG_in)
    outer_in = np.einsum("pa,pb->pab", h_in, G_in).reshape(n, n, 3, 3)
    M = M0 + np.einsum("ij,ijab->iab", wts, outer_in)
    trM = np.trace(M, axis1=1, axis2=2)
    integrand = np.cross(h, K) + np.einsum("iab,ib->ia", M, h) - trM[:, None] * h
    w3 = (w @ integrand) / 6
    # updated running K and M at s = 1
    K1 = K0 + w @ hxG
    M1 = M0 + np.einsum("i,ia,ib->ab", w, h, Gs)
    return w2, w3, K1, M1


def _stack(segs: list[_Segment]):
    Ot = np.stack([sg.Ot for sg in segs])
    th = np.array([sg.theta for sg in segs])
    par = np.stack([sg.g_par for sg in segs])
    perp = np.stack([sg.g_perp for sg in segs])
    cross = np.stack([sg.g_cross for sg in segs])
    return Ot, th, par, perp, cross


def _batch_h_G(stack, x):
    """``h`` and local ``G`` for every segment at nodes ``x``: shapes (S, n, 3)."""
    Ot, th, par, perp, cross = stack
    sx = th[:, None] * x[None, :]
    c, sn = np.cos(sx), np.sin(sx)
    h_loc = par[:, None] + c[..., None] * perp[:, None] - sn[..., None] * cross[:, None]
    so = x[None, :] * np.sinc(sx / np.pi)
    omc = 0.5 * th[:, None] * x[None, :] ** 2 * np.sinc(sx / (2 * np.pi)) ** 2
    G_loc = (
        x[None, :, None] * par[:, None]
        + so[..., None] * perp[:, None]
        - omc[..., None] * cross[:, None]
    )
    # rows of Ot are the frame's columns: h = Ot @ local
    h = np.einsum("sab,snb->sna", Ot, h_loc)
    G = np.einsum("sab,snb->sna", Ot, G_loc)
    return h, G


def _omega2_batch(segs: list[_Segment], n: int):
    stack = _stack(segs)
    totals = _batch_h_G(stack, np.array([1.0]))[1][:, 0]
    G0 = np.cumsum(totals, axis=0) - totals
    x, w = _gauss(n)
    h, G = _batch_h_G(stack, x)
    integrand = np.cross(h, G + G0[:, None])
    w2 = 0.5 * np.einsum("n,sna->a", w, integrand)
    # magnitude of the summed contributions, the scale for round-off
    mag = 0.5 * float(np.einsum("n,sn->", w, np.linalg.norm(integrand, axis=2)))
    return totals.sum(axis=0), w2, mag


def _natural_terms(segs: list[_Segment], depth: int):
    if not segs:
        z = np.zeros(3)
        return z, z.copy(), (z.copy() if depth >= 3 else None), 0.0
    if depth < 3:
        n = int(np.ceil(max(sg.theta for sg in segs))) + 12
        while True:
            w1, lo, mag = _omega2_batch(segs, n)
            _, hi, _ = _omega2_batch(segs, n + 8)
            diff = float(np.linalg.norm(hi - lo))
            if diff <= max(QUAD_TOL * 1e-3, 1e-14 * mag) or n > _MAX_NODES:
                break
            n *= 2
        if diff > QUAD_TOL:
            raise QuadratureError(f"second-order quadrature did not converge (diff {diff:.3g})")
        return w1, hi, None, diff
    G = np.zeros(3)
    K = np.zeros(3)
    M = np.zeros((3, 3))
    w1 = np.zeros(3)
    w2 = np.zeros(3)
    w3 = np.zeros(3)
    est = 0.0
    for seg in segs:
        n = int(np.ceil(seg.theta)) + 12
        while True:
            lo = _segment_integrals(seg, G, K, M, n, depth)
            hi = _segment_integrals(seg, G, K, M, n + 8, depth)
            diff = max(np.linalg.norm(hi[0] - lo[0]), np.linalg.norm(hi[1] - lo[1]))
            if diff <= QUAD_TOL * 1e-3 or n > _MAX_NODES:
                break
            n *= 2
        if diff > QUAD_TOL:
            raise QuadratureError(
                f"segment with angle {seg.theta:.6g} did not converge (diff {diff:.3g})"
            )
        est += diff
        w2 = w2 + hi[0]
        w3 = w3 + hi[1]
        K, M = hi[2], hi[3]
        seg_total = seg.G(np.array([1.0]))[0]
        G = G + seg_total
        w1 = w1 + seg_total
    return w1, w2, w3, est


def interaction_terms(s, m: ErrorModel, depth: int = 2) -> MagnusTerms:
    """Leading Magnus terms of the interaction-frame error propagator.

    ``m`` must be a single-parameter linear model; only its kind matters.
    ``depth=3`` also evaluates the (triple-integral) third-order term.
    """
    if depth not in (2, 3):
        raise ValueError("depth must be 2 or 3")
    w1, w2, w3, est = _natural_terms(_segments(s, m), depth)
    return MagnusTerms(-w1, -w2, None if w3 is None else -w3, est)


def path(s, m: ErrorModel, resolution: int = 16) -> AlgebraPath:
    """Vector path traced by the toggling-frame error generator.

    Straight segments contribute their two end points; curved ones (e.g. a
    detuning error while the frame rotates) are sampled at ``resolution``
    interior points. The signed area is integrated exactly.
    """
    segs = _segments(s, m)
    G = np.zeros(3)
    samples = [(0.0, G.copy())]
    for k, seg in enumerate(segs):
        if seg.is_straight:
            ts = np.array([1.0])
        else:
            ts = np.linspace(0, 1, resolution + 2)[1:]
        pts = G + seg.G(ts)
        samples.extend((k + t, p) for t, p in zip(ts, pts))
        G = pts[-1]
    w1, w2, _, _ = _natural_terms(segs, 2)
    return AlgebraPath(samples, float(np.linalg.norm(w1)), -w2)


# -- Taylor coefficients by contour integration ------------------------------


def error_series(
    propagator: Callable[[complex], np.ndarray],
    target: np.ndarray,
    kmax: int,
    scale: float,
    points: int = 64,
) -> list[np.ndarray]:
    """Taylor coefficients ``c_1..c_kmax`` of ``log(W(eps) @ target^dagger)``.

    ``propagator`` must accept complex ``eps`` (analytic continuation). The
    coefficients come from a discrete Cauchy integral on a circle whose radius
    is tuned so the logarithm has norm of order 0.3 there, keeping both
    aliasing and round-off small. ``scale`` is a rough size of the total
    rotation angle, used for the initial radius.
    """
    Td = target.conj().T
    sign = phase_sign(propagator(0.0) @ Td)

    def L(e):
        return log_sl2(sign * (propagator(e) @ Td))

    r = min(0.05, 1.0 / max(scale, 1e-3))
    for _ in range(200):
        try:
            size = max(np.linalg.norm(L(r)), np.linalg.norm(L(1j * r)))
        except FloatingPointError:
            size = np.inf
        if size < 0.05:
            r *= 1.25
        elif size > 0.5 or not np.isfinite(size):
            r /= 1.25
        else:
            break
    else:
        raise ExtractionError("could not bracket a contour radius")
    ks = np.arange(points)
    zs = r * np.exp(2j * np.pi * ks / points)
    vals = np.array([L(z) for z in zs])
    coeffs = np.fft.fft(vals, axis=0) / points
    out = []
    for k in range(1, kmax + 1):
        c = coeffs[k] / r**k
        if np.linalg.norm(c.imag) > 1e-6 * max(1.0, np.linalg.norm(c.real)):
            raise ExtractionError(
                f"order-{k} coefficient has spurious imaginary part {np.linalg.norm(c.imag):.3g}"
            )
        out.append(c.real)
    return out


def sequence_error_series(s, m: ErrorModel, kmax: int, points: int = 64):
    """Lab-frame coefficients ``c_k`` with ``imperfect = exp(sum c_k eps^k) @ target``."""
    target = ideal_target(s, m)
    pulses = list(s.pulses)

    def W(e):
        mm = m.with_strength(e)
        return compose((imperfect(p, mm) for p in pulses), renormalize=False)

    scale = sum(abs(p.theta) for p in pulses)
    return error_series(W, target, kmax, scale, points)


def leading_order(coeffs: Seq[np.ndarray], tol: float = 1e-9) -> int:
    """Index (1-based) of the first coefficient above ``tol``; 0 if none."""
    for k, c in enumerate(coeffs, start=1):
        if np.linalg.norm(c) > tol:
            return k
    return 0
