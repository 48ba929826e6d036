"""Continuous control waveforms under a detuning error.

The Hamiltonian is ``u_x(t) Hx + delta Hz`` with dimensionless ``delta``;
amplitudes carry the Rabi scale, so ``integral u_x dt`` is a rotation angle.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .linalg import compose, exp_su2, rotation

DEFAULT_STEPS = 2048


class WaveformError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Samples:
    """Piecewise-linear amplitude through ``(t, u)`` knots.

    A repeated time encodes a jump, so piecewise-constant pulses are exact.
    """

    t: np.ndarray
    u: np.ndarray

    def __post_init__(self) -> None:
        t = np.asarray(self.t, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if t.ndim != 1 or t.shape != u.shape or len(t) < 2:
            raise WaveformError("samples need matching 1-D t and u with >= 2 points")
        if np.any(np.diff(t) < 0) or t[0] != 0:
            raise WaveformError("sample times must start at 0 and be non-decreasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "u", u)

    @property
    def tau(self) -> float:
        return float(self.t[-1])

    def pieces(self) -> Iterable[tuple[float, float, float, float]]:
        """Non-degenerate linear pieces ``(t0, t1, u0, u1)``."""
        for i in range(len(self.t) - 1):
            if self.t[i + 1] > self.t[i]:
                yield self.t[i], self.t[i + 1], self.u[i], self.u[i + 1]

    def amplitude(self, t: np.ndarray) -> np.ndarray:
        return np.interp(t, self.t, self.u)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "u_x"])
        for a, b in zip(self.t, self.u):
            w.writerow([repr(float(a)), repr(float(b))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Samples":
        rows = list(csv.reader(io.StringIO(text)))
        if rows and rows[0] and not _is_number(rows[0][0]):
            rows = rows[1:]
        rows = [r for r in rows if r]
        try:
            return cls(np.array([float(r[0]) for r in rows]), np.array([float(r[1]) for r in rows]))
        except (ValueError, IndexError) as exc:
            raise WaveformError(f"malformed samples: {exc}") from None


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


@dataclass(frozen=True, eq=False)
class Fourier:
    """``u(t) = w sum_n a_n cos(n w (t - tau/2)) + b_n sin(n w (t - tau/2))``, ``w = 2 pi / tau``."""

    tau: float
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise WaveformError("tau must be positive")
        a = np.atleast_1d(np.asarray(self.a, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        n = max(len(a), len(b))
        object.__setattr__(self, "a", np.pad(a, (0, n - len(a))))
        object.__setattr__(self, "b", np.pad(b, (0, n - len(b))))

    @property
    def omega(self) -> float:
        return 2 * np.pi / self.tau

    @property
    def symmetric(self) -> bool:
        return not np.any(self.b)

    def amplitude(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        n = np.arange(len(self.a))
        arg = np.multiply.outer(t - self.tau / 2, n * self.omega)
        return self.omega * (np.cos(arg) @ self.a + np.sin(arg) @ self.b)

    def angle(self, t) -> np.ndarray:
        """Exact antiderivative of the amplitude, zero at ``t = 0``."""
        t = np.asarray(t, dtype=float)
        w = self.omega
        out = w * self.a[0] * t
        for k in range(1, len(self.a)):
            x = k * w * (t - self.tau / 2)
            x0 = -k * w * self.tau / 2
            out = out + (self.a[k] * (np.sin(x) - np.sin(x0)) - self.b[k] * (np.cos(x) - np.cos(x0))) / k
        return out

    def curvature(self, t) -> np.ndarray:
        """Second time derivative of the amplitude."""
        t = np.asarray(t, dtype=float)
        n = np.arange(len(self.a))
        arg = np.multiply.outer(t - self.tau / 2, n * self.omega)
        k2 = (n * self.omega) ** 2
        return -self.omega * (np.cos(arg) @ (k2 * self.a) + np.sin(arg) @ (k2 * self.b))

    def render(self, n: int = 4096) -> Samples:
        """Piecewise-linear samples on ``n`` equal pieces.

        Knots are shifted by ``-h**2 u''/12`` so each piece's trapezoid area
        matches the exact integral to O(h**5) rather than O(h**3).
        """
        t = np.linspace(0.0, self.tau, n + 1)
        h = self.tau / n
        return Samples(t, self.amplitude(t) - h * h / 12 * self.curvature(t))

    def to_json(self) -> str:
        return json.dumps({"tau": self.tau, "a": self.a.tolist(), "b": self.b.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "Fourier":
        d = json.loads(text)
        return cls(float(d["tau"]), d.get("a", [0.0]), d.get("b", [0.0]))


Waveform = Samples | Fourier


def constant(theta: float, tau: float = 1.0) -> Samples:
    return Samples(np.array([0.0, tau]), np.array([theta / tau, theta / tau]))


def from_pulses(pulses, amplitude: float = 1.0) -> Samples:
    """Piecewise-constant rendering of planar x-axis pulses (phase 0 or pi)."""
    now = 0.0
    knots_t: list[float] = []
    knots_u: list[float] = []
    for p in pulses:
        c = np.cos(p.phi)
        if p.axis != "planar" or abs(abs(c) - 1) > 1e-12:
            raise WaveformError("only x-axis pulses (phase 0 or pi) can be rendered")
        sign = 1.0 if c > 0 else -1.0
        dur = p.theta / amplitude
        knots_t += [now, now + dur]
        knots_u += [sign * amplitude] * 2
        now += dur
    return Samples(np.array(knots_t), np.array(knots_u))


def fourier_fit(w: Samples, terms: int) -> Fourier:
    """Project sampled amplitudes onto the first ``terms`` Fourier modes.

    Exact for waveforms already in the span; otherwise the least-squares
    truncation on ``[0, tau]``.
    """
    if terms < 1:
        raise WaveformError("terms must be >= 1")
    x, g = _gl(16)
    ts, ws = [], []
    for t0, t1, _, _ in w.pieces():
        ts.append(t0 + x * (t1 - t0))
        ws.append(g * (t1 - t0))
    t, wt = np.concatenate(ts), np.concatenate(ws)
    u = w.amplitude(t)
    arg = np.multiply.outer(t - w.tau / 2, np.arange(terms) * 2 * np.pi / w.tau)
    a = (wt * u) @ np.cos(arg) / np.pi
    b = (wt * u) @ np.sin(arg) / np.pi
    a[0] /= 2
    return Fourier(w.tau, a, b)


def _gl(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def _piece_nodes(w: Waveform, nodes: int = 24):
    """Quadrature nodes/weights on [0, tau] and the angle at each node."""
    x, g = _gl(nodes)
    if isinstance(w, Samples):
        ts, ws, th = [], [], []
        acc = 0.0
        for t0, t1, u0, u1 in w.pieces():
            dt = t1 - t0
            swing = max(abs(u0), abs(u1)) * dt
            panels = max(1, int(np.ceil(swing / 2)))
            for k in range(panels):
                a = k / panels
                s = a + x / panels  # fraction of the piece
                ts.append(t0 + s * dt)
                ws.append(g * dt / panels)
                th.append(acc + dt * (u0 * s + 0.5 * (u1 - u0) * s * s))
            acc += 0.5 * (u0 + u1) * dt
        return np.concatenate(ts), np.concatenate(ws), np.concatenate(th)
    swing = float(np.sum(np.abs(w.a) + np.abs(w.b)) * w.omega * w.tau * max(1, len(w.a)))
    panels = max(8, int(np.ceil(swing / 2)))
    edges = np.linspace(0.0, w.tau, panels + 1)
    ts = (edges[:-1, None] + np.diff(edges)[:, None] * x).ravel()
    ws = (np.diff(edges)[:, None] * g).ravel()
    return ts, ws, w.angle(ts)


def accumulated_angle(w: Waveform, t: float) -> float:
    """``theta(t) = integral_0^t u_x``: exact for Fourier, trapezoid for samples."""
    if not 0 <= t <= w.tau * (1 + 1e-15):
        raise WaveformError(f"t={t!r} outside [0, {w.tau!r}]")
    if isinstance(w, Fourier):
        return float(w.angle(t))
    acc = 0.0
    for t0, t1, u0, u1 in w.pieces():
        if t <= t0:
            break
        hi = min(t, t1)
        u_hi = u0 + (u1 - u0) * (hi - t0) / (t1 - t0)
        acc += 0.5 * (u0 + u_hi) * (hi - t0)
    return acc


def first_order_residuals(w: Waveform) -> tuple[float, float]:
    """``(integral cos theta(t) dt, integral sin theta(t) dt)`` over the waveform."""
    _, ws, th = _piece_nodes(w)
    return float(ws @ np.cos(th)), float(ws @ np.sin(th))


def error_terms(w: Waveform, nodes: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """First and second interaction-frame terms per unit detuning.

    The toggling-frame error vector is ``h(t) = (0, sin theta, cos theta)``.
    Signs follow :class:`pulsecomp.expansion.MagnusTerms`, so the pair is
    ``-(integral h, 1/2 double integral h(t1) x h(t2) over t2 < t1)``.
    The inner integral is the running Gauss sum over time-sorted nodes.
    """
    ts, ws, th = _piece_nodes(w, nodes)
    order = np.argsort(ts, kind="stable")
    ts, ws, th = ts[order], ws[order], th[order]
    h = np.stack([np.zeros_like(th), np.sin(th), np.cos(th)], axis=1)
    contrib = ws[:, None] * h
    running = np.cumsum(contrib, axis=0) - 0.5 * contrib
    omega1 = contrib.sum(axis=0)
    omega2 = 0.5 * np.sum(np.cross(contrib, running), axis=0)
    return -omega1, -omega2


def _steps_for(w: Waveform, steps: int):
    """Midpoint times and step lengths; each sample piece gets >= 1 step."""
    if isinstance(w, Fourier):
        dt = w.tau / steps
        mids = (np.arange(steps) + 0.5) * dt
        return mids, np.full(steps, dt), w.amplitude(mids)
    pieces = list(w.pieces())
    durs = np.array([p[1] - p[0] for p in pieces])
    counts = np.maximum(1, np.round(steps * durs / durs.sum()).astype(int))
    mids, lens, amps = [], [], []
    for (t0, t1, u0, u1), n in zip(pieces, counts):
        dt = (t1 - t0) / n
        m = t0 + (np.arange(n) + 0.5) * dt
        mids.append(m)
        lens.append(np.full(n, dt))
        amps.append(u0 + (u1 - u0) * (m - t0) / (t1 - t0))
    return np.concatenate(mids), np.concatenate(lens), np.concatenate(amps)


def propagate(w: Waveform, delta: float, steps: int = DEFAULT_STEPS) -> np.ndarray:
    """Time-ordered product of exact exponentials at step midpoints."""
    if steps < 1:
        raise WaveformError("steps must be >= 1")
    _, lens, amps = _steps_for(w, steps)
    return compose(exp_su2([u * dt, 0.0, delta * dt]) for u, dt in zip(amps, lens))


def ideal(w: Waveform) -> np.ndarray:
    return rotation(accumulated_angle(w, w.tau), 0.0)
