"""Error scans, infidelity slope fits and two-parameter error grids."""
from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ErrorModel, ModelError, apply_sequence, ideal_target
from .linalg import infidelity
from .sequences import Sequence

DEFAULT_GRID = np.logspace(-4, -1, 25)
FIT_WINDOW = (1e-4, 1e-2)
MAX_INFIDELITY = 1e-2
CONTOUR = 0.01
_EPS = np.finfo(float).eps


class FitError(ValueError):
    pass


@dataclass
class ScanResult:
    epsilons: list[float]
    infidelities: list[float]
    model: dict
    sequence_label: str
    pulses: int = 1

    def __post_init__(self) -> None:
        if len(self.epsilons) != len(self.infidelities):
            raise ValueError("epsilons and infidelities differ in length")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epsilon", "infidelity"])
        for e, f in zip(self.epsilons, self.infidelities):
            w.writerow([f"{e:.12g}", f"{f:.12g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "sequence": self.sequence_label,
            "model": self.model,
            "epsilons": list(self.epsilons),
            "infidelities": list(self.infidelities),
        }


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    points: int = 0

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "window": list(self.window),
            "points": self.points,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _map_indexed(fn: Callable[[int], float], n: int, workers: int | None) -> list[float]:
    """Evaluate ``fn(i)`` for ``i < n`` into position-indexed storage."""
    out = [0.0] * n
    if not workers or workers <= 1:
        for i in range(n):
            out[i] = fn(i)
        return out

    def task(i: int) -> None:
        out[i] = fn(i)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(task, range(n)))
    return out


def _check_grid(grid) -> list[float]:
    g = [float(x) for x in grid]
    if not g or any(not np.isfinite(x) or x <= 0 for x in g):
        raise ValueError("scan grid must hold positive finite values")
    if any(b <= a for a, b in zip(g, g[1:])):
        raise ValueError("scan grid must be strictly ascending")
    return g


def sequence_infidelity(seq: Sequence, m: ErrorModel) -> float:
    return infidelity(ideal_target(seq, m), apply_sequence(seq, m))


def scan(
    seq: Sequence,
    model_template: ErrorModel | str,
    eps_grid=DEFAULT_GRID,
    workers: int | None = None,
) -> ScanResult:
    """Infidelity against the target as the model's error strength varies."""
    m = ErrorModel(model_template) if isinstance(model_template, str) else model_template
    if not m.is_linear:
        raise ModelError(f"scan needs a single-parameter model, got {m.name}")
    grid = _check_grid(eps_grid)
    vals = _map_indexed(lambda i: sequence_infidelity(seq, m.with_strength(grid[i])), len(grid), workers)
    return ScanResult(grid, vals, m.with_strength(0.0).to_dict(), seq.family, len(seq))


def scan_function(
    label: str, fn: Callable[[float], float], eps_grid=DEFAULT_GRID, pulses: int = 1,
    workers: int | None = None,
) -> ScanResult:
    """Scan an arbitrary ``eps -> infidelity`` function (e.g. a two-qubit gate)."""
    grid = _check_grid(eps_grid)
    vals = _map_indexed(lambda i: float(fn(grid[i])), len(grid), workers)
    return ScanResult(grid, vals, {"model": label}, label, pulses)


def precision_floor(pulses: int) -> float:
    """Smallest infidelity treated as signal: 100x the accumulated rounding."""
    return 100 * (_EPS * max(pulses, 1)) ** 2


def fit_order(
    r: ScanResult,
    window: tuple[float, float] = FIT_WINDOW,
    floor: float | None = None,
    min_points: int = 5,
) -> SlopeFit:
    """Log-log least-squares slope in the asymptotic window.

    Points below the precision floor or above ``MAX_INFIDELITY`` are
    dropped; when fewer than ``min_points`` remain the window is shifted up
    by factors of two until enough points survive or ``eps`` reaches 0.1.
    """
    floor = precision_floor(r.pulses) if floor is None else floor
    eps = np.asarray(r.epsilons, dtype=float)
    inf = np.asarray(r.infidelities, dtype=float)
    lo, hi = window
    while True:
        keep = (eps >= lo * (1 - 1e-12)) & (eps <= hi * (1 + 1e-12)) & (inf > floor) & (inf < MAX_INFIDELITY)
        if keep.sum() >= min_points:
            break
        if hi >= 0.1 or not np.any(eps > hi):
            raise FitError(
                f"only {int(keep.sum())} usable points above the floor {floor:.3g}; "
                "data are floor-dominated or the grid is too coarse"
            )
        lo, hi = lo * 2, hi * 2
    x = np.log10(eps[keep])
    y = np.log10(inf[keep])
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(res[0]) / ss_tot if res.size and ss_tot > 0 else 1.0
    return SlopeFit(float(slope), float(intercept), r2, (float(eps[keep][0]), float(eps[keep][-1])), int(keep.sum()))


@dataclass
class GridResult:
    eps1: list[float]
    eps2: list[float]
    values: np.ndarray  # values[i, j] at (eps1[i], eps2[j])
    label: str = ""
    model: str = ""
    mask: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=float)
        self.mask = self.values < CONTOUR

    def contains(self, other: "GridResult") -> bool:
        """True when this 0.01 region strictly contains ``other``'s."""
        return bool(np.all(self.mask >= other.mask) and np.any(self.mask & ~other.mask))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["eps1", "eps2", "infidelity"])
        for i, a in enumerate(self.eps1):
            for j, b in enumerate(self.eps2):
                w.writerow([f"{a:.12g}", f"{b:.12g}", f"{self.values[i, j]:.12g}"])
        return buf.getvalue()


_SECOND = {"amplitude_detuning": "delta", "pulse_length_detuning": "delta"}


def grid2(
    seq: Sequence,
    model_family: str,
    eps1_grid,
    eps2_grid,
    workers: int | None = None,
) -> GridResult:
    """Infidelity over a simultaneous-error grid (``eps`` by ``delta``)."""
    m0 = ErrorModel(model_family)
    if m0.name not in _SECOND:
        raise ModelError(f"grid2 needs a two-parameter model, got {m0.name}")
    g1 = [float(x) for x in eps1_grid]
    g2 = [float(x) for x in eps2_grid]
    if not all(np.isfinite(g1 + g2)):
        raise ValueError("grid values must be finite")
    n2 = len(g2)

    def cell(k: int) -> float:
        i, j = divmod(k, n2)
        return sequence_infidelity(seq, ErrorModel(m0.name, eps=g1[i], delta=g2[j]))

    vals = _map_indexed(cell, len(g1) * n2, workers)
    return GridResult(g1, g2, np.array(vals).reshape(len(g1), n2), seq.family, m0.name)


def grid_function(
    label: str, fn: Callable[[float, float], float], eps1_grid, eps2_grid,
    workers: int | None = None,
) -> GridResult:
    g1 = [float(x) for x in eps1_grid]
    g2 = [float(x) for x in eps2_grid]
    n2 = len(g2)
    vals = _map_indexed(lambda k: float(fn(g1[k // n2], g2[k % n2])), len(g1) * n2, workers)
    return GridResult(g1, g2, np.array(vals).reshape(len(g1), n2), label, label)
