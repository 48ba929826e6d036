"""Acceptance criteria, one test per criterion.

Each test records a ``[PASS]``/``[FAIL]`` line with its measured values and
runtime against the budget. The lines are printed in the pytest terminal
summary (see ``conftest.py``) and when the module is run as a script.
"""
import math
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from pulsecomp import bench, shaped
from pulsecomp import sequences as S
from pulsecomp import twoqubit as T
from pulsecomp.errors import ErrorModel, apply_sequence
from pulsecomp.expansion import balanced_commutator, interaction_terms, trotter
from pulsecomp.linalg import exp_su2, fidelity

RESULTS: list[str] = []
TH = np.pi / 2


@contextmanager
def criterion(number: int, title: str, budget: float):
    """Time the body; record PASS only if it raised nothing and met the budget."""
    notes: list[str] = []
    start = time.perf_counter()
    ok = False
    try:
        yield notes
        ok = True
    finally:
        took = time.perf_counter() - start
        on_time = took < budget
        status = "PASS" if ok and on_time else "FAIL"
        detail = "; ".join(notes)
        RESULTS.append(
            f"[{status}] criterion {number}: {title} ({took:.2f}s / budget {budget:g}s)"
            + (f" :: {detail}" if detail else "")
        )
    assert on_time, f"criterion {number} took {took:.2f}s, budget {budget}s"


def slope(seq, model):
    return bench.fit_order(bench.scan(seq, model)).slope


def slope_fn(fn, pulses=16):
    return bench.fit_order(bench.scan_function("fn", fn, pulses=pulses)).slope


def test_criterion_1_ideal_collapse():
    with criterion(1, "every catalog sequence reproduces its target at zero error", 1.0) as notes:
        worst, worst_name = 0.0, ""
        for name, build in S.FAMILIES.items():
            s = build(TH)
            loss = 1 - fidelity(s.target, apply_sequence(s, ErrorModel.amplitude(0.0)))
            if loss > worst:
                worst, worst_name = loss, name
            assert loss <= 1e-12, name
        for label, U in (("b2j", T.b2j(np.pi, 0.0)), ("b2wj", T.b2wj(np.pi, 0.0, 0.0))):
            loss = 1 - T.fidelity4(T.u_zz(np.pi), U)
            worst, worst_name = (loss, label) if loss > worst else (worst, worst_name)
            assert loss <= 1e-12, label
        notes.append(f"{len(S.FAMILIES) + 2} sequences, worst 1-F = {worst:.1e} ({worst_name or 'none'})")


def test_criterion_2_closure():
    with criterion(2, "Omega1 and Omega2 vanish for sequences of matching order", 5.0) as notes:
        max1 = max2 = 0.0
        checked = 0
        for name, build in S.FAMILIES.items():
            s = build(TH)
            for model, order in s.model_orders.items():
                if order < 1:
                    continue
                t = interaction_terms(s, ErrorModel(model))
                n1 = float(np.linalg.norm(t.omega1))
                assert n1 < 1e-10, (name, model, n1)
                max1 = max(max1, n1)
                if order >= 2:
                    n2 = float(np.linalg.norm(t.omega2))
                    assert n2 < 1e-9, (name, model, n2)
                    max2 = max(max2, n2)
                checked += 1
        notes.append(f"{checked} sequence/model pairs, max |O1| = {max1:.1e}, max |O2| = {max2:.1e}")


def test_criterion_3_sk1_magnus():
    with criterion(3, "SK1 second-order term under addressing matches the closed form", 1.0) as notes:
        for theta in (np.pi / 4, np.pi / 2, np.pi):
            t = interaction_terms(S.sk1(theta), ErrorModel.addressing(0.0))
            phi = math.acos(-theta / (4 * np.pi))
            expect = np.array([0.0, 0.0, -2 * np.pi**2 * math.sin(2 * phi)])
            err = float(np.max(np.abs(t.omega2 - expect)))
            assert err < 1e-8, (theta, t.omega2, expect)
            notes.append(f"theta={theta:.4f}: O2z={t.omega2[2]:.6f} (err {err:.1e})")


SLOPE_CASES = [
    # label, sequence builder, model, expected, tolerance
    ("plain", lambda: S.plain(TH), "amplitude", 2, 0.2),
    ("SK1 amplitude", lambda: S.sk1(TH), "amplitude", 4, 0.2),
    ("SK1 pulse_length", lambda: S.sk1(TH), "pulse_length", 4, 0.2),
    ("SK1 addressing", lambda: S.sk1(TH), "addressing", 4, 0.2),
    ("CORPSE(pi) detuning", lambda: S.corpse(np.pi), "detuning", 4, 0.15),
    ("SK2", lambda: S.sk2(TH), "amplitude", 6, 0.2),
    ("B2", lambda: S.wimperis("B2", TH), "amplitude", 6, 0.2),
    ("N2", lambda: S.wimperis("N2", TH), "addressing", 6, 0.2),
    ("P2", lambda: S.wimperis("P2", TH), "amplitude", 6, 0.2),
    ("C2", lambda: S.corpse2(TH), "detuning", 6, 0.2),
    ("SK3", lambda: S.sk_n(3, TH), "amplitude", 8, 0.3),
    ("P4", lambda: S.trotter_suzuki("P", 2, TH), "amplitude", 10, 0.3),
    ("B4", lambda: S.trotter_suzuki("B", 2, TH), "amplitude", 10, 0.3),
    ("N4", lambda: S.trotter_suzuki("N", 2, TH), "addressing", 10, 0.3),
    ("B2CORPSE amplitude", lambda: S.b2corpse(TH), "amplitude", 6, 0.2),
    ("B2CORPSE detuning", lambda: S.b2corpse(TH), "detuning", 4, 0.2),
]


def test_criterion_4_slope_laws():
    with criterion(4, "infidelity slope laws", 30.0) as notes:
        failures = []

        def check(label, value, expected, tol):
            notes.append(f"{label} {value:.3f}")
            if abs(value - expected) > tol:
                failures.append(f"{label}: {value:.3f} not {expected}+-{tol}")

        for label, build, model, expected, tol in SLOPE_CASES:
            check(label, slope(build(), model), expected, tol)
        zz = T.u_zz(np.pi)
        check("B2-J", slope_fn(lambda e: T.infidelity4(zz, T.b2j(np.pi, e))), 6, 0.2)
        check("B2-WJ eps_J", slope_fn(lambda e: T.infidelity4(zz, T.b2wj(np.pi, e, 0.0))), 6, 0.2)
        check("B2-WJ eps_A", slope_fn(lambda e: T.infidelity4(zz, T.b2wj(np.pi, 0.0, e))), 6, 0.2)
        # reported only: at theta = pi/2 the third-order term dominates the fit window
        notes.append(f"(CORPSE(pi/2) detuning {slope(S.corpse(TH), 'detuning'):.3f}, not scored)")
        assert not failures, failures


def test_criterion_5_corpse_angles():
    with criterion(5, "CORPSE angle table at theta = pi", 0.5) as notes:
        got = S.corpse_angles(np.pi, 1, 1, 0)
        expect = (7 * np.pi / 3, 5 * np.pi / 3, np.pi / 3)
        assert np.allclose(got, expect, rtol=0, atol=4 * np.finfo(float).eps * 8)
        phases = [p.phi % (2 * np.pi) for p in S.corpse(np.pi).pulses]
        assert np.allclose(phases, [0, np.pi, 0])
        notes.append("angles/pi = " + ", ".join(f"{a / np.pi:.15f}" for a in got))


def test_criterion_6_phase_factor_recursion():
    with criterion(6, "phase factor recursion f_2 = 24 and the printed value rejected", 2.0) as notes:
        assert S.ts_factor("P", 2) == 24
        theta = TH
        phase = S.trotter_suzuki("P", 2, theta).params["phase"]
        assert phase == pytest.approx(math.acos(-theta / (48 * np.pi)), abs=1e-15)
        m = ErrorModel.amplitude(0.0)
        good = float(np.linalg.norm(interaction_terms(S.trotter_suzuki("P", 2, theta), m).omega1))
        printed = S.printed_ts_factor("P", 2)
        bad = float(np.linalg.norm(interaction_terms(S.trotter_suzuki("P", 2, theta, factor=printed), m).omega1))
        assert printed == 28
        assert good < 1e-10 and bad > 1e-10
        notes.append(f"|O1| with f=24: {good:.1e}; with f=28: {bad:.3g}")


def test_criterion_7_building_blocks():
    with criterion(7, "trotter and balanced commutator convergence rates", 2.0) as notes:
        a, b = np.array([0.6, 0.1, 0.0]), np.array([0.0, 0.5, 0.3])
        exact = exp_su2(a + b)
        ns = [8, 16, 32, 64, 128, 256]
        errs = [np.linalg.norm(trotter(a, b, n) - exact) for n in ns]
        ratios = [e0 / e1 for e0, e1 in zip(errs, errs[1:])]
        assert all(1.6 <= r <= 2.4 for r in ratios), ratios
        notes.append("trotter ratios " + ", ".join(f"{r:.3f}" for r in ratios))
        target = exp_su2(np.cross(a, b))
        cerrs = [np.linalg.norm(balanced_commutator(a, b, n) - target) for n in ns]
        rate = -np.polyfit(np.log(ns), np.log(cerrs), 1)[0]
        assert rate == pytest.approx(1.0, abs=0.1), rate
        notes.append(f"commutator error order {rate:.3f}")


def test_criterion_8_two_qubit_structure():
    with criterion(8, "product-operator basis, Cartan closure and B2-J slope", 5.0) as notes:
        gram_err = float(np.max(np.abs(T.gram() - np.eye(15))))
        assert gram_err < 1e-14
        worst = 0.0
        for left, right, lands in (
            (T.LOCAL_KEYS, T.LOCAL_KEYS, T.LOCAL_KEYS),
            (T.NONLOCAL_KEYS, T.NONLOCAL_KEYS, T.LOCAL_KEYS),
            (T.NONLOCAL_KEYS, T.LOCAL_KEYS, T.NONLOCAL_KEYS),
        ):
            for x in left:
                for y in right:
                    M = T.bracket(T.BASIS[x], T.BASIS[y])
                    c = dict(zip(T.BASIS_KEYS, T.coefficients(M)))
                    resid = np.linalg.norm(M - sum(c[k] * T.BASIS[k] for k in lands))
                    worst = max(worst, float(resid))
        assert worst < 1e-12
        zz = T.u_zz(np.pi)
        s = slope_fn(lambda e: T.infidelity4(zz, T.b2j(np.pi, e)))
        assert abs(s - 6) <= 0.2
        notes.append(f"gram err {gram_err:.1e}, bracket residual {worst:.1e}, B2-J slope {s:.3f}")


def test_criterion_9_shaped_consistency():
    with criterion(9, "CORPSE as a waveform matches square pulses", 3.0) as notes:
        s = S.corpse(TH)
        w = shaped.from_pulses(s.pulses)
        worst = 0.0
        for delta in (0.0, 0.1, 0.3):
            fw = fidelity(s.target, shaped.propagate(w, delta))
            fs = fidelity(s.target, apply_sequence(s, ErrorModel.detuning(delta)))
            worst = max(worst, abs(fw - fs))
        assert worst < 1e-8
        c, si = shaped.first_order_residuals(w)
        assert max(abs(c), abs(si)) < 1e-10
        pc, ps = shaped.first_order_residuals(shaped.constant(TH, 1.0))
        closed = (math.sin(TH) / TH, (1 - math.cos(TH)) / TH)
        assert max(abs(pc), abs(ps)) > 1e-10
        assert np.allclose((pc, ps), closed, atol=1e-13)
        notes.append(f"max |dF| {worst:.1e}; CORPSE residuals ({c:.1e}, {si:.1e}); plain c={pc:.6f}")


def test_criterion_10_grid_containment():
    with criterion(10, "B2CORPSE 0.01 region strictly contains the plain pulse's", 30.0) as notes:
        g = np.linspace(-0.3, 0.3, 41)
        comp, plain = S.b2corpse(TH), S.plain(TH)
        for model in ("amplitude_detuning", "pulse_length_detuning"):
            a = bench.grid2(comp, model, g, g, workers=4)
            b = bench.grid2(plain, model, g, g, workers=4)
            assert a.contains(b), model
            notes.append(f"{model}: {int(a.mask.sum())} vs {int(b.mask.sum())} cells")


if __name__ == "__main__":
    # pytest imports this file again under its module name; read that copy's results
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider", "--no-summary"])
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    print("\n".join(getattr(mod, "RESULTS", RESULTS)))
    sys.exit(code)
