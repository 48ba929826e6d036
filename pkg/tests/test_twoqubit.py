import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm, logm

from pulsecomp import bench
from pulsecomp import sequences as S
from pulsecomp import twoqubit as T
from pulsecomp.errors import ErrorModel, Pulse, apply_sequence
from pulsecomp.linalg import HX, HY, HZ, euler_unitary, random_su2, rotation
from pulsecomp.sequences import Sequence, SynthesisError

angle = st.floats(-7.0, 7.0)
I2 = np.eye(2)
PAULI = {"1": I2, "x": 2 * HX, "y": 2 * HY, "z": 2 * HZ}


def phase_equal(U, V, tol=1e-12):
    return 1 - T.fidelity4(U, V) < tol


def projection_residual(M, keys):
    c = dict(zip(T.BASIS_KEYS, T.coefficients(M)))
    rebuilt = sum(c[k] * T.BASIS[k] for k in keys)
    return np.linalg.norm(M - rebuilt)


def test_basis_is_orthonormal():
    assert len(T.BASIS) == 15
    assert np.allclose(T.gram(), np.eye(15), atol=1e-14)
    # independent construction from Pauli matrices: 2 (s_mu/2) (x) (s_nu/2)
    for key, M in T.BASIS.items():
        mu, nu = key
        assert np.allclose(M, np.kron(PAULI[mu], PAULI[nu]) / 2)


def test_cartan_commutation_relations():
    k = [T.BASIS[x] for x in T.LOCAL_KEYS]
    m = [T.BASIS[x] for x in T.NONLOCAL_KEYS]
    assert len(k) == 6 and len(m) == 9
    for A, B in itertools.product(k, k):
        assert projection_residual(T.bracket(A, B), T.LOCAL_KEYS) < 1e-12
    for A, B in itertools.product(m, m):
        assert projection_residual(T.bracket(A, B), T.LOCAL_KEYS) < 1e-12
    for A, B in itertools.product(m, k):
        assert projection_residual(T.bracket(A, B), T.NONLOCAL_KEYS) < 1e-12


def test_u_zz_examples():
    assert np.allclose(T.u_zz(0.0), np.eye(4))
    th = 0.77
    e = np.exp(-0.5j * th)
    assert np.allclose(T.u_zz(th), np.diag([e, e.conj(), e.conj(), e]))
    assert np.allclose(T.u_zz(th), expm(-1j * th * np.kron(HZ, HZ) * 2))


@given(angle, angle)
def test_u_zz_is_additive(a, b):
    assert np.allclose(T.u_zz(a) @ T.u_zz(b), T.u_zz(a + b), atol=1e-12)


@given(angle, angle, angle, angle)
def test_local_rotations(t1, p1, t2, p2):
    A, B = T.local(1, t1, p1), T.local(2, t2, p2)
    assert np.allclose(A @ B, B @ A, atol=1e-12)
    assert np.allclose(A @ B, np.kron(rotation(t1, p1), rotation(t2, p2)), atol=1e-12)


def test_local_projection_examples():
    assert np.allclose(T.local(1, 0.0, 0.3), np.eye(4))
    for q, phi in [(1, 0.0), (1, np.pi / 2), (2, 0.0)]:
        L = 1j * logm(T.local(q, 0.8, phi))
        c = dict(zip(T.BASIS_KEYS, T.coefficients(L)))
        expect = 0.8 if (q, phi) == (1, 0.0) else 0.0
        assert c["x1"] == pytest.approx(expect, abs=1e-12)


def test_cartan_a_examples():
    assert np.allclose(T.cartan_a(0, 0, 0), np.eye(4))
    a = 0.9
    Ky = T.local(1, np.pi / 2, np.pi / 2) @ T.local(2, np.pi / 2, np.pi / 2)
    assert np.allclose(T.cartan_a(a, 0, 0), Ky @ T.u_zz(a) @ Ky.conj().T, atol=1e-14)
    assert np.allclose(T.cartan_a(a, 0, 0), expm(-1j * a * T.BASIS["xx"]), atol=1e-12)
    assert np.allclose(T.cartan_a(0, a, 0), expm(-1j * a * T.BASIS["yy"]), atol=1e-12)


@given(angle, angle, angle)
def test_cartan_a_factor_order_is_irrelevant(x, y, z):
    ref = T.cartan_a(x, y, z)
    for order in ("xyz", "xzy", "yxz", "yzx", "zxy", "zyx"):
        assert np.allclose(T.cartan_a(x, y, z, order), ref, atol=1e-12)
    oracle = expm(-1j * (x * T.BASIS["xx"] + y * T.BASIS["yy"] + z * T.BASIS["zz"]))
    assert np.allclose(ref, oracle, atol=1e-11)


def test_kak_examples():
    zero = ((0, 0, 0), (0, 0, 0))
    assert np.allclose(T.kak_synthesize(zero, (0, 0, 0), zero), np.eye(4))
    e1, e2, e3, e4 = (0.3, 1.1, 2.0), (1.5, 0.2, 0.7), (0.9, 0.4, 3.0), (2.2, 1.3, 0.1)
    U = T.kak_synthesize((e1, e2), (0, 0, 0), (e3, e4))
    expect = np.kron(euler_unitary(e1) @ euler_unitary(e3), euler_unitary(e2) @ euler_unitary(e4))
    assert np.allclose(U, expect, atol=1e-12)
    with pytest.raises(ValueError):
        T.kak_synthesize(zero, (np.nan, 0, 0), zero)


@settings(max_examples=30)
@given(st.lists(st.floats(0, 12), min_size=15, max_size=15))
def test_kak_random_is_unitary(x):
    U = T.kak_synthesize((x[0:3], x[3:6]), x[6:9], (x[9:12], x[12:15]))
    assert T.is_unitary(U)
    assert abs(abs(np.linalg.det(U)) - 1) < 1e-12


def test_cal_r_examples():
    assert np.allclose(T.cal_r(0.7, 0.0), T.u_zz(0.7))
    th, ph = 1.3, 0.4
    oracle = expm(-1j * th * (np.cos(ph) * T.BASIS["zz"] + np.sin(ph) * T.BASIS["yz"]))
    assert np.allclose(T.cal_r(th, ph), oracle, atol=1e-12)
    c = dict(zip(T.BASIS_KEYS, T.coefficients(1j * logm(T.cal_r(th, ph)))))
    assert c["yz"] == pytest.approx(th * np.sin(ph), abs=1e-12)
    assert c["zz"] == pytest.approx(th * np.cos(ph), abs=1e-12)
    # 2 pi rotation is -1 in the su(2) copy, as for a single qubit
    assert np.allclose(T.cal_r(2 * np.pi, 0.9), -np.eye(4), atol=1e-12)


def test_subalgebra_map_preserves_brackets():
    H = {"x": HX, "y": HY, "z": HZ}
    for a, b in itertools.product("xyz", repeat=2):
        single = -1j * (H[a] @ H[b] - H[b] @ H[a])
        v = np.array([2 * np.trace(single @ H[k]).real for k in "xyz"])
        image = T.bracket(T.SUBALGEBRA_MAP[a], T.SUBALGEBRA_MAP[b])
        assert np.linalg.norm(image - T.embed(v)) < 1e-12


@given(angle, angle)
def test_cal_r_is_image_of_single_qubit_rotation(theta, phi):
    # the image is defined through the principal logarithm, so only up to the centre (-1)
    assert phase_equal(T.cal_r(theta, phi), T.subgroup_image(rotation(theta, phi)), 1e-12)


def test_subgroup_image_is_homomorphism():
    rng = np.random.default_rng(9)
    for _ in range(20):
        A, B = random_su2(rng), random_su2(rng)
        assert phase_equal(T.subgroup_image(A @ B), T.subgroup_image(A) @ T.subgroup_image(B), 1e-12)


@pytest.mark.parametrize("family,expected", [("plain", 2), ("sk1", 4), ("b2", 6), ("p2", 6)])
def test_transplanted_sequences_keep_their_order(family, expected):
    s = S.get_family(family)(np.pi / 2)
    target = T.transplant(s)
    r = bench.scan_function(family, lambda e: T.infidelity4(target, T.transplant(s, e)), pulses=len(s))
    assert bench.fit_order(r).slope == pytest.approx(expected, abs=0.2)
    single = bench.fit_order(bench.scan(s, "amplitude")).slope
    assert bench.fit_order(r).slope == pytest.approx(single, abs=0.05)


def test_transplant_rejects_nonplanar():
    z = Sequence((Pulse(1.0, 0.0, "z"),), np.eye(2), "z")
    with pytest.raises(SynthesisError):
        T.transplant(z)


def test_fidelity4_is_phase_invariant():
    rng = np.random.default_rng(2)
    U = T.kak_synthesize((rng.random(3), rng.random(3)), rng.random(3), (rng.random(3), rng.random(3)))
    assert T.fidelity4(U, U * np.exp(0.7j)) == pytest.approx(1)
    assert T.fidelity4(U, T.u_zz(0.3) @ U) < 1
    assert abs(np.linalg.det(T.normalize_phase(U * np.exp(0.4j))) - 1) < 1e-12


@pytest.mark.parametrize("theta", [np.pi / 2, np.pi, 3.0])
def test_b2j_is_exact_without_error(theta):
    assert phase_equal(T.b2j(theta, 0.0), T.u_zz(theta))
    assert phase_equal(T.b2wj(theta, 0.0, 0.0), T.u_zz(theta))
    assert T.b2j_phase(theta) == pytest.approx(np.arccos(-theta / (4 * np.pi)))
    assert T.b2j_phase(theta) == pytest.approx(S.wimperis("B2", theta).params["phase"])


def test_b2j_theta_range():
    with pytest.raises(SynthesisError):
        T.b2j(4 * np.pi + 0.1, 0.0)
    with pytest.raises(SynthesisError):
        T.b2wj(-0.1, 0.0, 0.0)


def slope_of(fn):
    return bench.fit_order(bench.scan_function("f", fn, pulses=16)).slope


def test_b2j_coupling_slope():
    th = np.pi
    target = T.u_zz(th)
    assert slope_of(lambda e: T.infidelity4(target, T.b2j(th, e))) == pytest.approx(6, abs=0.2)
    assert slope_of(lambda e: T.infidelity4(target, T.uncompensated(th, e))) == pytest.approx(2, abs=0.1)


def test_b2wj_slopes_in_each_error():
    th = np.pi
    target = T.u_zz(th)
    assert slope_of(lambda e: T.infidelity4(target, T.b2wj(th, e, 0.0))) == pytest.approx(6, abs=0.2)
    assert slope_of(lambda e: T.infidelity4(target, T.b2wj(th, 0.0, e))) == pytest.approx(6, abs=0.2)
    # along the diagonal eps_A = eps_J the B2 frames keep order 2
    assert slope_of(lambda e: T.infidelity4(target, T.b2wj(th, e, e))) == pytest.approx(6, abs=0.2)


def test_bare_frames_leave_a_cross_term():
    th = np.pi
    target = T.u_zz(th)
    # bare frame pulses are undone by exact inverses, so eps_A alone is invisible
    assert T.infidelity4(target, T.b2j_bare(th, 0.0, 0.1)) < 1e-28
    # but the eps_A eps_J cross term survives: infidelity ~ eps**4 on the diagonal
    assert slope_of(lambda e: T.infidelity4(target, T.b2j_bare(th, e, e))) == pytest.approx(4, abs=0.15)


def test_b2wj_beats_uncompensated_at_joint_error():
    th = np.pi
    target = T.u_zz(th)
    comp = T.infidelity4(target, T.b2wj(th, 0.1, 0.1))
    bare = T.infidelity4(target, T.uncompensated(th, 0.1))
    assert comp < bare
    assert comp < T.infidelity4(target, T.b2j_bare(th, 0.1, 0.1))


def test_b2_local_block_matches_single_qubit_b2():
    s = S.wimperis("B2", 0.7)
    U = apply_sequence(s, ErrorModel.amplitude(0.05))
    assert np.allclose(T._b2_local(0.7, 0.0, 0.05), np.kron(U, I2))


def test_json_round_trip():
    U = T.kak_synthesize(((0.1, 0.2, 0.3), (0.4, 0.5, 0.6)), (0.7, 0.8, 0.9), ((1, 2, 3), (4, 5, 6)))
    assert np.array_equal(T.from_json(T.to_json(U)), U)
