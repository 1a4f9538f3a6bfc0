"""Rotation-calculus unit tests: closed-form maps, their inverses and
tangent maps, checked by algebraic identities and finite differences."""

import numpy as np
import pytest

from rodfe import so3

rng = np.random.default_rng(12345)


def random_rotation(scale=np.pi - 0.2):
    v = rng.normal(size=3)
    v *= rng.uniform(0.0, scale) / np.linalg.norm(v)
    return so3.exp_so3(v)


def test_hat_basics():
    assert np.allclose(so3.hat([0, 0, 1]),
                       [[0, -1, 0], [1, 0, 0], [0, 0, 0]])
    assert np.allclose(so3.hat([0, 0, 0]), np.zeros((3, 3)))
    assert np.allclose(so3.hat([1, 0, 0]) @ [0, 1, 0], [0, 0, 1])


def test_hat_is_cross_product():
    for _ in range(20):
        v, w = rng.normal(size=3), rng.normal(size=3)
        assert np.allclose(so3.hat(v) @ w, np.cross(v, w))


def test_vee_inverse_of_hat():
    v = np.array([0.3, -1.2, 2.0])
    assert np.allclose(so3.vee(so3.hat(v)), v)
    assert np.allclose(so3.vee(np.zeros((3, 3))), np.zeros(3))


def test_vee_rejects_symmetric_part():
    with pytest.raises(so3.SkewError):
        so3.vee(np.eye(3))


def test_exp_identity_and_half_turn():
    assert np.allclose(so3.exp_so3(np.zeros(3)), np.eye(3))
    assert np.allclose(so3.exp_so3([0, 0, np.pi]), np.diag([-1.0, -1.0, 1.0]))


def test_exp_orthonormality():
    for _ in range(50):
        R = so3.exp_so3(rng.normal(size=3))
        assert np.linalg.norm(R.T @ R - np.eye(3)) < 1e-12
        assert abs(np.linalg.det(R) - 1.0) < 1e-12


def test_exp_small_angle_matches_series():
    for _ in range(20):
        v = rng.normal(size=3)
        v *= rng.uniform(0.0, 1e-4) / np.linalg.norm(v)
        P = so3.hat(v)
        series = np.eye(3)
        term = np.eye(3)
        for k in range(1, 13):
            term = term @ P / k
            series = series + term
        assert np.abs(so3.exp_so3(v) - series).max() < 1e-14


def test_exp_log_roundtrip():
    for _ in range(1000):
        v = rng.normal(size=3)
        v *= rng.uniform(0.0, np.pi - 0.01) / np.linalg.norm(v)
        assert np.linalg.norm(so3.log_so3(so3.exp_so3(v)) - v) < 1e-9


def test_log_branch_guard():
    v = np.array([0.0, 0.0, np.pi - 1e-8])
    with pytest.raises(so3.BranchError):
        so3.log_so3(so3.exp_so3(v))


def test_log_near_pi_axis_extraction():
    # just inside the principal branch: angle within 1e-3 of pi
    v = np.array([0.3, -0.4, 0.2])
    v *= (np.pi - 5e-4) / np.linalg.norm(v)
    w = so3.log_so3(so3.exp_so3(v))
    assert np.linalg.norm(w - v) < 1e-8


def test_geodesic_endpoints_and_subgroup():
    R1, R2 = random_rotation(1.0), random_rotation(1.0)
    assert np.allclose(so3.geodesic(R1, R2, 0.0), R1)
    assert np.allclose(so3.geodesic(R1, R2, 1.0), R2)
    th = 0.8
    G = so3.geodesic(np.eye(3), so3.exp_so3([0, 0, th]), 0.5)
    assert np.allclose(G, so3.exp_so3([0, 0, th / 2]))


def test_geodesic_left_equivariance():
    R1, R2, Q = random_rotation(1.0), random_rotation(1.0), random_rotation()
    t = 0.37
    assert np.allclose(so3.geodesic(Q @ R1, Q @ R2, t),
                       Q @ so3.geodesic(R1, R2, t), atol=1e-12)


def test_geodesic_constant_increment():
    R1, R2 = random_rotation(1.0), random_rotation(1.0)
    psi = so3.log_so3(R2 @ R1.T)
    for t, s in [(0.2, 0.3), (0.0, 0.7), (0.4, 0.5)]:
        Ga = so3.geodesic(R1, R2, t + s)
        Gb = so3.geodesic(R1, R2, t)
        assert np.linalg.norm(so3.log_so3(Ga @ Gb.T) - s * psi) < 1e-10


def test_metric_pullback_and_bi_invariance():
    e = np.eye(3)
    assert so3.so3_metric(so3.hat(e[0]), so3.hat(e[0])) == pytest.approx(1.0)
    assert so3.so3_metric(so3.hat(e[0]), so3.hat(e[1])) == pytest.approx(0.0)
    a, b = rng.normal(size=3), rng.normal(size=3)
    assert so3.so3_metric(so3.hat(a), so3.hat(b)) == pytest.approx(a @ b)
    Q = random_rotation()
    U, V = so3.hat(a), so3.hat(b)
    assert so3.so3_metric(Q @ U @ Q.T, Q @ V @ Q.T) == pytest.approx(
        so3.so3_metric(U, V))


def test_metric_covariant_identity():
    a, b, c = (rng.normal(size=3) for _ in range(3))
    lhs = so3.so3_metric(so3.hat(0.5 * np.cross(a, b)), so3.hat(c))
    assert lhs == pytest.approx(0.5 * np.cross(a, b) @ c)


def test_dexp_identity_and_commuting_direction():
    assert np.allclose(so3.dexp(np.zeros(3)), np.eye(3))
    psi = np.array([0.0, 0.0, 1.3])
    assert np.allclose(so3.dexp(psi) @ [0, 0, 1], [0, 0, 1])


def test_dexp_finite_difference_invariant():
    psi = np.array([0.4, -0.2, 0.7])
    for _ in range(10):
        delta = rng.normal(size=3)
        h = 1e-7
        fd = so3.log_so3(so3.exp_so3(psi + h * delta)
                         @ so3.exp_so3(psi).T) / h
        assert np.linalg.norm(so3.dexp(psi) @ delta - fd) < 1e-6 * (
            1.0 + np.linalg.norm(delta))


def test_dexpinv_is_inverse_of_dexp():
    for _ in range(20):
        psi = rng.normal(size=3)
        psi *= rng.uniform(0, 2.5) / np.linalg.norm(psi)
        assert np.allclose(so3.dexp(psi) @ so3.dexpinv(psi), np.eye(3),
                           atol=1e-12)


def test_ddexp_matches_finite_difference():
    psi = np.array([0.4, -0.9, 0.3])
    d = np.array([0.2, 0.5, -0.1])
    h = 1e-6
    fd = (so3.dexp(psi + h * d) - so3.dexp(psi - h * d)) / (2 * h)
    assert np.abs(so3.ddexp(psi, d) - fd).max() < 1e-8
    fdi = (so3.dexpinv(psi + h * d) - so3.dexpinv(psi - h * d)) / (2 * h)
    assert np.abs(so3.ddexpinv(psi, d) - fdi).max() < 1e-8


def test_batched_helpers_match_scalar():
    vs = rng.normal(size=(40, 3))
    vs[0] = 0.0
    vs[1] *= 1e-9 / np.linalg.norm(vs[1])
    vs[2] *= 3.0 / np.linalg.norm(vs[2])
    Rb = so3.exp_many(vs)
    for v, R in zip(vs, Rb):
        assert np.abs(R - so3.exp_so3(v)).max() < 1e-14
    assert np.abs(so3.hat_many(vs)[5] - so3.hat(vs[5])).max() == 0.0
    assert np.abs(so3.vee_many(so3.hat_many(vs)) - vs).max() == 0.0
    logs = so3.log_many(Rb)
    for v, w in zip(vs, logs):
        assert np.linalg.norm(so3.log_so3(so3.exp_so3(v)) - w) < 1e-12
    Tb = so3.dexp_many(vs)
    Tib = so3.dexpinv_many(vs)
    for v, T, Ti in zip(vs, Tb, Tib):
        assert np.abs(T - so3.dexp(v)).max() < 1e-14
        assert np.abs(Ti - so3.dexpinv(v)).max() < 1e-14
