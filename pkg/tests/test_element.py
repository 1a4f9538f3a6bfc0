"""Element-level verification: finite-difference oracles for the residual
and tangent, invariance properties, and hand-computed tangent entries."""

import numpy as np
import pytest

from rodfe import so3
from rodfe.checks import (fd_residual, fd_tangent, random_element_batch,
                          random_element_state)
from rodfe.element import (ElementState, batch_residual,
                           batch_residual_tangent, bending_strain,
                           element_energy, element_residual,
                           element_residual_tangent, element_tangent, gauss2)
from rodfe.model import Material

rng = np.random.default_rng(7)


def straight_reference(L=2.0, AE=3.0):
    mat = Material(id=0, AE=AE, EI1=1.0, EI2=1.5, GJ=0.8)
    return ElementState(
        X1=np.zeros(3), X2=np.array([L, 0.0, 0.0]),
        u1=np.zeros(3), u2=np.zeros(3),
        Lam1=np.eye(3), Lam2=np.eye(3),
        n=np.zeros(3), eta=1.0,
        Lam01=np.eye(3), Lam02=np.eye(3),
        material=mat, L=L)


def test_gauss2_integrates_cubics():
    c, w = gauss2()
    for p in range(4):
        assert np.sum(w * c ** p) == pytest.approx(1.0 / (p + 1))


def test_reference_state_is_equilibrium():
    es = straight_reference()
    assert np.abs(element_residual(es)).max() < 1e-14
    assert element_energy(es) == pytest.approx(0.0, abs=1e-15)


def test_rigid_motion_leaves_energy_zero():
    es = straight_reference()
    Q = so3.exp_so3(rng.normal(size=3))
    c = rng.normal(size=3)
    es.u1 = Q @ es.X1 + c - es.X1
    es.u2 = Q @ es.X2 + c - es.X2
    es.Lam1 = Q
    es.Lam2 = Q
    assert element_energy(es) == pytest.approx(0.0, abs=1e-13)
    assert np.abs(element_residual(es)).max() < 1e-13


def test_energy_objectivity():
    """Superposing a rigid motion on any deformed state preserves the
    element functional (the constraint term sees only relative geometry)."""
    for _ in range(10):
        es = random_element_state(rng)
        W = element_energy(es)
        Q = so3.exp_so3(rng.normal(size=3))
        c = rng.normal(size=3)
        es2 = ElementState(
            X1=es.X1, X2=es.X2,
            u1=Q @ (es.X1 + es.u1) + c - es.X1,
            u2=Q @ (es.X2 + es.u2) + c - es.X2,
            Lam1=Q @ es.Lam1, Lam2=Q @ es.Lam2,
            n=es.n, eta=es.eta, Lam01=es.Lam01, Lam02=es.Lam02,
            material=es.material, L=es.L)
        assert element_energy(es2) == pytest.approx(W, rel=1e-12, abs=1e-12)


def test_bending_strain_constant_along_element():
    """The geodesic rotation field has constant material curvature, so the
    finite-difference curvature at interior points equals the closed form."""
    L = 1.7
    Lam1 = so3.exp_so3(rng.normal(size=3) * 0.4)
    Lam2 = so3.exp_so3(rng.normal(size=3) * 0.4)
    Om, _ = bending_strain(Lam1, Lam2, np.eye(3), np.eye(3), L)
    psi = so3.log_so3(Lam2 @ Lam1.T)
    h = 1e-7
    for c in (0.2, 0.5, 0.7):
        Lam = lambda t: so3.exp_so3(t * psi) @ Lam1
        dLam = (Lam(c + h) - Lam(c - h)) / (2 * h * L)
        Om_fd = so3._vee_unchecked(Lam(c).T @ dLam
                                   - 0.5 * (Lam(c).T @ dLam
                                            + dLam.T @ Lam(c)))
        assert np.linalg.norm(Om_fd - Om) < 1e-6


def test_residual_matches_fd_of_energy():
    for _ in range(25):
        es = random_element_state(rng)
        r = element_residual(es)
        rf = fd_residual(es)
        assert np.abs(r - rf).max() < 1e-6 * max(1.0, np.abs(rf).max())


def test_tangent_matches_symmetrized_fd_of_residual():
    for _ in range(25):
        es = random_element_state(rng)
        K = element_tangent(es)
        Kf = fd_tangent(es)
        assert np.abs(K - Kf).max() < 1e-5 * max(1.0, np.abs(Kf).max())


def test_tangent_exactly_symmetric():
    es = random_element_state(rng)
    K = element_tangent(es)
    assert np.abs(K - K.T).max() == 0.0


def test_known_tangent_entries():
    """d r_eta / d eta = AE L and d r_eta / d n1 = -L at any state."""
    es = random_element_state(rng)
    K = element_tangent(es)
    assert K[0, 0] == pytest.approx(es.material.AE * es.L, rel=1e-12)
    assert K[0, 1] == pytest.approx(-es.L, rel=1e-12)


def test_residual_tangent_pair_consistent():
    es = random_element_state(rng)
    r, K = element_residual_tangent(es)
    assert np.allclose(r, element_residual(es))
    assert np.allclose(K, element_tangent(es))


def test_nodal_loads_enter_residual():
    es = straight_reference()
    f1, f2 = rng.normal(size=3), rng.normal(size=3)
    m1, m2 = rng.normal(size=3), rng.normal(size=3)
    r = element_residual(es, loads=(f1, f2, m1, m2))
    assert np.allclose(r[4:7], -f1)
    assert np.allclose(r[7:10], -f2)
    assert np.allclose(r[10:13], -m1)
    assert np.allclose(r[13:16], -m2)


def test_batched_path_matches_scalar():
    b = random_element_batch(30, rng)
    rb = batch_residual(**b)
    rb2, Kb = batch_residual_tangent(**b)
    assert np.allclose(rb, rb2, atol=1e-14)
    for e in range(30):
        mat = Material(id=0, AE=float(b["AE"][e]), GJ=float(b["Ddiag"][e][0]),
                       EI1=float(b["Ddiag"][e][1]), EI2=float(b["Ddiag"][e][2]))
        es = ElementState(
            X1=b["X1"][e], X2=b["X2"][e], u1=b["u1"][e], u2=b["u2"][e],
            Lam1=b["Lam1"][e], Lam2=b["Lam2"][e], n=b["n"][e],
            eta=float(b["eta"][e]), Lam01=b["Lam01"][e], Lam02=b["Lam02"][e],
            material=mat, L=float(b["L"][e]))
        assert np.abs(element_residual(es) - rb[e]).max() < 1e-12
        assert np.abs(element_tangent(es) - Kb[e]).max() < 1e-12


def test_pure_stretch_energy_and_force():
    es = straight_reference(L=2.0, AE=3.0)
    es.eta = 1.25
    assert element_energy(es) == pytest.approx(
        2.0 * 0.5 * 3.0 * 0.25 ** 2 - 2.0 * 1.25 * 0.0)
    r = element_residual(es)
    assert r[0] == pytest.approx(2.0 * 3.0 * 0.25)
