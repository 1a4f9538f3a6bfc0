"""Randomized self-checks: every analytic derivative in the element is
verified against finite differences of the quantity one level up, the
rotation calculus is verified by round trips, and the assembled solver is
verified by global force balance and path independence of equilibria."""

import time

import numpy as np

from . import so3
from .cases import build_case
from .element import (ElementState, batch_energy, batch_residual,
                      batch_residual_tangent, element_energy,
                      element_residual)
from .model import Material, load_model
from .solver import SolverConfig, continuation

FD_STEP = 1e-6


def random_element_state(rng, scale=0.5):
    """A well-conditioned random element configuration."""
    mat = Material(id=0, AE=float(rng.uniform(0.5, 2.0)),
                   EI1=float(rng.uniform(0.5, 2.0)),
                   EI2=float(rng.uniform(0.5, 2.0)),
                   GJ=float(rng.uniform(0.5, 2.0)))
    X1 = rng.normal(size=3)
    X2 = X1 + rng.normal(size=3) + np.array([2.0, 0.0, 0.0])
    return ElementState(
        X1=X1, X2=X2,
        u1=scale * rng.normal(size=3), u2=scale * rng.normal(size=3),
        Lam1=so3.exp_so3(scale * rng.normal(size=3)),
        Lam2=so3.exp_so3(scale * rng.normal(size=3)),
        n=rng.normal(size=3), eta=float(1.0 + scale * rng.normal()),
        Lam01=so3.exp_so3(scale * rng.normal(size=3)),
        Lam02=so3.exp_so3(scale * rng.normal(size=3)),
        material=mat, L=float(rng.uniform(0.5, 2.0)))


def _perturbed(es, dx):
    """Move an element state along the 16 local coordinates: additive for
    eta, n, u; left multiplicative exp(hat(.)) for the two rotations."""
    return ElementState(
        X1=es.X1, X2=es.X2,
        u1=es.u1 + dx[4:7], u2=es.u2 + dx[7:10],
        Lam1=so3.exp_so3(dx[10:13]) @ es.Lam1,
        Lam2=so3.exp_so3(dx[13:16]) @ es.Lam2,
        n=es.n + dx[1:4], eta=es.eta + dx[0],
        Lam01=es.Lam01, Lam02=es.Lam02,
        material=es.material, L=es.L)


def fd_residual(es, h=FD_STEP):
    """Central finite difference of the element functional."""
    r = np.zeros(16)
    for k in range(16):
        dx = np.zeros(16)
        dx[k] = h
        r[k] = (element_energy(_perturbed(es, dx))
                - element_energy(_perturbed(es, -dx))) / (2.0 * h)
    return r

def fd_tangent(es, h=FD_STEP):
    """Symmetrized central finite difference of the element residual; the
    symmetrization matches the covariant (symmetric) analytic tangent."""
    J = np.zeros((16, 16))
    for k in range(16):
        dx = np.zeros(16)
        dx[k] = h
        J[:, k] = (element_residual(_perturbed(es, dx))
                   - element_residual(_perturbed(es, -dx))) / (2.0 * h)
    return 0.5 * (J + J.T)


def random_element_batch(trials, rng, scale=0.5):
    """Stacked random element configurations for the batched evaluators."""
    def rots(sc):
        v = sc * rng.normal(size=(trials, 3))
        return so3.exp_many(v)
    X1 = rng.normal(size=(trials, 3))
    return dict(
        X1=X1, X2=X1 + rng.normal(size=(trials, 3)) + np.array([2.0, 0, 0]),
        u1=scale * rng.normal(size=(trials, 3)),
        u2=scale * rng.normal(size=(trials, 3)),
        Lam1=rots(scale), Lam2=rots(scale),
        Lam01=rots(scale), Lam02=rots(scale),
        n=rng.normal(size=(trials, 3)),
        eta=1.0 + scale * rng.normal(size=trials),
        Ddiag=rng.uniform(0.5, 2.0, size=(trials, 3)),
        AE=rng.uniform(0.5, 2.0, size=trials),
        L=rng.uniform(0.5, 2.0, size=trials))


def _perturb_batch(b, k, h):
    """Shift coordinate k of every stacked state by h (multiplicative for
    the rotation blocks)."""
    p = dict(b)
    if k == 0:
        p["eta"] = b["eta"] + h
    elif k < 4:
        p["n"] = b["n"].copy()
        p["n"][:, k - 1] += h
    elif k < 10:
        key = "u1" if k < 7 else "u2"
        p[key] = b[key].copy()
        p[key][:, (k - 4) % 3] += h
    else:
        key = "Lam1" if k < 13 else "Lam2"
        v = np.zeros(3)
        v[(k - 10) % 3] = h
        p[key] = so3.exp_so3(v) @ b[key]
    return p


def check_residual_fd(trials=1000, seed=0, rtol=1e-6, h=FD_STEP):
    """Analytic residual vs central difference of the element functional,
    all trials evaluated in one batch per coordinate."""
    rng = np.random.default_rng(seed)
    b = random_element_batch(trials, rng)
    r = batch_residual(**b)
    rf = np.empty_like(r)
    for k in range(16):
        rf[:, k] = (batch_energy(**_perturb_batch(b, k, h))
                    - batch_energy(**_perturb_batch(b, k, -h))) / (2.0 * h)
    scale = np.maximum(1.0, np.abs(rf).max(axis=1))
    worst = float((np.abs(r - rf).max(axis=1) / scale).max())
    return worst, worst < rtol


def check_tangent_fd(trials=1000, seed=1, rtol=1e-5, h=FD_STEP):
    """Analytic tangent vs symmetrized central difference of the residual."""
    rng = np.random.default_rng(seed)
    b = random_element_batch(trials, rng)
    _, K = batch_residual_tangent(**b)
    Kf = np.empty_like(K)
    for k in range(16):
        Kf[:, :, k] = (batch_residual(**_perturb_batch(b, k, h))
                       - batch_residual(**_perturb_batch(b, k, -h))) / (2.0 * h)
    Kf = 0.5 * (Kf + np.swapaxes(Kf, 1, 2))
    scale = np.maximum(1.0, np.abs(Kf).max(axis=(1, 2)))
    worst = float((np.abs(K - Kf).max(axis=(1, 2)) / scale).max())
    return worst, worst < rtol


def check_tangent_symmetry(trials=1000, seed=2, rtol=1e-9):
    rng = np.random.default_rng(seed)
    b = random_element_batch(trials, rng)
    _, K = batch_residual_tangent(**b)
    scale = np.maximum(1.0, np.abs(K).max(axis=(1, 2)))
    asym = np.abs(K - np.swapaxes(K, 1, 2)).max(axis=(1, 2))
    worst = float((asym / scale).max())
    return worst, worst < rtol


def check_exp_log_roundtrip(trials=1000, seed=3, tol=1e-9):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        v = rng.normal(size=3)
        nv = np.linalg.norm(v)
        if nv > 0:
            v *= rng.uniform(0.0, np.pi - 1e-3) / nv
        w = so3.log_so3(so3.exp_so3(v))
        worst = max(worst, np.linalg.norm(w - v))
    return worst, worst < tol


def _cantilever_text(rng):
    n = 6
    lines = ["node %d %.6f 0 0" % (i, 2.0 * i / n) for i in range(n + 1)]
    lines.append("material 0 100 2 2 1.5")
    lines += ["element %d %d %d 0" % (i, i, i + 1) for i in range(n)]
    lines += ["fix 0 ux", "fix 0 uy", "fix 0 uz", "fix 0 rot"]
    for node in rng.choice(np.arange(1, n + 1), size=3, replace=False):
        f = 0.5 * rng.normal(size=3)
        m = 0.25 * rng.normal(size=3)
        lines.append("force %d %.6f %.6f %.6f" % (node, *f))
        lines.append("moment %d %.6f %.6f %.6f" % (node, *m))
    lines += ["steps 6", "control load"]
    return "\n".join(lines) + "\n"


def check_reaction_equilibrium(trials=20, seed=4, tol=1e-8, tmpdir=None):
    import os
    import tempfile
    rng = np.random.default_rng(seed)
    worst = 0.0
    with tempfile.TemporaryDirectory(dir=tmpdir) as td:
        for t in range(trials):
            path = os.path.join(td, f"m{t}.rod")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(_cantilever_text(rng))
            model = load_model(path)
            # moment loads are non-conservative, so the symmetrized tangent
            # converges only linearly there; allow the extra iterations
            results = continuation(model, SolverConfig(tol=1e-11, max_iter=200))
            if not all(r.converged for r in results):
                return np.inf, False
            res = results[-1]
            total = np.zeros(3)
            for (node, comp), val in res.reactions.items():
                total[comp] += val
            for bc in model.bcs:
                if bc.kind == "point-force":
                    total += np.asarray(bc.value)
            worst = max(worst, np.abs(total).max())
    return worst, worst < tol


def check_path_independence(tol=1e-8):
    """The same equilibrium must be reached regardless of the number of
    load steps used to get there."""
    case = build_case("frame_indifference")
    import os
    import tempfile
    with tempfile.TemporaryDirectory() as td:
        path = os.path.join(td, "m.rod")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(case.text)
        model = load_model(path)
        finals = []
        for steps in (8, 12):
            res = continuation(model, SolverConfig(tol=1e-12, steps=steps))
            if not all(r.converged for r in res):
                return np.inf, False
            finals.append(res[-1].state)
        a, b = finals
        err = max(np.abs(a.u - b.u).max(), np.abs(a.eta - b.eta).max(),
                  np.abs(a.n1f - b.n1f).max(),
                  max(np.linalg.norm(La - Lb)
                      for La, Lb in zip(a.Lam, b.Lam)))
    return err, err < tol


CHECKS = [
    ("element residual vs finite-difference gradient", check_residual_fd),
    ("element tangent vs finite-difference Hessian", check_tangent_fd),
    ("element tangent symmetry", check_tangent_symmetry),
    ("exp/log round trip", check_exp_log_roundtrip),
    ("reaction equilibrium", check_reaction_equilibrium),
    ("path independence of equilibria", check_path_independence),
]


def run_all(verbose=False):
    """Run every check; returns the list of failed check names."""
    failures = []
    for name, fn in CHECKS:
        t0 = time.time()
        worst, ok = fn()
        if verbose:
            status = "ok" if ok else "FAIL"
            print(f"{name:48s} {status}  worst {worst:.3e}  "
                  f"({time.time() - t0:.1f}s)")
        if not ok:
            failures.append(name)
    return failures
