"""Global assembly, boundary conditions and Newton continuation.

The global system is the indefinite saddle-point matrix of the mixed
functional; it is solved by a sparse direct factorization.  Displacement
conditions are imposed by setting the prescribed values at the start of a
step and eliminating the corresponding rows and columns.  Rotation
conditions are imposed by Lagrange-multiplier rows appended to the
reduced system: the constraint c(Lam) = vee(M - M^t) with M = target^t
Lam vanishes exactly when the nodal rotation reaches its target.

Updates are additive for u, n, eta and the multipliers; rotations are
updated multiplicatively, Lam <- exp(hat(dlam)) Lam, so iterates stay on
the rotation manifold.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from . import so3
from .element import batch_residual_tangent
from .model import DofMap, State


@dataclass
class SolverConfig:
    tol: float = 1e-5
    max_iter: int = 30
    steps: int | None = None          # overrides the model's load program


@dataclass
class StepResult:
    converged: bool
    iterations: int
    residual_norm: float
    residual_history: list
    state: State
    reactions: dict                   # (node, component) -> force
    rotation_moments: dict            # node -> multiplier vector
    factor: float = 1.0


class SingularSystemError(RuntimeError):
    pass


@dataclass
class GlobalSystem:
    K: sp.csr_matrix
    R: np.ndarray
    dofs: DofMap


def _assembly_cache(model):
    """Static per-element gather data and scatter indices, built once per
    model and reused across assemblies."""
    cache = getattr(model, "_assembly_cache", None)
    if cache is not None:
        return cache
    dofs = DofMap(model)
    na = np.array([el.node_a for el in model.elements])
    nb = np.array([el.node_b for el in model.elements])
    gidx = np.empty((len(model.elements), 16), dtype=int)
    for e, el in enumerate(model.elements):
        gidx[e] = np.concatenate([
            [dofs.eta(el.id)],
            np.arange(dofs.force(el.id).start, dofs.force(el.id).stop),
            np.arange(dofs.u(el.node_a).start, dofs.u(el.node_a).stop),
            np.arange(dofs.u(el.node_b).start, dofs.u(el.node_b).stop),
            np.arange(dofs.lam(el.node_a).start, dofs.lam(el.node_a).stop),
            np.arange(dofs.lam(el.node_b).start, dofs.lam(el.node_b).stop),
        ])
    mats = [model.material_of(el) for el in model.elements]
    cache = dict(
        dofs=dofs, na=na, nb=nb, gidx=gidx,
        rows=np.repeat(gidx, 16, axis=1).ravel(),
        cols=np.tile(gidx, 16).ravel(),
        X=np.array([nd.X for nd in model.nodes]),
        Lam01=np.array([el.Lam0_a for el in model.elements]),
        Lam02=np.array([el.Lam0_b for el in model.elements]),
        Ddiag=np.array([m.stiffness_diag() for m in mats]),
        AE=np.array([m.AE for m in mats]),
        L=np.array([el.L for el in model.elements]))
    model._assembly_cache = cache
    return cache


def assemble(model, state, loads=None):
    """Tangent and residual summed over elements; nodal loads (dict
    node -> (force, moment)) are subtracted into the residual."""
    c = _assembly_cache(model)
    dofs = c["dofs"]
    na, nb = c["na"], c["nb"]
    r, Ke = batch_residual_tangent(
        c["X"][na], c["X"][nb], state.u[na], state.u[nb],
        state.Lam[na], state.Lam[nb], c["Lam01"], c["Lam02"],
        state.n1f, state.eta, c["Ddiag"], c["AE"], c["L"])
    R = np.zeros(dofs.size)
    np.add.at(R, c["gidx"].ravel(), r.ravel())
    if loads:
        for node, (f, m) in loads.items():
            R[dofs.u(node)] -= f
            R[dofs.lam(node)] -= m
    K = sp.coo_matrix((Ke.ravel(), (c["rows"], c["cols"])),
                      shape=(dofs.size, dofs.size)).tocsr()
    return GlobalSystem(K=K, R=R, dofs=dofs)


def _rotation_constraint(Lam, target, rmult):
    """Residual c, Jacobian B w.r.t. the left rotation increment, the
    multiplier's contribution to the nodal moment residual, and the
    second-derivative block weighted by the current multiplier."""
    M = target.T @ Lam
    c = so3._vee_unchecked(M - M.T)
    B = np.zeros((3, 3))
    H = np.zeros((3, 3))
    for p in range(3):
        Ep = so3.hat(np.eye(3)[p])
        S = target.T @ Ep @ Lam
        B[:, p] = so3._vee_unchecked(S - S.T)
        for q in range(3):
            Eq = so3.hat(np.eye(3)[q])
            S2 = target.T @ Ep @ Eq @ Lam
            H[p, q] = rmult @ so3._vee_unchecked(S2 - S2.T)
    H = 0.5 * (H + H.T)
    return c, B, B.T @ rmult, H


def _resolve_step_bcs(model, factor):
    """Scale the boundary data for one continuation step.

    Load control: forces, moments, prescribed displacements and rotation
    targets all scale with the factor.  Displacement control: the control
    displacement scales, while forces and moments are applied at full
    value from the first step (perturbation loads held constant).
    """
    prog = model.program
    disp_control = prog.control == "displacement"
    load_factor = 1.0 if disp_control else factor
    fixed, loads, rot_targets = {}, {}, {}
    for bc in model.bcs:
        if bc.kind == "fix-displacement-component":
            fixed[(bc.node, bc.component)] = 0.0
        elif bc.kind == "prescribe-displacement-component":
            fixed[(bc.node, bc.component)] = factor * bc.value
        elif bc.kind == "fix-rotation":
            rot_targets[bc.node] = np.eye(3)
        elif bc.kind == "prescribe-rotation":
            rot_targets[bc.node] = so3.exp_so3(factor * np.asarray(bc.value))
        elif bc.kind in ("point-force", "point-moment"):
            f, m = loads.setdefault(bc.node, (np.zeros(3), np.zeros(3)))
            if bc.kind == "point-force":
                f += load_factor * np.asarray(bc.value)
            else:
                m += load_factor * np.asarray(bc.value)
    if disp_control:
        if prog.control_node is None:
            raise ValueError("displacement control needs a control DOF")
        fixed[(prog.control_node, prog.control_dof)] = factor * prog.control_target
    return fixed, loads, rot_targets


def newton_solve(model, state, fixed, loads, rot_targets, config):
    """One load step of Newton's method; state is modified in place."""
    dofs = DofMap(model)
    for (node, comp), val in fixed.items():
        state.u[node, comp] = val
    elim = np.array(sorted(3 * node + comp for node, comp in fixed), dtype=int)
    free = np.setdiff1d(np.arange(dofs.size), elim)
    rot_nodes = sorted(rot_targets)
    rmult = {node: np.zeros(3) for node in rot_nodes}
    naug = 3 * len(rot_nodes)

    history = []
    converged = False
    iterations = 0
    system = None
    for it in range(config.max_iter + 1):
        system = assemble(model, state, loads)
        K, R = system.K, system.R.copy()
        g = np.zeros(naug)
        Baug = sp.lil_matrix((naug, dofs.size))
        extra = []
        for i, node in enumerate(rot_nodes):
            c, B, rmom, H = _rotation_constraint(
                state.Lam[node], rot_targets[node], rmult[node])
            sl = dofs.lam(node)
            R[sl] += rmom
            idx = np.arange(sl.start, sl.stop)
            extra.append(sp.coo_matrix(
                (H.ravel(), (np.repeat(idx, 3), np.tile(idx, 3))),
                shape=K.shape))
            g[3 * i:3 * i + 3] = c
            Baug[3 * i:3 * i + 3, sl] = B
        if extra:
            K = (K + sum(extra)).tocsr()
        res = np.sqrt(np.linalg.norm(R[free]) ** 2 + np.linalg.norm(g) ** 2)
        history.append(res)
        if res <= config.tol:
            converged = True
            iterations = it
            break
        if it == config.max_iter:
            iterations = it
            break
        Kff = K[free][:, free]
        Bf = Baug.tocsr()[:, free]
        full = sp.bmat([[Kff, Bf.T], [Bf, None]], format="csc")
        rhs = -np.concatenate([R[free], g])
        X = spsolve(full, rhs)
        if not np.all(np.isfinite(X)):
            raise SingularSystemError(
                f"linear solve produced non-finite increments "
                f"(reduced size {full.shape[0]})")
        dx = np.zeros(dofs.size)
        dx[free] = X[:len(free)]
        for i, node in enumerate(rot_nodes):
            rmult[node] += X[len(free) + 3 * i: len(free) + 3 * i + 3]
        nn, mm = dofs.n, dofs.m
        state.u += dx[:3 * nn].reshape(nn, 3)
        for node in range(nn):
            dlam = dx[dofs.lam(node)]
            if dlam.any():
                state.Lam[node] = so3.exp_so3(dlam) @ state.Lam[node]
        state.n1f += dx[6 * nn:6 * nn + 3 * mm].reshape(mm, 3)
        state.eta += dx[6 * nn + 3 * mm:]

    reactions = {}
    for (node, comp) in fixed:
        reactions[(node, comp)] = system.R[3 * node + comp]
    return StepResult(converged=converged, iterations=iterations,
                      residual_norm=history[-1], residual_history=history,
                      state=state.copy(), reactions=reactions,
                      rotation_moments={k: v.copy() for k, v in rmult.items()})


def continuation(model, config=None, state=None, on_step=None):
    """Run the load program; returns the list of step results (partial if
    a step fails to converge)."""
    config = config or SolverConfig()
    steps = config.steps or model.program.steps
    state = state if state is not None else State.zero(model)
    results = []
    for k in range(1, steps + 1):
        factor = k / steps
        fixed, loads, rot_targets = _resolve_step_bcs(model, factor)
        result = newton_solve(model, state, fixed, loads, rot_targets, config)
        result.factor = factor
        results.append(result)
        if on_step:
            on_step(result)
        if not result.converged:
            break
    return results
