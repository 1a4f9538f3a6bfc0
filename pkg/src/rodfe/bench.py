"""Benchmark harness: runs library cases, writes CSV/summary artifacts,
and performs mesh-convergence studies against analytic solutions."""

import os
from dataclasses import dataclass, field

import numpy as np

from .cases import build_case
from .element import bending_strain, bending_energy, extension_energy
from .model import load_model
from .oracles import l2_error
from .solver import SolverConfig, continuation

# tip coordinates (load 300 and 600) and tip displacement from the
# benchmark literature, echoed into the run summaries
REFERENCES = {
    "bent_cantilever": {0.5: (58.80, 22.26, 40.19), 1.0: (47.18, 15.70, 53.50)},
    "l_frame": (-1.7482, 0.4253, -6.7611),
}


def _fmt(x):
    return format(float(x), ".17g")


def energies(model, state):
    """Total bending and extension energy of a state."""
    Wb = We = 0.0
    for el in model.elements:
        Om, Om0 = bending_strain(state.Lam[el.node_a], state.Lam[el.node_b],
                                 el.Lam0_a, el.Lam0_b, el.L)
        mat = model.material_of(el)
        Wb += el.L * bending_energy(Om, Om0, mat)
        We += el.L * extension_energy(state.eta[el.id], mat.AE)
    return Wb, We


def positions(model, state):
    return np.array([model.nodes[i].X + state.u[i] for i in range(model.n_nodes)])


def arc_coordinates(model):
    """Cumulative reference arc length (chord sum) along the node chain."""
    s = [0.0]
    for el in model.elements:
        s.append(s[-1] + el.L)
    return np.array(s)


@dataclass
class RunReport:
    case: object
    model: object
    results: list
    out_dir: str
    path_rows: list = field(default_factory=list)
    l2: float | None = None

    @property
    def converged(self):
        return bool(self.results) and all(r.converged for r in self.results)

    @property
    def final_state(self):
        return self.results[-1].state


def _control_load(model, result):
    """Conjugate load ordinate for displacement-controlled runs."""
    prog = model.program
    key = (prog.control_node, prog.control_dof)
    return np.sign(prog.control_target) * result.reactions[key]


def run_case(name, mesh=None, steps=None, tol=None, out_dir=None):
    case = build_case(name, mesh=mesh)
    out_dir = out_dir or os.environ.get("ROD_OUT", "out")
    out_dir = os.path.join(out_dir, case.name)
    os.makedirs(out_dir, exist_ok=True)
    model_path = os.path.join(out_dir, "model.rod")
    with open(model_path, "w", encoding="utf-8") as fh:
        fh.write(case.text)
    model = load_model(model_path)
    config = SolverConfig(tol=tol if tol is not None else case.tol, steps=steps)

    report = RunReport(case=case, model=model, results=[], out_dir=out_dir)
    s_nodes = arc_coordinates(model)
    disp_control = model.program.control == "displacement"

    def on_step(result):
        report.results.append(result)
        k = len(report.results)
        pos = positions(model, result.state)
        with open(os.path.join(out_dir, f"centerline_{k}.csv"), "w",
                  encoding="utf-8") as fh:
            fh.write("s,x,y,z\n")
            for s, p in zip(s_nodes, pos):
                fh.write("%s,%s,%s,%s\n" % (_fmt(s), _fmt(p[0]),
                                            _fmt(p[1]), _fmt(p[2])))
        load = _control_load(model, result) if disp_control else result.factor
        u = result.state.u[case.monitor]
        report.path_rows.append((result.factor, load, u[0], u[1], u[2]))

    results = continuation(model, config, on_step=on_step)
    report.results = results

    with open(os.path.join(out_dir, "path.csv"), "w", encoding="utf-8") as fh:
        fh.write("factor,load,ux,uy,uz\n")
        for row in report.path_rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")

    if case.exact is not None and report.converged:
        report.l2 = l2_error(positions(model, results[-1].state),
                             case.s_nodes, case.exact)

    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(f"case: {case.name}\n")
        fh.write(f"converged: {report.converged}\n")
        fh.write("newton iterations per step: "
                 + " ".join(str(r.iterations) for r in results) + "\n")
        for r in results:
            Wb, We = energies(model, r.state)
            fh.write(f"step factor {_fmt(r.factor)}: iters {r.iterations} "
                     f"residual {_fmt(r.residual_norm)} "
                     f"W_b {_fmt(Wb)} W_e {_fmt(We)}\n")
        if results:
            u = results[-1].state.u[case.monitor]
            p = model.nodes[case.monitor].X + u
            fh.write("monitor displacement: %s %s %s\n" % tuple(map(_fmt, u)))
            fh.write("monitor position: %s %s %s\n" % tuple(map(_fmt, p)))
        if report.l2 is not None:
            fh.write(f"l2 error vs exact: {_fmt(report.l2)}\n")
        ref = REFERENCES.get(case.name)
        if ref is not None:
            fh.write(f"reference data: {ref}\n")
        if case.notes:
            fh.write(f"notes: {case.notes}\n")
    return report


@dataclass
class ConvergenceReport:
    meshes: list
    errors: list
    slope: float


def convergence_study(name, meshes=(5, 10, 20, 40, 80, 160), out_dir=None,
                      tol=None):
    case = build_case(name)
    if case.exact is None:
        raise ValueError(f"case {name!r} has no exact solution")
    errors = []
    done = []
    for mesh in meshes:
        report = run_case(name, mesh=mesh, tol=tol,
                          out_dir=out_dir and os.path.join(out_dir, f"mesh{mesh}"))
        if not report.converged:
            break
        errors.append(report.l2)
        done.append(mesh)
    h = np.log([1.0 / m for m in done])
    slope = float(np.polyfit(h, np.log(errors), 1)[0])
    rep = ConvergenceReport(list(done), errors, slope)
    base = out_dir or os.environ.get("ROD_OUT", "out")
    os.makedirs(os.path.join(base, case.name), exist_ok=True)
    with open(os.path.join(base, case.name, "convergence.csv"), "w",
              encoding="utf-8") as fh:
        fh.write("mesh,l2_error\n")
        for m, e in zip(rep.meshes, rep.errors):
            fh.write("%d,%s\n" % (m, _fmt(e)))
        fh.write("# fitted slope %s\n" % _fmt(rep.slope))
    return rep
