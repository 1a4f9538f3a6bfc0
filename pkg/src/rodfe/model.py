"""Problem definition: mesh, reference frames, materials, boundary
conditions and the load program, plus the line-oriented model file format.

File grammar (comments start with '#'):

    node <id> <x> <y> <z>
    frame <node-id> <9 reals row-major>          # optional explicit frame
    element <id> <a> <b> <mat>
    material <id> <AE> <EI1> <EI2> <GJ>
    fix <node> <ux|uy|uz|rot>
    prescribe <node> <ux|uy|uz> <value>
    prescribe <node> rot <rx> <ry> <rz>          # rotation-vector target
    force <node> <fx> <fy> <fz>
    moment <node> <mx> <my> <mz>
    steps <N>
    control <load|displacement> [node dof target]
"""

from dataclasses import dataclass, field

import numpy as np

from . import so3

DISP_DOFS = ("ux", "uy", "uz")

# two incident chords are treated as one smooth member chain when their
# directions agree within 45 degrees; otherwise each element keeps its
# own chord frame (corners, junctions)
_CHAIN_COS = np.cos(np.pi / 4.0)


class ParseError(ValueError):
    pass


class ValidationError(ValueError):
    pass


@dataclass
class Material:
    id: int
    AE: float
    EI1: float
    EI2: float
    GJ: float

    def __post_init__(self):
        for name in ("AE", "EI1", "EI2", "GJ"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"material {self.id}: {name} must be > 0")

    def stiffness_diag(self):
        """Curvature stiffness in material axial components.

        Component 1 is the rotation rate about the tangent (twist), so it
        carries GJ; components 2 and 3 are the bending directions.
        """
        return np.array([self.GJ, self.EI1, self.EI2])


@dataclass
class Node:
    id: int
    X: np.ndarray
    Lambda0: np.ndarray | None = None   # explicit reference frame, optional


@dataclass
class Element:
    id: int
    node_a: int
    node_b: int
    material: int
    L: float = 0.0
    # reference frames at each end; may differ from the nodal average at
    # junctions, where each member keeps its own tangent-aligned frame
    Lam0_a: np.ndarray | None = None
    Lam0_b: np.ndarray | None = None


@dataclass
class BoundaryCondition:
    kind: str          # fix-displacement-component | prescribe-displacement-component |
                       # fix-rotation | prescribe-rotation | point-force | point-moment
    node: int
    component: int | None = None
    value: float | np.ndarray | None = None


@dataclass
class LoadProgram:
    steps: int = 1
    control: str = "load"                     # load | displacement
    control_node: int | None = None
    control_dof: int | None = None
    control_target: float | None = None


@dataclass
class Model:
    nodes: list
    elements: list
    materials: dict
    bcs: list
    program: LoadProgram = field(default_factory=LoadProgram)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_elements(self):
        return len(self.elements)

    def material_of(self, elem):
        return self.materials[elem.material]

    def validate(self):
        if not self.nodes or not self.elements:
            raise ValidationError("model needs at least one node and one element")
        ids = [nd.id for nd in self.nodes]
        if ids != list(range(len(ids))):
            raise ValidationError("node ids must be unique and contiguous from 0")
        for el in self.elements:
            for v in (el.node_a, el.node_b):
                if not 0 <= v < len(self.nodes):
                    raise ValidationError(f"element {el.id} references missing node {v}")
            if el.material not in self.materials:
                raise ValidationError(f"element {el.id} references missing material {el.material}")
            chord = np.linalg.norm(self.nodes[el.node_b].X - self.nodes[el.node_a].X)
            if not el.L > 0.0 or abs(el.L - chord) > 1e-10 * max(1.0, chord):
                raise ValidationError(f"element {el.id}: length must equal chord length")
        n_constr = 0
        for bc in self.bcs:
            if bc.kind in ("fix-displacement-component", "prescribe-displacement-component"):
                n_constr += 1
            elif bc.kind in ("fix-rotation", "prescribe-rotation"):
                n_constr += 3
        if n_constr < 6:
            raise ValidationError("not enough constraints to remove rigid-body modes")


@dataclass
class State:
    """Unknowns: nodal displacement and rotation (relative to the reference
    frame), per-element force 1-form components n and deformation 1-form eta."""
    u: np.ndarray        # (n, 3)
    Lam: np.ndarray      # (n, 3, 3)
    n1f: np.ndarray      # (m, 3)
    eta: np.ndarray      # (m,)

    @classmethod
    def zero(cls, model):
        n, m = model.n_nodes, model.n_elements
        return cls(u=np.zeros((n, 3)),
                   Lam=np.tile(np.eye(3), (n, 1, 1)),
                   n1f=np.zeros((m, 3)),
                   eta=np.ones(m))

    def copy(self):
        return State(self.u.copy(), self.Lam.copy(), self.n1f.copy(), self.eta.copy())


# ---------------------------------------------------------------------------
# reference frames

def _frame_from_tangent(t):
    """Orthonormal frame with first column t; completion from the least
    aligned global axis so a straight rod along x gets the identity."""
    t = np.asarray(t, dtype=float)
    nt = np.linalg.norm(t)
    if nt == 0.0:
        raise ValidationError("zero-length chord")
    e1 = t / nt
    aux = np.array([0.0, 0.0, 1.0])
    if abs(e1 @ aux) > 0.9:
        aux = np.array([0.0, 1.0, 0.0])
    e2 = np.cross(aux, e1)
    e2 /= np.linalg.norm(e2)
    e3 = np.cross(e1, e2)
    return np.column_stack([e1, e2, e3])


def build_reference_frames(nodes, elements):
    """Per-node reference frames with the first column along the averaged
    chord directions of the adjacent elements."""
    chords = {}
    incident = {nd.id: [] for nd in nodes}
    for el in elements:
        c = nodes[el.node_b].X - nodes[el.node_a].X
        nc = np.linalg.norm(c)
        if nc == 0.0:
            raise ValidationError(f"element {el.id}: zero-length chord")
        chords[el.id] = c / nc
        incident[el.node_a].append(el)
        incident[el.node_b].append(el)
    frames = {}
    for nd in nodes:
        if nd.Lambda0 is not None:
            frames[nd.id] = nd.Lambda0
            continue
        if not incident[nd.id]:
            raise ValidationError(f"node {nd.id} is not connected to any element")
        t = np.mean([chords[el.id] for el in incident[nd.id]], axis=0)
        frames[nd.id] = _frame_from_tangent(t)
    return frames


def assign_element_frames(model):
    """Fill element end frames.

    A node shared by exactly two nearly collinear elements behaves as an
    interior point of one member: both elements share the averaged frame.
    At corners and junctions every element keeps a frame aligned with its
    own chord, while the rotation unknown stays shared (rigid joint).
    Explicit nodal frames always win.
    """
    nodal = build_reference_frames(model.nodes, model.elements)
    incident = {nd.id: [] for nd in model.nodes}
    chords = {}
    for el in model.elements:
        c = model.nodes[el.node_b].X - model.nodes[el.node_a].X
        chords[el.id] = c / np.linalg.norm(c)
        incident[el.node_a].append(el)
        incident[el.node_b].append(el)

    def frame_for(el, node_id):
        nd = model.nodes[node_id]
        if nd.Lambda0 is not None:
            return nd.Lambda0
        inc = incident[node_id]
        if len(inc) == 1:
            return _frame_from_tangent(chords[el.id])
        if len(inc) == 2:
            other = inc[0] if inc[1] is el else inc[1]
            if chords[el.id] @ chords[other.id] >= _CHAIN_COS:
                return nodal[node_id]
        return _frame_from_tangent(chords[el.id])

    for el in model.elements:
        el.Lam0_a = frame_for(el, el.node_a)
        el.Lam0_b = frame_for(el, el.node_b)


# ---------------------------------------------------------------------------
# DOF numbering: all nodal u (3n), all nodal rotation increments (3n),
# element force 1-forms (3m), element deformation 1-forms (m)

class DofMap:
    def __init__(self, model):
        if model.n_nodes == 0 or model.n_elements == 0:
            raise ValidationError("empty model has no DOFs")
        self.n = model.n_nodes
        self.m = model.n_elements
        self.size = 6 * self.n + 4 * self.m

    def u(self, node):
        return slice(3 * node, 3 * node + 3)

    def lam(self, node):
        return slice(3 * self.n + 3 * node, 3 * self.n + 3 * node + 3)

    def force(self, elem):
        return slice(6 * self.n + 3 * elem, 6 * self.n + 3 * elem + 3)

    def eta(self, elem):
        return 6 * self.n + 3 * self.m + elem


def dof_map(model):
    return DofMap(model)


# ---------------------------------------------------------------------------
# model file I/O

def _fmt(x):
    return format(float(x), ".17g")


def load_model(path):
    nodes, elements, materials, bcs = {}, [], {}, []
    frames = {}
    program = LoadProgram()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            try:
                kw = tok[0]
                if kw == "node":
                    nid = int(tok[1])
                    nodes[nid] = Node(nid, np.array([float(t) for t in tok[2:5]]))
                elif kw == "frame":
                    frames[int(tok[1])] = np.array(
                        [float(t) for t in tok[2:11]]).reshape(3, 3)
                elif kw == "element":
                    elements.append(Element(int(tok[1]), int(tok[2]),
                                            int(tok[3]), int(tok[4])))
                elif kw == "material":
                    mid = int(tok[1])
                    materials[mid] = Material(mid, *[float(t) for t in tok[2:6]])
                elif kw == "fix":
                    if tok[2] == "rot":
                        bcs.append(BoundaryCondition("fix-rotation", int(tok[1]),
                                                     value=np.eye(3)))
                    else:
                        bcs.append(BoundaryCondition("fix-displacement-component",
                                                     int(tok[1]),
                                                     component=DISP_DOFS.index(tok[2]),
                                                     value=0.0))
                elif kw == "prescribe":
                    if tok[2] == "rot":
                        bcs.append(BoundaryCondition(
                            "prescribe-rotation", int(tok[1]),
                            value=np.array([float(t) for t in tok[3:6]])))
                    else:
                        bcs.append(BoundaryCondition(
                            "prescribe-displacement-component", int(tok[1]),
                            component=DISP_DOFS.index(tok[2]), value=float(tok[3])))
                elif kw == "force":
                    bcs.append(BoundaryCondition("point-force", int(tok[1]),
                                                 value=np.array([float(t) for t in tok[2:5]])))
                elif kw == "moment":
                    bcs.append(BoundaryCondition("point-moment", int(tok[1]),
                                                 value=np.array([float(t) for t in tok[2:5]])))
                elif kw == "steps":
                    program.steps = int(tok[1])
                elif kw == "control":
                    program.control = tok[1]
                    if tok[1] == "displacement":
                        program.control_node = int(tok[2])
                        program.control_dof = DISP_DOFS.index(tok[3])
                        program.control_target = float(tok[4])
                    elif tok[1] != "load":
                        raise ValueError(f"unknown control mode {tok[1]!r}")
                else:
                    raise ValueError(f"unknown keyword {kw!r}")
            except (IndexError, ValueError) as exc:
                if isinstance(exc, ValidationError):
                    raise
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    node_list = [nodes[i] for i in sorted(nodes)]
    for nid, F in frames.items():
        if not so3.is_rotation(F, tol=1e-9):
            raise ValidationError(f"frame at node {nid} is not a rotation")
        nodes[nid].Lambda0 = F
    for el in elements:
        if el.node_a in nodes and el.node_b in nodes:
            el.L = float(np.linalg.norm(nodes[el.node_b].X - nodes[el.node_a].X))
    model = Model(node_list, elements, materials, bcs, program)
    model.validate()
    assign_element_frames(model)
    return model


def save_model(model, path):
    """Serialize back to the file format; round-trips bit exactly."""
    lines = []
    for nd in model.nodes:
        lines.append("node %d %s %s %s" % (nd.id, *map(_fmt, nd.X)))
        if nd.Lambda0 is not None:
            lines.append("frame %d %s" % (nd.id, " ".join(_fmt(x) for x in nd.Lambda0.ravel())))
    for mid in sorted(model.materials):
        mat = model.materials[mid]
        lines.append("material %d %s %s %s %s" % (
            mid, _fmt(mat.AE), _fmt(mat.EI1), _fmt(mat.EI2), _fmt(mat.GJ)))
    for el in model.elements:
        lines.append("element %d %d %d %d" % (el.id, el.node_a, el.node_b, el.material))
    for bc in model.bcs:
        if bc.kind == "fix-displacement-component":
            lines.append("fix %d %s" % (bc.node, DISP_DOFS[bc.component]))
        elif bc.kind == "fix-rotation":
            lines.append("fix %d rot" % bc.node)
        elif bc.kind == "prescribe-displacement-component":
            lines.append("prescribe %d %s %s" % (bc.node, DISP_DOFS[bc.component], _fmt(bc.value)))
        elif bc.kind == "prescribe-rotation":
            lines.append("prescribe %d rot %s %s %s" % (bc.node, *map(_fmt, bc.value)))
        elif bc.kind == "point-force":
            lines.append("force %d %s %s %s" % (bc.node, *map(_fmt, bc.value)))
        elif bc.kind == "point-moment":
            lines.append("moment %d %s %s %s" % (bc.node, *map(_fmt, bc.value)))
    lines.append("steps %d" % model.program.steps)
    if model.program.control == "displacement":
        lines.append("control displacement %d %s %s" % (
            model.program.control_node, DISP_DOFS[model.program.control_dof],
            _fmt(model.program.control_target)))
    else:
        lines.append("control load")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
