"""Benchmark case library.

Each builder emits the model-file text plus the metadata the harness
needs: solver tolerance, the monitored (tip/crown) node, and an exact
centerline when one exists.  Geometry and stiffness constants follow the
benchmark literature for each problem.
"""

from dataclasses import dataclass, field

import numpy as np

from .oracles import rolling_oracle


@dataclass
class Case:
    name: str
    text: str
    tol: float
    monitor: int
    arc_length: float | None = None
    exact: object = None              # exact(s) -> centerline point
    s_nodes: np.ndarray | None = None
    notes: str = ""
    supports_mesh: bool = False


def _fmt(x):
    return format(float(x), ".17g")


def _frame_line(i, cols):
    return "frame %d %s" % (i, " ".join(_fmt(v) for v in np.asarray(cols).ravel()))


def _clamp(node):
    return [f"fix {node} ux", f"fix {node} uy", f"fix {node} uz", f"fix {node} rot"]


# ---------------------------------------------------------------------------

def frame_indifference(mesh=8):
    """Rigid rotation of an L-frame about the x axis; strain energy must
    stay at zero for every prescribed angle."""
    lines = []
    # member 1 along x, member 2 along y starting at (10,0,0)
    for i in range(mesh + 1):
        lines.append("node %d %s 0 0" % (i, _fmt(10.0 * i / mesh)))
    for i in range(1, mesh + 1):
        lines.append("node %d 10 %s 0" % (mesh + i, _fmt(10.0 * i / mesh)))
    lines.append("material 0 1000000 1000 1000 1000")
    for i in range(2 * mesh):
        lines.append("element %d %d %d 0" % (i, i, i + 1))
    lines += ["fix 0 ux", "fix 0 uy", "fix 0 uz"]
    lines.append("prescribe 0 rot %s 0 0" % _fmt(2.0 * np.pi))
    lines += ["steps 8", "control load"]
    return Case("frame_indifference", "\n".join(lines) + "\n", tol=1e-9,
                monitor=2 * mesh)


def rolling(mesh=10):
    """Straight cantilever rolled into a full circle by an end moment."""
    L, M, EI = 1.0, 4.0 * np.pi, 2.0
    lines = ["node %d %s 0 0" % (i, _fmt(L * i / mesh)) for i in range(mesh + 1)]
    lines.append("material 0 10 2 2 2")
    lines += ["element %d %d %d 0" % (i, i, i + 1) for i in range(mesh)]
    lines += _clamp(0)
    lines.append("moment %d 0 0 %s" % (mesh, _fmt(M)))
    # an odd step count never lands exactly on the half-circle state,
    # where the out-of-plane flip mode makes the tangent singular
    lines += ["steps 9", "control load"]
    s = np.linspace(0.0, L, mesh + 1)
    return Case("rolling", "\n".join(lines) + "\n", tol=1e-10, monitor=mesh,
                arc_length=L, exact=lambda t: rolling_oracle(M, EI, L, t),
                s_nodes=s, supports_mesh=True)


def unrolling(mesh=10):
    """Circular cantilever of radius 1/(2 pi) unrolled straight by an end
    moment; exact deformed centerline is the segment (s, 0, 0)."""
    L = 1.0
    r = 1.0 / (2.0 * np.pi)
    lines = []
    for i in range(mesh + 1):
        s = L * i / mesh
        a = 2.0 * np.pi * s
        lines.append("node %d %s %s 0" % (i, _fmt(r * np.sin(a)),
                                          _fmt(r * (1.0 - np.cos(a)))))
    for i in range(mesh + 1):
        a = 2.0 * np.pi * (L * i / mesh)
        e1 = (np.cos(a), np.sin(a), 0.0)
        e2 = (-np.sin(a), np.cos(a), 0.0)
        e3 = (0.0, 0.0, 1.0)
        lines.append(_frame_line(i, np.column_stack([e1, e2, e3])))
    lines.append("material 0 10 2 2 2")
    lines += ["element %d %d %d 0" % (i, i, i + 1) for i in range(mesh)]
    lines += _clamp(0)
    lines.append("moment %d 0 0 %s" % (mesh, _fmt(-4.0 * np.pi)))
    lines += ["steps 9", "control load"]
    s = np.linspace(0.0, L, mesh + 1)
    return Case("unrolling", "\n".join(lines) + "\n", tol=1e-10, monitor=mesh,
                arc_length=L, exact=lambda t: np.array([t, 0.0, 0.0]),
                s_nodes=s, supports_mesh=True)


def elastica(mesh=20):
    """Cantilever with a transverse tip force; compared against the
    elliptic-integral solution along the whole load path."""
    L, EI = 100.0, 1000.0
    P = 10.0 * EI / (L * L)       # alpha = PL^2/EI reaches 10
    lines = ["node %d %s 0 0" % (i, _fmt(L * i / mesh)) for i in range(mesh + 1)]
    lines.append("material 0 10000 %s %s %s" % (_fmt(EI), _fmt(EI), _fmt(EI)))
    lines += ["element %d %d %d 0" % (i, i, i + 1) for i in range(mesh)]
    lines += _clamp(0)
    lines.append("force %d 0 %s 0" % (mesh, _fmt(P)))
    lines += ["steps 10", "control load"]
    return Case("elastica", "\n".join(lines) + "\n", tol=1e-8, monitor=mesh,
                arc_length=L, supports_mesh=True)


def bent_cantilever(mesh=8):
    """45-degree circular bend of radius 100 in the x-y plane loaded by a
    tip force perpendicular to that plane."""
    R = 100.0
    ang = np.pi / 4.0
    lines = []
    for i in range(mesh + 1):
        t = ang * i / mesh
        lines.append("node %d %s %s 0" % (i, _fmt(R * np.sin(t)),
                                          _fmt(R * (1.0 - np.cos(t)))))
    for i in range(mesh + 1):
        t = ang * i / mesh
        e1 = (np.cos(t), np.sin(t), 0.0)
        e2 = (-np.sin(t), np.cos(t), 0.0)
        e3 = (0.0, 0.0, 1.0)
        lines.append(_frame_line(i, np.column_stack([e1, e2, e3])))
    # unit-square cross section with E = 1e7: EI1 = EI2 = GJ = 1e7/12;
    # these constants reproduce the published tip coordinates
    EI = 1e7 / 12.0
    lines.append("material 0 10000000 %s %s %s" % (_fmt(EI), _fmt(EI), _fmt(EI)))
    lines += ["element %d %d %d 0" % (i, i, i + 1) for i in range(mesh)]
    lines += _clamp(0)
    lines.append("force %d 0 0 600" % mesh)
    lines += ["steps 6", "control load"]
    return Case("bent_cantilever", "\n".join(lines) + "\n", tol=1e-5,
                monitor=mesh, arc_length=R * ang, supports_mesh=True)


def l_frame(variant="shear", mesh=8):
    """Right-angle frame of two 10-unit members, clamped at one free end;
    loaded at the other by an out-of-plane shear force or a torque.

    Member 1 runs from the origin along -y, member 2 from its end along
    +x; with the -z tip force this orientation reproduces the published
    tip displacement componentwise.
    """
    lines = []
    for i in range(mesh + 1):
        lines.append("node %d 0 %s 0" % (i, _fmt(-10.0 * i / mesh)))
    for i in range(1, mesh + 1):
        lines.append("node %d %s -10 0" % (mesh + i, _fmt(10.0 * i / mesh)))
    lines.append("material 0 1000000 1000 1000 1000")
    for i in range(2 * mesh):
        lines.append("element %d %d %d 0" % (i, i, i + 1))
    lines += _clamp(0)
    tip = 2 * mesh
    if variant == "shear":
        lines.append("force %d 0 0 -5" % tip)
    elif variant == "torsion":
        lines.append("moment %d 0 20 0" % tip)
    else:
        raise ValueError(f"unknown l_frame variant {variant!r}")
    lines += ["steps 5", "control load"]
    return Case(f"l_frame_{variant}" if variant != "shear" else "l_frame",
                "\n".join(lines) + "\n", tol=1e-8, monitor=tip)


def williams(mesh=8):
    """Toggle frame: two shallow members meeting at a raised crown, both
    far ends clamped, crown pushed down under displacement control."""
    span, rise = 65.715, 0.98
    half = span / 2.0
    E, d = 199714.0, 0.721
    A = np.pi * d * d / 4.0
    I = np.pi * d ** 4 / 64.0
    G = E / 2.6
    J = 2.0 * I
    crown = mesh
    lines = []
    for i in range(mesh + 1):
        f = i / mesh
        lines.append("node %d %s %s 0" % (i, _fmt(half * f), _fmt(rise * f)))
    for i in range(1, mesh + 1):
        f = i / mesh
        lines.append("node %d %s %s 0" % (mesh + i, _fmt(half + half * f),
                                          _fmt(rise * (1.0 - f))))
    lines.append("material 0 %s %s %s %s" % (_fmt(E * A), _fmt(E * I),
                                             _fmt(E * I), _fmt(G * J)))
    for i in range(2 * mesh):
        lines.append("element %d %d %d 0" % (i, i, i + 1))
    lines += _clamp(0) + _clamp(2 * mesh)
    for i in range(2 * mesh + 1):
        if i not in (0, 2 * mesh):
            lines.append("fix %d uz" % i)
    lines += ["steps 30", "control displacement %d uy -1.0" % crown]
    return Case("williams", "\n".join(lines) + "\n", tol=1e-7, monitor=crown)


def arch(mesh=100):
    """Deep circular arch (radius 100, interior angle 215 degrees),
    clamped-pinned, crown pushed down under displacement control with a
    constant 8-unit horizontal perturbation force."""
    R = 100.0
    half = np.deg2rad(215.0) / 2.0
    lines = []
    for i in range(mesh + 1):
        t = -half + np.deg2rad(215.0) * i / mesh
        lines.append("node %d %s %s 0" % (i, _fmt(R * np.sin(t)),
                                          _fmt(R * np.cos(t))))
    for i in range(mesh + 1):
        t = -half + np.deg2rad(215.0) * i / mesh
        e1 = (np.cos(t), -np.sin(t), 0.0)
        e2 = (np.sin(t), np.cos(t), 0.0)
        e3 = (0.0, 0.0, 1.0)
        lines.append(_frame_line(i, np.column_stack([e1, e2, e3])))
    lines.append("material 0 100000000 1000000 1000000 1000000")
    lines += ["element %d %d %d 0" % (i, i, i + 1) for i in range(mesh)]
    crown = mesh // 2
    lines += _clamp(0)
    lines += ["fix %d ux" % mesh, "fix %d uy" % mesh, "fix %d uz" % mesh]
    for i in range(1, mesh):
        lines.append("fix %d uz" % i)
    lines.append("force %d 8 0 0" % crown)
    lines += ["steps 40", "control displacement %d uy -120.0" % crown]
    return Case("arch", "\n".join(lines) + "\n", tol=1e-5, monitor=crown,
                supports_mesh=True)


def spiral(mesh=100):
    """Straight 1000-unit cantilever wound into a spiral by simultaneous
    end moment and torque applied in a single load step."""
    L = 1000.0
    lines = ["node %d %s 0 0" % (i, _fmt(L * i / mesh)) for i in range(mesh + 1)]
    lines.append("material 0 100 833.3 833.3 833.3")
    lines += ["element %d %d %d 0" % (i, i, i + 1) for i in range(mesh)]
    lines += _clamp(0)
    lines.append("moment %d 10 10 0" % mesh)
    lines += ["steps 1", "control load"]
    return Case("spiral", "\n".join(lines) + "\n", tol=1e-5, monitor=mesh,
                supports_mesh=True)


def star_dome():
    """24-member shallow star dome, best-effort geometry: apex above an
    inner hexagon, six pinned outer supports; crown pushed down."""
    r_in, r_out = 2.5, 4.33
    z_apex, z_in = 0.8216, 0.6216
    nodes = [(0.0, 0.0, z_apex)]
    for k in range(6):
        a = np.deg2rad(60.0 * k)
        nodes.append((r_in * np.cos(a), r_in * np.sin(a), z_in))
    for k in range(6):
        a = np.deg2rad(60.0 * k + 30.0)
        nodes.append((r_out * np.cos(a), r_out * np.sin(a), 0.0))
    members = []
    for k in range(6):
        members.append((0, 1 + k))                                # spokes
    for k in range(6):
        members.append((1 + k, 1 + (k + 1) % 6))                  # ring
    for k in range(6):
        members.append((7 + k, 1 + k))                            # braces
        members.append((7 + k, 1 + (k + 1) % 6))
    lines = ["node %d %s %s %s" % (i, _fmt(x), _fmt(y), _fmt(z))
             for i, (x, y, z) in enumerate(nodes)]
    lines.append("material 0 960510 253610 253610 154650")
    lines += ["element %d %d %d 0" % (i, a, b) for i, (a, b) in enumerate(members)]
    for k in range(6):
        n = 7 + k
        lines += ["fix %d ux" % n, "fix %d uy" % n, "fix %d uz" % n]
    lines += ["steps 20", "control displacement 0 uz -1.0"]
    return Case("star_dome", "\n".join(lines) + "\n", tol=1e-6, monitor=0,
                notes="geometry is best-effort; no quantitative reference")


_BUILDERS = {
    "frame_indifference": frame_indifference,
    "rolling": rolling,
    "unrolling": unrolling,
    "elastica": elastica,
    "bent_cantilever": bent_cantilever,
    "l_frame": lambda mesh=8: l_frame("shear", mesh),
    "l_frame_torsion": lambda mesh=8: l_frame("torsion", mesh),
    "williams": williams,
    "arch": arch,
    "spiral": spiral,
    "star_dome": lambda: star_dome(),
}


def list_cases():
    return sorted(_BUILDERS)


def build_case(name, mesh=None):
    if name not in _BUILDERS:
        raise ValueError(f"unknown case {name!r}; available: {', '.join(list_cases())}")
    builder = _BUILDERS[name]
    if mesh is None:
        return builder()
    try:
        return builder(mesh=mesh)
    except TypeError:
        raise ValueError(f"case {name!r} does not take a mesh override")
