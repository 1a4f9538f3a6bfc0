"""Model file parsing, validation, reference frames and DOF numbering."""

import numpy as np
import pytest

from rodfe import so3
from rodfe.model import (DofMap, Model, ParseError, State, ValidationError,
                         load_model, save_model)

CANTILEVER = """\
# minimal cantilever
node 0 0 0 0
node 1 1 0 0
material 0 100 2 2 1.5
element 0 0 1 0
fix 0 ux
fix 0 uy
fix 0 uz
fix 0 rot
force 1 0 0.5 0
steps 4
control load
"""


def write(tmp_path, text, name="m.rod"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_minimal_cantilever(tmp_path):
    model = load_model(write(tmp_path, CANTILEVER))
    assert model.n_nodes == 2
    assert model.n_elements == 1
    assert model.elements[0].L == pytest.approx(1.0)
    assert DofMap(model).size == 16
    assert model.program.steps == 4
    assert model.program.control == "load"


def test_parse_error_has_line_number(tmp_path):
    bad = CANTILEVER.replace("force 1 0 0.5 0", "force one 0 0.5 0")
    with pytest.raises(ParseError, match=r":10:"):
        load_model(write(tmp_path, bad))


def test_unknown_keyword_rejected(tmp_path):
    with pytest.raises(ParseError, match="unknown keyword"):
        load_model(write(tmp_path, CANTILEVER + "wiggle 3\n"))


def test_nonpositive_stiffness_rejected(tmp_path):
    bad = CANTILEVER.replace("material 0 100 2 2 1.5",
                             "material 0 0 2 2 1.5")
    with pytest.raises(ValidationError, match="AE"):
        load_model(write(tmp_path, bad))


def test_missing_node_reference_rejected(tmp_path):
    bad = CANTILEVER.replace("element 0 0 1 0", "element 0 0 7 0")
    with pytest.raises(ValidationError, match="missing node"):
        load_model(write(tmp_path, bad))


def test_under_constrained_model_rejected(tmp_path):
    bad = "\n".join(line for line in CANTILEVER.splitlines()
                    if not line.startswith("fix")) + "\n"
    with pytest.raises(ValidationError, match="rigid-body"):
        load_model(write(tmp_path, bad))


def test_bad_frame_rejected(tmp_path):
    bad = CANTILEVER + "frame 0 1 0 0 0 2 0 0 0 1\n"
    with pytest.raises(ValidationError, match="not a rotation"):
        load_model(write(tmp_path, bad))


def test_straight_rod_gets_identity_frames(tmp_path):
    text = "\n".join(
        ["node %d %g 0 0" % (i, 0.25 * i) for i in range(5)]
        + ["material 0 10 1 1 1"]
        + ["element %d %d %d 0" % (i, i, i + 1) for i in range(4)]
        + ["fix 0 ux", "fix 0 uy", "fix 0 uz", "fix 0 rot",
           "steps 1", "control load"]) + "\n"
    model = load_model(write(tmp_path, text))
    for el in model.elements:
        assert np.allclose(el.Lam0_a, np.eye(3))
        assert np.allclose(el.Lam0_b, np.eye(3))


def test_corner_keeps_per_member_frames(tmp_path):
    # right-angle frame: at the corner node each member keeps a frame
    # aligned with its own chord
    text = "\n".join(
        ["node 0 0 0 0", "node 1 1 0 0", "node 2 1 1 0",
         "material 0 10 1 1 1",
         "element 0 0 1 0", "element 1 1 2 0",
         "fix 0 ux", "fix 0 uy", "fix 0 uz", "fix 0 rot",
         "steps 1", "control load"]) + "\n"
    model = load_model(write(tmp_path, text))
    e0, e1 = model.elements
    assert np.allclose(e0.Lam0_b[:, 0], [1, 0, 0])
    assert np.allclose(e1.Lam0_a[:, 0], [0, 1, 0])


def test_explicit_frame_wins(tmp_path):
    F = so3.exp_so3([0.0, 0.0, 0.3])
    text = CANTILEVER + "frame 1 " + " ".join(
        format(x, ".17g") for x in F.ravel()) + "\n"
    model = load_model(write(tmp_path, text))
    assert np.allclose(model.elements[0].Lam0_b, F)


def test_save_load_roundtrip(tmp_path):
    model = load_model(write(tmp_path, CANTILEVER))
    out = tmp_path / "copy.rod"
    save_model(model, str(out))
    model2 = load_model(str(out))
    assert model2.n_nodes == model.n_nodes
    assert model2.program.steps == model.program.steps
    for a, b in zip(model.bcs, model2.bcs):
        assert a.kind == b.kind and a.node == b.node
    save_model(model2, str(tmp_path / "copy2.rod"))
    assert (tmp_path / "copy2.rod").read_text() == out.read_text()


def test_displacement_control_parsing(tmp_path):
    text = CANTILEVER.replace("control load", "control displacement 1 uy -2.5")
    model = load_model(write(tmp_path, text))
    p = model.program
    assert p.control == "displacement"
    assert (p.control_node, p.control_dof) == (1, 1)
    assert p.control_target == pytest.approx(-2.5)


def test_dof_map_layout(tmp_path):
    text = "\n".join(
        ["node %d %g 0 0" % (i, 0.5 * i) for i in range(4)]
        + ["material 0 10 1 1 1"]
        + ["element %d %d %d 0" % (i, i, i + 1) for i in range(3)]
        + ["fix 0 ux", "fix 0 uy", "fix 0 uz", "fix 0 rot",
           "steps 1", "control load"]) + "\n"
    model = load_model(write(tmp_path, text))
    dofs = DofMap(model)
    assert dofs.size == 6 * 4 + 4 * 3
    assert dofs.u(2) == slice(6, 9)
    assert dofs.lam(0) == slice(12, 15)
    assert dofs.force(1) == slice(27, 30)
    assert dofs.eta(2) == 35


def test_zero_state_shapes(tmp_path):
    model = load_model(write(tmp_path, CANTILEVER))
    st = State.zero(model)
    assert st.u.shape == (2, 3) and st.Lam.shape == (2, 3, 3)
    assert st.n1f.shape == (1, 3) and st.eta.shape == (1,)
    assert np.all(st.eta == 1.0)
    st2 = st.copy()
    st2.u[0, 0] = 5.0
    assert st.u[0, 0] == 0.0
