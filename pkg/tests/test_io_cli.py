import json
import math

import numpy as np
import pytest

from leafscope import io
from leafscope.cli import main
from leafscope.constructor import ConstructionState, fullmeasure_construct
from leafscope.group import cyclic_group
from leafscope.moebius import Horocycle, BoundaryPoint, strip_geodesics


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def cyclic_spec(tmp_path):
    path = tmp_path / "cyclic.json"
    io.write_group(path, cyclic_group(0.6))
    return str(path)


def test_group_round_trip(tmp_path, pingpong):
    path = tmp_path / "g.json"
    io.write_group(path, pingpong, {"note": 1}, header=io.provenance("test"))
    back, ext = io.read_group(path)
    assert back.labels == pingpong.labels and ext == {"note": 1}
    for g, h in zip(pingpong.generators, back.generators):
        assert abs(g.a - h.a) < 1e-12 and abs(g.b - h.b) < 1e-12


def test_constructed_group_round_trip(tmp_path):
    st = fullmeasure_construct(3)
    path = tmp_path / "c.json"
    io.write_group(path, st.group, st.to_extensions())
    back, ext = io.read_group(path)
    for g, h in zip(st.group.generators, back.generators):
        assert abs(g.a - h.a) <= 1e-12 * abs(g.a) and abs(g.b - h.b) <= 1e-12 * abs(g.a)
    state = ConstructionState.from_extensions(back, ext)
    assert [lv.radius for lv in state.levels] == [lv.radius for lv in st.levels]


@pytest.mark.parametrize("data", [
    {},
    {"schema_version": "2.0", "generators": []},
    {"schema_version": "1.0", "generators": [{"a_re": 1.0, "a_im": 0.0, "b_re": 0.5, "b_im": 0.0}]},
    {"schema_version": "1.0", "generators": [{"a_re": "x"}]},
])
def test_bad_specs_are_rejected(data):
    with pytest.raises(io.SpecFormatError):
        io.group_from_dict(data)


def test_field_csv_round_trip():
    rec = {"zeta_re": 0.1, "zeta_im": -0.2, "beta": 1 / 3, "beta_certified": True,
           "alpha": 0.25, "alpha_lo": 0.2, "alpha_hi": 0.3, "rho_lower": 0.1}
    text = io.field_csv([rec, rec])
    assert text.splitlines()[0] == ",".join(io.FIELD_COLUMNS)
    assert io.read_field_csv(text) == [rec, rec]


def test_polar_grid_shape():
    g = io.polar_grid(0.9, 3, 8)
    assert g.shape == (24,) and np.max(np.abs(g)) == pytest.approx(0.9)


def test_svg_has_all_layers():
    svg = io.render_svg(geodesics=list(strip_geodesics(0.6)), limit_points=[0.5 + 0.5j],
                        horocycles=[Horocycle(BoundaryPoint(0.0), 0.2)])
    assert svg.startswith("<svg") and svg.count("<polyline") == 2 and svg.count("<circle") == 3


def test_make_cyclic(capsys):
    code, out, _ = run(capsys, "group", "make-cyclic", "--r", "0.6")
    data = json.loads(out)
    assert code == 0
    assert list(data)[0] == "provenance" and data["provenance"]["schema_version"] == io.SCHEMA_VERSION
    (gen,) = data["generators"]
    assert gen["a_re"] == pytest.approx(1.25) and gen["b_re"] == pytest.approx(0.75)


def test_floor(capsys):
    code, out, _ = run(capsys, "horocycle", "floor", "--N", "2", "--n", "4")
    data = json.loads(out)
    assert code == 0 and data["M"] == pytest.approx(0.4) and data["M_exact"] == "2/5"
    assert data["m"] == pytest.approx(0.5 * math.log(7 / 3))


def test_usage_errors(capsys):
    assert run(capsys, )[0] == 2
    assert run(capsys, "group", "make-cyclic", "--bogus", "1")[0] == 2
    assert run(capsys, "group")[0] == 2


def test_refusal_exit_code(capsys, cyclic_spec):
    code, _, err = run(capsys, "horocycle", "floor", "--N", "4", "--n", "2")
    assert code == 3 and json.loads(err)["error"] == "DomainError"
    code, _, err = run(capsys, "group", "make-cyclic", "--r", "1.5")
    assert code == 3


def test_bad_spec_file_refuses(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"schema_version": "1.0", "generators": [{"a_re": 1, "a_im": 0, "b_re": 0.5, "b_im": 0}]}')
    code, _, err = run(capsys, "group", "check", "--spec", str(path))
    assert code == 3 and json.loads(err)["error"] == "SpecFormatError"


def test_group_check_and_svg(capsys, cyclic_spec, tmp_path):
    svg = tmp_path / "fig.svg"
    code, out, _ = run(capsys, "group", "check", "--spec", cyclic_spec, "--depth", "6", "--samples", "200", "--svg", str(svg))
    data = json.loads(out)
    assert code == 0 and data["violation_count"] == 0 and data["provenance"]["depth"] == 6
    assert svg.read_text().startswith("<svg")


def test_field_csv_is_deterministic(capsys, cyclic_spec, tmp_path):
    texts = []
    for k in range(2):
        path = tmp_path / f"f{k}.csv"
        code, out, _ = run(capsys, "field", "--spec", cyclic_spec, "--grid", "3,8", "--depth", "6", "--csv", str(path))
        assert code == 0 and json.loads(out)["rows"] == 24
        texts.append(path.read_text())
    assert texts[0] == texts[1]
    rows = io.read_field_csv(texts[0])
    assert len(rows) == 24 and all(r["alpha"] <= r["beta"] for r in rows)


def test_other_commands(capsys, cyclic_spec, tmp_path):
    code, out, _ = run(capsys, "limitset", "--spec", cyclic_spec, "--depth", "10")
    assert code == 0 and json.loads(out)["count"] > 0
    code, out, _ = run(capsys, "horocycle", "check", "--spec", cyclic_spec, "--zeta", "0", "--radius", "0.3")
    assert json.loads(out)["verdict"] == "identified"
    code, out, _ = run(capsys, "localmodel", "strip", "--lambda", "0.5", "--N", "2")
    data = json.loads(out)
    assert not data["injective"] and data["witness_k"] == 2 and data["degree"] == 3
    code, out, _ = run(capsys, "localmodel", "annulus", "--a", "0.005", "--b", "0.02", "--M", "10")
    assert json.loads(out)["winding"]["certified"]
    code, out, _ = run(capsys, "current", "mass", "--map", "identity", "--rmax", "0.5")
    assert json.loads(out)["mass"][-1] == pytest.approx(math.pi / 8, rel=1e-3)
    code, out, _ = run(capsys, "current", "ray", "--map", "annulus", "--theta", "0")
    assert json.loads(out)["diverging"]
    assert run(capsys, "current", "mass", "--map", "poly")[0] == 3


def test_construct_cli(capsys, tmp_path):
    path = tmp_path / "con.json"
    code, _, _ = run(capsys, "construct", "fullmeasure", "--stages", "2", "--out", str(path))
    assert code == 0
    group, ext = io.read_group(path)
    assert group.rank == 2 and ext["kind"] == "fullmeasure"
    code, out, _ = run(capsys, "group", "check", "--spec", str(path), "--depth", "4", "--samples", "200")
    assert json.loads(out)["violation_count"] == 0
    assert run(capsys, "construct", "fullmeasure", "--stages", "0")[0] == 2
