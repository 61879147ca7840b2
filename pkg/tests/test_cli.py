import csv
import io
import json
import math

import pytest

from knotbeta.cli import SWEEP_COLUMNS, fmt, main, sweep_grid
from knotbeta.special import circle_beta_value

TORUS = {"name": "trefoil", "type": "torus", "p": 2, "q": 3, "R": 2.0, "r": 0.5}
CIRCLE = {"name": "unit", "type": "circle", "radius": 1.0}
SQUARE = {"name": "square", "type": "polygon",
          "vertices": [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]]}
ELLIPSE = {"name": "ellipse", "type": "fourier", "x": {"a": [0, 1.3]}, "y": {"a": [0, 0], "b": [0, 0.8]}}


@pytest.fixture
def knot_file(tmp_path):
    def write(desc, name="knot.json"):
        path = tmp_path / name
        path.write_text(json.dumps(desc))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_eval_circle_closed_form(capsys, knot_file):
    code, out, _ = run(capsys, "eval", "--knot", knot_file(CIRCLE), "--s", "1")
    assert code == 0
    row = rows_of(out)[0]
    assert row["method"] == "closed-form"
    assert float(row["re_B"]) == pytest.approx(16 * math.pi, rel=1e-14)


def test_eval_torus_at_zero(capsys, knot_file):
    from knotbeta.knot import resample_arclength, torus_knot

    length = resample_arclength(torus_knot(2, 3, 2.0, 0.5), 256).length
    code, out, _ = run(capsys, "eval", "--knot", knot_file(TORUS), "--s", "0")
    row = rows_of(out)[0]
    assert code == 0 and row["method"] == "continuation"
    assert abs(float(row["re_B"]) - length**2) <= 1e-6


def test_eval_complex_exponent(capsys, knot_file):
    code, out, _ = run(capsys, "eval", "--knot", knot_file(CIRCLE), "--s=-2.5+1j", "--method", "continuation")
    assert code == 0
    row = rows_of(out)[0]
    ref = complex(circle_beta_value(complex(-2.5, 1)))
    assert complex(float(row["re_B"]), float(row["im_B"])) == pytest.approx(ref, rel=1e-7)


def test_eval_pole_is_an_error(capsys, knot_file):
    code, out, err = run(capsys, "eval", "--knot", knot_file(TORUS), "--s", "-1")
    assert code == 2 and out == ""
    record = json.loads(err.strip().splitlines()[-1])
    assert record["error"] == "pole_proximity" and record["pole"] == -1


def test_missing_and_malformed_files(capsys, tmp_path, knot_file):
    code, _, err = run(capsys, "eval", "--knot", str(tmp_path / "none.json"), "--s", "1")
    assert code == 2 and json.loads(err)["error"] == "invalid_input"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "eval", "--knot", str(bad), "--s", "1")[0] == 2
    two = knot_file({"type": "polygon", "vertices": [[0, 0, 0], [1, 0, 0]]})
    assert run(capsys, "eval", "--knot", two, "--s", "1")[0] == 2


def test_missing_exponent(capsys, knot_file):
    assert run(capsys, "eval", "--knot", knot_file(CIRCLE))[0] == 2


def test_sweep_circle_flags_poles(capsys, knot_file):
    code, out, _ = run(capsys, "sweep", "--knot", knot_file(CIRCLE), "--smin", "-4.5", "--smax", "2",
                       "--step", "0.25", "--method", "continuation")
    assert code == 0
    assert out.splitlines()[0] == ",".join(SWEEP_COLUMNS)
    rows = rows_of(out)
    assert len(rows) == 27
    poles = [float(r["s"]) for r in rows if r["flag"] == "pole"]
    assert poles == [-3.0, -1.0]
    for r in rows:
        if r["flag"] == "pole":
            assert r["re_B"] == ""
            continue
        assert r["flag"] == "ok"
        assert abs(float(r["re_B"]) - circle_beta_value(float(r["s"]))) <= 1e-5


def test_sweep_empty_grid(capsys, knot_file):
    code, out, _ = run(capsys, "sweep", "--knot", knot_file(CIRCLE), "--smin", "1", "--smax", "0", "--step", "0.5")
    assert code == 0 and out.strip() == ",".join(SWEEP_COLUMNS)


def test_sweep_grid_helper():
    assert sweep_grid(0, 1, 0.25) == [0, 0.25, 0.5, 0.75, 1.0]
    assert sweep_grid(0.1, 0.3, 0.1) == [0.1, 0.2, 0.3]


def test_sweep_output_is_bit_stable(capsys, knot_file):
    args = ("sweep", "--knot", knot_file(TORUS), "--smin", "-2.5", "--smax", "0.5", "--step", "0.5")
    first = run(capsys, *args)[1]
    assert first == run(capsys, *args)[1]


def test_residues_circle(capsys, knot_file):
    code, out, _ = run(capsys, "residues", "--knot", knot_file(CIRCLE), "--max-j", "2")
    assert code == 0
    rows = rows_of(out)
    expected = [4 * math.pi, math.pi / 2, 3 * math.pi / 32]
    for row, ref in zip(rows, expected):
        assert float(row["series_residue"]) == pytest.approx(ref, rel=1e-9)
        assert float(row["oracle_residue"]) == pytest.approx(ref, rel=1e-12)
    assert [r["verdict"] for r in rows] == ["AGREES", "DISAGREES", "DISAGREES"]
    assert float(rows[1]["printed_value"]) == pytest.approx(5 * math.pi / 4)


def test_residues_square(capsys, knot_file):
    code, out, _ = run(capsys, "residues", "--knot", knot_file(SQUARE), "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["formula_residue"] == pytest.approx(8.0)
    assert rows[0]["printed_value"] == pytest.approx(4.0)
    assert rows[0]["verdict"] == "DISAGREES"
    assert rows[1]["formula_residue"] == pytest.approx(4 * math.pi - 8, abs=1e-10)
    assert rows[1]["series_residue"] == pytest.approx(4 * math.pi - 8, rel=1e-5)


def test_residues_torus_j0(capsys, knot_file):
    from knotbeta.knot import resample_arclength, torus_knot

    length = resample_arclength(torus_knot(2, 3, 2.0, 0.5), 256).length
    code, out, _ = run(capsys, "residues", "--knot", knot_file(TORUS), "--max-j", "0", "--format", "json")
    assert code == 0
    assert json.loads(out)[0]["series_residue"] == pytest.approx(2 * length, abs=1e-8)


def test_residues_insufficient_order(capsys, knot_file):
    assert run(capsys, "residues", "--knot", knot_file(CIRCLE), "--max-j", "4")[0] == 2


def test_energy_json(capsys, knot_file):
    code, out, _ = run(capsys, "energy", "--knot", knot_file(ELLIPSE), "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["defect"] <= 1e-4 and report["E"] > 4
    assert report["f_minus2"] == -4 and report["printed_f_minus2"] == 4


def test_gradient_csv(capsys, knot_file):
    code, out, _ = run(capsys, "gradient", "--knot", knot_file(CIRCLE), "--s", "2", "--samples", "64")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 64
    for r in rows[:5]:
        mag = math.hypot(float(r["gx"]), float(r["gy"]), float(r["gz"]))
        assert mag == pytest.approx(8 * math.pi, rel=1e-10)


def test_bracket_command(capsys, knot_file):
    code, out, _ = run(capsys, "bracket", "--knot", knot_file(ELLIPSE), "--s", "2", "--u", "4",
                       "--samples", "128", "--format", "json")
    assert code == 0
    row = json.loads(out)
    assert abs(row["bracket"]) <= 1e-8 and "refinement_estimate" in row


def test_polygon_command(capsys, knot_file):
    code, out, _ = run(capsys, "polygon", "--knot", knot_file(SQUARE), "--s", "0", "--format", "json")
    assert code == 0
    row = json.loads(out)
    assert row["re_B"] == pytest.approx(16.0)
    assert row["res_m2"] == pytest.approx(4 * math.pi - 8)
    assert run(capsys, "polygon", "--knot", knot_file(CIRCLE))[0] == 2


def test_config_file_with_flag_override(capsys, knot_file, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"s": 2.0, "format": "json", "method": "direct"}))
    code, out, _ = run(capsys, "eval", "--knot", knot_file(TORUS), "--config", str(cfg))
    assert code == 0 and json.loads(out)["method"] == "direct"
    code, out, _ = run(capsys, "eval", "--knot", knot_file(TORUS), "--config", str(cfg), "--format", "csv")
    assert code == 0 and out.startswith("s,re_B")
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "eval", "--knot", knot_file(TORUS), "--config", str(cfg))[0] == 2


def test_out_path(capsys, knot_file, tmp_path):
    target = tmp_path / "row.csv"
    code, out, _ = run(capsys, "eval", "--knot", knot_file(CIRCLE), "--s", "2", "--out", str(target))
    assert code == 0 and out == ""
    assert float(rows_of(target.read_text())[0]["re_B"]) == pytest.approx(8 * math.pi**2)


def test_number_formatting():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(-0.0) == "0"
    assert fmt(None) == ""
    assert "e" not in fmt(1234.5) and "," not in fmt(1234567.0)


def test_selfcheck_with_reduced_order_skips(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, _, err = run(capsys, "selfcheck", "--order", "4", "--format", "json", "--out", str(target))
    report = json.loads(target.read_text())
    assert code == 0 and report["passed"]
    assert "skipped" in err
    notes = json.dumps(report["checks"])
    assert "SKIPPED" in notes and "needs order r > 4" in notes


def test_selfcheck_with_doubled_epsilon_passes(capsys):
    code, out, err = run(capsys, "selfcheck", "--epsilon", "2")
    assert code == 0
    assert all(r["status"] != "FAIL" for r in rows_of(out))
