import json
import math
import subprocess
import sys

import pytest

from nkcross.cli import main, parse_complex, parse_point, UsageError

W_POINT = json.dumps([0, [0, 1 / math.sqrt(3)], [0, 1 / math.sqrt(3)]])


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


def test_parsers():
    assert parse_complex("0.5j") == 0.5j
    assert parse_complex("1,2") == 1 + 2j
    assert parse_complex("[0, 1]") == 1j
    with pytest.raises(UsageError):
        parse_complex("abc")
    assert list(parse_point('[0, [0, 0.5], "0.25j"]')) == [0, 0.5j, 0.25j]
    with pytest.raises(UsageError):
        parse_point("[0, ")


def test_reproduce_example(capsys):
    code, rep = report(capsys, "reproduce-example")
    assert code == 0 and rep["passed"]
    assert rep["payload"]["hull_value_exact"] == "4/3"
    assert rep["payload"]["witnesses"] == ["011"]


def test_reproduce_example_at_zero_fails(capsys):
    code, rep = report(capsys, "reproduce-example", "--w", "0")
    assert code == 1 and not rep["passed"]


def test_reports_are_byte_identical(capsys):
    a = run(capsys, "sample", "--count", "5", "--seed", "3")[1]
    b = run(capsys, "sample", "--count", "5", "--seed", "3")[1]
    c = run(capsys, "sample", "--count", "5", "--seed", "4")[1]
    assert a == b and a != c


def test_eval_h_prints_bare_value(capsys):
    code, out, err = run(capsys, "eval-h", "--factor", "1", "--z", f"{1 / math.sqrt(3)}j")
    assert code == 0
    assert float(out) == pytest.approx(2 / 3, abs=1e-12)
    assert "wall time" in err


def test_eval_h_errors(capsys):
    assert run(capsys, "eval-h", "--factor", "0", "--z", "2j")[0] == 2
    assert run(capsys, "eval-h", "--factor", "3", "--z", "0")[0] == 2
    assert run(capsys, "eval-h", "--factor", "0")[0] == 2
    assert run(capsys, "no-such-command")[0] == 2


def test_cross_test(capsys):
    code, rep = report(capsys, "cross-test", "--point", W_POINT)
    assert code == 0
    p = rep["payload"]
    assert p["member"] and p["witnesses"] == ["011"] and p["decomposition"] == [True, True]
    assert len(p["path_to_center"]) == 2


def test_cross_test_generalized(capsys):
    code, rep = report(capsys, "cross-test", "--scene", "builtin:three-intervals-T", "--point", "[0.25, \"0.5j\", 0.75]")
    assert code == 0 and not rep["payload"]["member"]
    code, rep = report(capsys, "cross-test", "--scene", "builtin:three-intervals-Y", "--point", "[0.25, \"0.5j\", 0.75]")
    assert rep["payload"]["witnesses"] == ["010"]


def test_hull_test(capsys):
    code, rep = report(capsys, "hull-test", "--point", W_POINT)
    p = rep["payload"]
    assert p["member"] is True
    assert p["composite_Zs"]["value"] == pytest.approx(4 / 3)
    assert p["composite_Zs"]["member"] is False
    assert p["composite_Z"]["member"] is True


def test_lemma_inc(capsys):
    code, rep = report(capsys, "lemma-inc", "--point", W_POINT)
    assert code == 0 and rep["payload"]["value"] == pytest.approx(1 / 3)
    assert run(capsys, "lemma-inc", "--point", '["0.9j", "0.9j", "0.9j"]')[0] == 2


def test_solve_h_exports_csv(capsys, tmp_path):
    code, rep = report(capsys, "solve-h", "--factor", "0", "--grid", "65", "--out", str(tmp_path))
    assert code == 0 and rep["payload"]["sup_error_vs_closed_form"] <= 5e-3
    assert (tmp_path / "field_0.csv").read_text().startswith("x,y,h\n")
    assert (tmp_path / "report_solve-h.json").exists()


def test_slice_and_sample_exports(capsys, tmp_path):
    code, rep = report(capsys, "slice", "--factor", "2", "--fixed", "[0, \"0.5j\"]", "--resolution", "11",
                       "--out", str(tmp_path))
    assert code == 0 and (tmp_path / "slice_2.csv").exists()
    code, rep = report(capsys, "sample", "--count", "20", "--kind", "cross", "--out", str(tmp_path))
    assert len(json.loads((tmp_path / "samples_cross.json").read_text())) == 20
    assert run(capsys, "sample", "--count", "0")[0] == 2


def test_extend(capsys, tmp_path):
    code, rep = report(capsys, "extend", "--function", "poly222", "--out", str(tmp_path))
    assert code == 0 and rep["payload"]["coef_error"] <= 1e-8
    assert (tmp_path / "hull_errors.csv").exists()
    code, rep = report(capsys, "extend", "--function", "rational:c=0.5", "--degrees", "1")
    assert code == 0 and rep["payload"]["blowup"]["passed"]
    code, rep = report(capsys, "extend", "--function", "conj")
    assert code == 1
    assert run(capsys, "extend", "--function", "sin")[0] == 2
    assert run(capsys, "extend", "--function", "poly", "--degrees", "1,2")[0] == 2


def test_verify_suite_small(capsys):
    assert run(capsys, "verify-suite", "--sizes", "0")[0] == 2


@pytest.mark.slow
def test_verify_suite_default_scene(capsys):
    code, rep = report(capsys, "verify-suite", "--sizes", "2000")
    assert code == 0, [o for o in rep["outcomes"] if not o["passed"]]


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "nkcross.cli", "reproduce-example"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["passed"] is True
