import json
import subprocess
import sys

import pytest

from klab.cli import main


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def ring_file(tmp_path):
    def make(ideal, vars_=("x", "y", "z"), name="ring.json"):
        path = tmp_path / name
        path.write_text(json.dumps({"vars": list(vars_), "ideal": list(ideal)}))
        return str(path)
    return make


def test_classify_ci3(ring_file, capsys):
    code, out = run(["classify", ring_file(["x^2", "y^2", "z^2"])], capsys)
    body = json.loads(out)
    assert code == 0
    assert body["class"] == "C(3)" and body["gorenstein"] and body["sdc_bound"] == 1


def test_classify_text_format(ring_file, capsys):
    code, out = run(["classify", ring_file(["x^2", "x*y", "y^2"], ("x", "y")), "--format", "text"], capsys)
    assert code == 0 and out.startswith("class S")


def test_parse_error_reports_column(ring_file, capsys):
    code, out = run(["classify", ring_file(["x^"])], capsys)
    body = json.loads(out)
    assert code == 2 and body["column"] == 3


def test_out_of_scope_exit_code(ring_file, capsys):
    path = ring_file(["w^2", "x^2", "y^2", "z^2"], ("w", "x", "y", "z"))
    code, out = run(["classify", path], capsys)
    assert code == 3 and json.loads(out)["koszul_dims"] == [1, 4, 6, 4, 1]


def test_missing_file_is_input_error(tmp_path, capsys):
    code, _ = run(["classify", str(tmp_path / "nope.json")], capsys)
    assert code == 2


def test_bad_char_rejected(ring_file):
    with pytest.raises(SystemExit) as err:
        main(["classify", ring_file(["x^2"]), "--char", "12"])
    assert err.value.code == 2


def test_output_is_deterministic(ring_file, tmp_path, capsys):
    path = ring_file(["x^2", "y^2", "z^2", "x*y"])
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["classify", path, "--output", str(a)])
    main(["classify", path, "--output", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_table_roundtrip(tmp_path, capsys):
    code, out = run(["table", "G", "2"], capsys)
    body = json.loads(out)
    assert code == 0 and body["metadata"]["class"] == "G(2)"
    path = tmp_path / "g2.json"
    body.pop("metadata")
    path.write_text(json.dumps(body))
    code, out = run(["compute", "poincare", "--algebra", str(path), "--module", "A", "--stages", "4"], capsys)
    assert code == 0 and json.loads(out)["coeffs"][:2] == [1, 0]


def test_table_coincidence_note(capsys):
    code, out = run(["table", "H", "0", "1"], capsys)
    assert code == 0 and "G(1)" in json.loads(out)["metadata"]["note"]


def test_table_bad_parameter(capsys):
    code, _ = run(["table", "G", "0"], capsys)
    assert code == 2


def test_compute_koszul(ring_file, capsys):
    code, out = run(["compute", "koszul", ring_file(["x^2", "x*y", "y^2"], ("x", "y"))], capsys)
    body = json.loads(out)
    assert code == 0 and body["homology_dims"] == [1, 3, 2] and body["euler"] == 0


@pytest.fixture
def exterior(tmp_path, capsys):
    main(["table", "C", "1"])
    body = json.loads(capsys.readouterr().out)
    body.pop("metadata")
    path = tmp_path / "e1.json"
    path.write_text(json.dumps(body))
    return str(path)


def test_compute_tor_over_exterior(exterior, capsys):
    code, out = run(["compute", "tor", "--algebra", exterior, "--range", "0", "6"], capsys)
    body = json.loads(out)
    assert code == 0 and body["dims"] == [1, 0, 1, 0, 1, 0, 1]


def test_compute_budget_exceeded(exterior, capsys):
    code, out = run(["compute", "tor", "--algebra", exterior, "--range", "0", "30", "--stages", "4"], capsys)
    body = json.loads(out)
    assert code == 4 and body["window"] == [0, 4]


def test_compute_rhom_dual(exterior, capsys):
    code, out = run(["compute", "rhom", "--algebra", exterior, "--module-x", "D", "--module-y", "D"], capsys)
    body = json.loads(out)
    assert code == 0 and sum(body["dims"]) == 2


def test_verify_small_suite(capsys):
    code, out = run(["verify", "poincare"], capsys)
    assert code == 0 and json.loads(out)["passed"]


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "klab.cli", "table", "C", "0", "--format", "text"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "C(0)" in proc.stdout
