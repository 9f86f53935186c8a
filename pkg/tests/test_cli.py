import json
import subprocess
import sys

import numpy as np
import pytest

from concircular.cli import main
from concircular.integrator import read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# ---------------------------------------------------------------------------
# derive


def test_derive_eq1(capsys):
    code, out, _ = run(capsys, "derive", "eq1", "--m", "1")
    assert code == 0
    lines = dict(ln.split(" = ", 1) for ln in out.splitlines())
    assert set(lines) == {"L ", "E1", "E2", "H "}


def test_derive_length(capsys):
    code, out, _ = run(capsys, "derive", "length", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["H"] == "0" and "m" in doc["E1"]


def test_derive_curvature_times_length(capsys):
    code, out, _ = run(capsys, "derive", "curvature-times-length", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["H"] == "0" and doc["E1"] == "0" and doc["E2"] == "0"


def test_derive_free_expression(capsys):
    code, out, _ = run(capsys, "derive", "u1*u1 + u2*u2", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["E1"] == "-2*du1"


@pytest.mark.parametrize("text", ["u1 +", "ddu1*u1", "u3"])
def test_derive_bad_input(capsys, text):
    code, _, err = run(capsys, "derive", text)
    assert code == 2 and err.startswith("error:")


# ---------------------------------------------------------------------------
# check


def test_check_theorem(capsys):
    code, out, _ = run(capsys, "check", "theorem", "--m", "1")
    assert code == 0 and "PASS" in out.splitlines()[0]


def test_check_theorem_json(capsys):
    code, out, _ = run(capsys, "check", "theorem", "--format", "json", "--seed", "5")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["seed"] == 5


def test_check_helmholtz_perturbed(capsys):
    code, out, _ = run(capsys, "check", "helmholtz", "theorem+b-antisymmetric", "--m", "1", "--format", "json")
    doc = json.loads(out)
    failed = [it["name"] for it in doc["items"] if not it["passed"]]
    assert code == 1 and failed == ["a"]


def test_check_zermelo(capsys):
    assert run(capsys, "check", "zermelo", "u1*u1")[0] == 1
    assert run(capsys, "check", "zermelo", "curvature")[0] == 0
    assert run(capsys, "check", "zermelo", "length")[0] == 0


def test_check_symmetry_and_first_integral(capsys):
    assert run(capsys, "check", "symmetry")[0] == 0
    assert run(capsys, "check", "first-integral")[0] == 0
    assert run(capsys, "check", "first-integral", "theorem+a-exponent")[0] == 1


def test_check_file_target(capsys, tmp_path):
    path = tmp_path / "eq.json"
    path.write_text(json.dumps({"lagrangian": "eq1"}))
    assert run(capsys, "check", "theorem", str(path), "--m", "1")[0] == 0


def test_check_nonconformant(capsys):
    code, _, err = run(capsys, "check", "helmholtz", "ddu1*u1*u1;u2")
    assert code == 2 and "nonconformant" in err


def test_check_bad_target(capsys):
    assert run(capsys, "check", "helmholtz", "no-such-preset")[0] == 2
    assert run(capsys, "check", "zermelo")[0] == 2


def test_check_is_deterministic(capsys):
    a = run(capsys, "check", "theorem", "--format", "json")[1]
    b = run(capsys, "check", "theorem", "--format", "json")[1]
    assert a == b


# ---------------------------------------------------------------------------
# integrate


def test_integrate_single_row(capsys, tmp_path):
    out = tmp_path / "t.csv"
    code, text, _ = run(capsys, "integrate", "--steps", "0", "--out", str(out), "--seed", "9")
    assert code == 0 and "samples=1" in text
    lines = out.read_text().splitlines()
    assert lines[0] == "# seed=9" and len(lines) == 4


def test_integrate_byte_identical(capsys, tmp_path):
    args = ["integrate", "--metric", "sphere(1)", "--equation", "geocircle", "--gauge", "variational",
            "--ic", "1.2,0.3,0.75,2.5,0,0", "--method", "rk45", "--t-end", "2", "--steps", "100000"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert np.max(read_csv(a)["residual"]) < 1e-7


def test_integrate_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"metric": "euclidean", "m": 1, "ic": [0, 0, 1, 0, 0, 1], "steps": 100,
                               "format": "text", "out": str(tmp_path / "t.json")}))
    code, text, _ = run(capsys, "integrate", "--config", str(cfg), "--steps", "10")
    assert code == 0 and "samples=11" in text and "max|H+k|=" in text
    assert len(json.loads((tmp_path / "t.json").read_text())["rows"]) == 11


def test_integrate_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"metrik": "euclidean"}))
    assert run(capsys, "integrate", "--config", str(cfg))[0] == 2


@pytest.mark.parametrize("argv", [
    ["--ic", "1,2,3"],
    ["--ic", "0,0,0,0,1,0"],
    ["--metric", "torus"],
    ["--step", "-1"],
    ["--m", "-1"],
    ["--metric", "sphere(1)", "--ic", "0,0,1,0,0,0"],
])
def test_integrate_bad_input(capsys, argv):
    assert run(capsys, "integrate", *argv)[0] == 2


def test_integrate_domain_exit_writes_partial_file(capsys, tmp_path):
    out = tmp_path / "p.csv"
    code, text, err = run(capsys, "integrate", "--metric", "hyperbolic", "--ic", "0,0.5,0,-1,0,0",
                          "--step", "0.1", "--steps", "1000", "--out", str(out))
    assert code == 3 and "samples kept" in err and "summary:" in text
    data = read_csv(out)
    assert len(data["sigma"]) >= 1 and np.all(data["x2"] > 0)


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["integrate", "--method", "euler"])
    assert info.value.code == 2


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "concircular.cli", "check", "zermelo", "curvature"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "PASS" in res.stdout
