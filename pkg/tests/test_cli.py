import io
import json
import math
import subprocess
import sys

import pytest

from flowforms.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_verify_json_passes():
    code, text = run("verify", "--scenario", "shear", "--checks", "scenario,symplectic")
    assert code == 0
    d = json.loads(text)
    assert d["scenario"] == "shear" and all(c["pass"] for c in d["checks"])


def test_verify_text_format():
    code, text = run("verify", "--scenario", "rotation", "--checks", "symplectic", "--format", "text")
    assert code == 0
    assert text.startswith("scenario rotation")
    assert all(line.startswith("PASS") for line in text.splitlines()[1:-1])


def test_verify_failure_exit_code():
    # rounding residuals of order 1e-16 exceed an absurdly tight tolerance
    code, text = run("verify", "--scenario", "abc", "--checks", "symplectic", "--tol", "1e-300")
    assert code == 1
    assert not all(c["pass"] for c in json.loads(text)["checks"])


def test_verify_detects_bad_scenario(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text('v = ["x", "0", "0"]\nB = ["0", "0", "1"]\nphi = "z"\nh1 = "z"\n')
    code, text = run("verify", "--scenario", str(path), "--checks", "scenario")
    assert code == 1
    assert json.loads(text)["checks"][0]["max"] == 1.0


def test_verify_writes_file(tmp_path):
    path = tmp_path / "r.json"
    code, text = run("verify", "--scenario", "shear", "--checks", "scenario", "--out", str(path),
                     "--no-timestamps")
    assert code == 0 and "report written" in text
    assert "elapsed_ms" not in json.loads(path.read_text())


def test_verify_is_deterministic():
    argv = ("verify", "--scenario", "rotation", "--checks", "gauge,jacobi", "--seed", "3",
            "--no-timestamps")
    assert run(*argv)[1] == run(*argv)[1]


def test_input_errors_exit_two(tmp_path, capsys):
    assert run("verify", "--scenario", "nowhere")[0] == 2
    assert run("verify", "--scenario", "shear", "--checks", "bogus")[0] == 2
    path = tmp_path / "s.txt"
    path.write_text('v = ["0", "0", "0"]\nB = ["0", "0", "1"]\nh1 = "z"\n')
    assert run("verify", "--scenario", str(path))[0] == 2
    assert "missing field phi" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [[], ["verify"], ["verify", "--scenario", "shear", "--depth", "0"],
                                  ["verify", "--scenario", "shear", "--format", "xml"],
                                  ["helicity-integral", "--abc", "1,1"], ["frobnicate"]])
def test_usage_errors_exit_two(argv):
    with pytest.raises(SystemExit) as err:
        main(argv, io.StringIO())
    assert err.value.code == 2


def test_hierarchy_output():
    code, text = run("hierarchy", "--scenario", "rotation", "--depth", "3")
    assert code == 0
    lines = dict(line.split(" = ", 1) for line in text.splitlines() if " = " in line)
    assert lines["W_1"] == "(2*y*z) d_x + (-2*x*z) d_y"
    assert lines["W_3"] == "0"
    assert "sign: -1" in text


def test_helicity_integral_command():
    code, text = run("helicity-integral", "--abc", "1,1,1", "--resolution", "32")
    assert code == 0
    assert float(text) == pytest.approx(3 * (2 * math.pi) ** 3, rel=1e-3)
    code, text = run("helicity-integral", "--scenario", "shear", "--resolution", "16")
    assert code == 0 and float(text) == 0.0
    assert run("helicity-integral", "--scenario", "shear", "--resolution", "8")[0] == 2


def test_catalog_commands(tmp_path):
    code, text = run("catalog")
    assert code == 0 and text.split() == ["shear", "rotation", "abc"]
    code, text = run("catalog", "show", "shear")
    assert code == 0 and 'phi = "y"' in text
    path = tmp_path / "shear.txt"
    path.write_text(text)
    assert run("verify", "--scenario", str(path), "--checks", "scenario")[0] == 0
    assert run("catalog", "show", "nope")[0] == 2
    assert run("catalog", "show")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "flowforms", "catalog", "list"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and "rotation" in proc.stdout
