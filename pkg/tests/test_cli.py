import json
import subprocess
import sys
from pathlib import Path

import pytest

from quadaz.cli import run

GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "normform": ["corr", "normform", "--field", "Q", "--a", "2", "--b", "3", "--d", "5"],
    "hamilton_split": ["quat", "split", "--field", "Q", "--a", "-1", "--b", "-1"],
    "cubic_check_worked": ["cubic", "check", "--field", "Q", "--cubic", "x0*y0^2+x1*y1^2+x2*y2^2+x0*x1*x2"],
    "certify_refused": ["corr", "certify", "--field", "Fun:Fp:5:t", "--a", "-1", "--b", "t", "--d", "t", "--at", "t"],
    "clif_center": ["clif", "center", "--field", "Q", "--form", "diag(1,1,1,1)"],
    "quat_residue": ["quat", "residue", "--field", "Fun:Fp:5:t", "--a", "t", "--b", "2", "--at", "t"],
}


def _render(code, text):
    return f"exit: {code}\n{text}" + ("" if text.endswith("\n") else "\n")


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    assert _render(*run(CASES[name])) == (GOLDEN / f"{name}.txt").read_text()


@pytest.mark.parametrize("name", ["normform", "certify_refused"])
def test_deterministic(name):
    assert run(CASES[name]) == run(CASES[name])
    assert run(CASES[name] + ["--seed", "3"]) == run(CASES[name] + ["--seed", "3"])


def test_normform_example():
    code, text = run(CASES["normform"])
    assert code == 0 and "form: diag(1,2,3,30)" in text and "verified: true" in text


def test_hamilton_nonsplit():
    code, text = run(CASES["hamilton_split"])
    assert code == 0 and "verdict: nonsplit" in text and "local-witness-places: inf, 2" in text


@pytest.mark.parametrize(
    "argv, name",
    [
        (["cubic", "extract", "--field", "Q", "--cubic", "x0*y0^2+"], "ParseError"),
        (["cubic", "extract", "--field", "Q", "--cubic", "y0^3+x0*y1^2"], "PlaneNotContained"),
        (["field", "--field", "Fp:9", "--element", "1"], "ParseError"),
        (["quat", "split", "--field", "Q", "--a", "0", "--b", "1"], "ZeroSlot"),
    ],
)
def test_errors_exit_one_with_name(argv, name):
    code, text = run(argv)
    assert code == 1
    assert text.splitlines()[0].startswith(f"error: {name}:")


def test_usage_error_exits_one():
    code, _ = run(["form", "diag", "--field", "Q"])
    assert code == 1


def test_json_mirror():
    code, text = run(["--json"] + CASES["hamilton_split"])
    data = json.loads(text)
    _, plain = run(CASES["hamilton_split"])
    assert data["exit"] == code == 0
    assert data["command"] == "quat split"
    assert data["report"] == plain.splitlines()


def test_certificate_complete_flagship():
    argv = ["corr", "certify", "--field", "Fun:Fun:Fp:5:x:y", "--a=-x", "--b", "1-y", "--d", "y", "--at", "y,y-2,x+1,x-1"]
    code, text = run(argv)
    assert code == 0
    assert "status: complete" in text and text.rstrip().endswith("self-check: pass")


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "quadaz.cli"] + CASES["normform"], capture_output=True, text=True, check=False
    )
    assert out.returncode == 0 and "diag(1,2,3,30)" in out.stdout
