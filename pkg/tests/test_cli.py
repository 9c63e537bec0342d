import json

import pytest

from boxdim.cli import main
from test_io import GOLDEN_K4


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def k4(tmp_path):
    p = tmp_path / "k4.json"
    p.write_text(json.dumps(GOLDEN_K4))
    return p


def test_verify_golden(capsys, k4):
    code, out, _ = run(capsys, "verify", k4)
    assert code == 0 and json.loads(out)["ok"]


def test_build_ktree_then_verify(capsys, tmp_path):
    plan = tmp_path / "plan.json"
    plan.write_text(json.dumps({"k": 2, "base": [0, 1, 2], "steps": [{"vertex": 3, "clique": [0, 1]}, {"vertex": 4, "clique": [1, 3]}]}))
    cert = tmp_path / "cert.json"
    code, _, _ = run(capsys, "build", "ktree", "--plan", plan, "-o", cert)
    assert code == 0
    code, out, _ = run(capsys, "verify", cert)
    rep = json.loads(out)
    assert code == 0 and rep["ok"] and rep["dim"] == 3 and rep["n"] == 5


def test_experiment_is_byte_identical(capsys, k4):
    a = run(capsys, "experiment", k4, "--k", 2, "--samples", 20, "--seed", 9)
    b = run(capsys, "experiment", k4, "--k", 2, "--samples", 20, "--seed", 9)
    assert a[0] == 0 and a[1] == b[1]
    assert "wall_clock" not in a[1]


def test_sample_and_separate(capsys, k4):
    code, out, _ = run(capsys, "sample", k4, "--k", 3, "--index", 4)
    assert code == 0 and json.loads(out)["bag_limit"] > 0
    code, out, _ = run(capsys, "separate", k4, "--k", 2)
    rep = json.loads(out)
    assert code == 0 and rep["balanced"] and set(rep["X"]) <= set(rep["S"])


def test_parse_error_exit_2(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{\"graph\": ")
    code, _, err = run(capsys, "verify", bad)
    assert code == 2 and "bad.json" in err
    assert run(capsys, "verify", tmp_path / "missing.json")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_invalid_certificate_exit_1(capsys, tmp_path):
    broken = json.loads(json.dumps(GOLDEN_K4))
    broken["boxes"]["3"] = [["5", "6"], ["5", "6"]]
    p = tmp_path / "broken.json"
    p.write_text(json.dumps(broken))
    code, out, _ = run(capsys, "verify", p)
    assert code == 1 and not json.loads(out)["ok"]


def test_plot_and_info(capsys, k4, tmp_path):
    svg = tmp_path / "k4.svg"
    assert run(capsys, "plot", k4, "-o", svg)[0] == 0
    text = svg.read_text()
    assert text.startswith("<svg") and text.count("<rect") >= 4
    code, out, _ = run(capsys, "info", k4)
    assert code == 0 and "4" in out


def test_plot_needs_axes_in_3d(capsys, tmp_path):
    cert = tmp_path / "c3.json"
    assert run(capsys, "build", "corner", "--d", 3, "-o", cert)[0] == 0
    assert run(capsys, "plot", cert)[0] == 2
    assert run(capsys, "plot", cert, "--axes", "0,2")[0] == 0
