import json
import math

import numpy as np
import pytest

from loggas import mehta_log_z
from loggas.cli import dispatch
from loggas.model import measure_from_json


def test_renorm_lattice_stdout(capsys):
    assert dispatch(["renorm", "--lattice", "--N", "8"]) == 0
    out = capsys.readouterr().out.strip()
    assert out == f"{-math.pi * math.log(2.0 * math.pi):.12f}"


def test_renorm_from_stdin(monkeypatch, capsys):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps({"N": 2, "points": [0.0, 0.5]})))
    assert dispatch(["renorm", "--N", "2"]) == 0
    val = float(capsys.readouterr().out.strip())
    assert val == pytest.approx(-math.pi * math.log(math.pi * math.sqrt(2.0)), abs=1e-9)


def test_renorm_bad_period():
    assert dispatch(["renorm", "--lattice", "--N", "0"]) == 1


def test_missing_required_flag_exits_two():
    with pytest.raises(SystemExit) as e:
        dispatch(["fekete"])
    assert e.value.code == 2


def test_unknown_command_exits_two(capsys):
    with pytest.raises(SystemExit) as e:
        dispatch(["no-such-command"])
    assert e.value.code == 2


def test_fekete_outputs_and_determinism(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for d in (a, b):
        assert dispatch(["fekete", "--n", "6", "--seed", "3", "--out", str(d)]) == 0
    assert (a / "fekete.csv").read_bytes() == (b / "fekete.csv").read_bytes()
    payload = json.loads((a / "fekete.json").read_text())
    assert payload["n"] == 6
    assert payload["converged"] is True
    assert len(payload["points"]) == 6
    assert payload["grad_norm"] <= 1e-8 * 6
    manifest = json.loads((a / "manifest-fekete.json").read_text())
    assert manifest["command"] == "fekete"
    assert manifest["seed"] == 3
    # csv: header plus one row per point
    lines = (a / "fekete.csv").read_text().strip().splitlines()
    assert lines[0] == "index,x"
    assert len(lines) == 7


def test_equilibrium_output(tmp_path):
    out = tmp_path / "eq"
    assert dispatch(["equilibrium", "--n", "600", "--out", str(out)]) == 0
    mu, consts = measure_from_json((out / "measure.json").read_text())
    assert consts is not None
    assert mu.interval_mass(-3.0, 3.0) == pytest.approx(1.0, abs=1e-8)
    assert consts.mean_field_energy == pytest.approx(0.75, abs=2e-2)
    assert mu.support[0][0] == pytest.approx(-2.0, abs=0.1)


def test_sample_outputs(tmp_path):
    out = tmp_path / "s"
    rc = dispatch(
        ["sample", "--n", "4", "--beta", "2", "--steps", "2000", "--chains", "2", "--seed", "1", "--out", str(out)]
    )
    assert rc == 0
    stats = json.loads((out / "stats.json").read_text())
    assert stats["config"]["n"] == 4
    assert stats["config"]["potential"] == "quadratic"
    assert 0.0 < stats["acceptance"] < 1.0
    lines = (out / "samples.csv").read_text().strip().splitlines()
    assert lines[0] == "sample,x0,x1,x2,x3"
    # 2 chains x 2000 steps / default thinning 50
    assert len(lines) == 1 + 2 * (2000 // 50)
    row = np.array([float(v) for v in lines[1].split(",")[1:]])
    assert np.all(np.diff(row) > 0)


def test_partition_json(capsys):
    assert dispatch(["partition", "--n", "8", "--beta", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["method"] == "exact-quadratic"
    assert rep["log_z"] == pytest.approx(mehta_log_z(8, 2.0), rel=1e-12)
    assert "next_order" in rep and "error_bar" in rep


def test_partition_sweep_csv(capsys):
    assert dispatch(["partition-sweep", "--n", "4,8", "--beta", "1,2"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "n,beta,log_z,next_order,method"
    assert len(lines) == 5


def test_verify_field_csv(tmp_path):
    out = tmp_path / "vf"
    rc = dispatch(["verify-field", "--n", "0", "--out", str(out)])
    assert rc == 0
    lines = (out / "verify_field.csv").read_text().strip().splitlines()
    assert lines[0] == "config_id,N,periodic_w,w_quadrature,eta,y_cut,rel_err"
    assert len(lines) == 4  # three lattice rows, no random configs
    for ln in lines[1:]:
        assert float(ln.split(",")[-1]) <= 0.01


def test_outputs_have_no_float_repr_leak(tmp_path):
    out = tmp_path / "clean"
    dispatch(["fekete", "--n", "4", "--seed", "0", "--out", str(out)])
    text = (out / "fekete.csv").read_text()
    assert "np.float" not in text and "nan" not in text
