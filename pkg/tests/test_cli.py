import csv
import io
import json
from pathlib import Path

import pytest
from numpy.testing import assert_allclose

from uavoffload import cli
from uavoffload.config import load_config
from uavoffload.phy import ConfigError

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _compare(doc, ref):
    assert list(doc) == list(ref)
    for k, v in ref.items():
        if isinstance(v, dict):
            _compare(doc[k], v)
        elif isinstance(v, float):
            assert_allclose(doc[k], v, rtol=1e-9, err_msg=k)
        else:
            assert doc[k] == v, k


@pytest.mark.parametrize("argv, name", [
    (["solve", "--scheme", "reuse", "--format", "json"], "solve_reuse.json"),
    (["energy", "--format", "json"], "energy.json"),
])
def test_golden_json(capsys, argv, name):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    _compare(json.loads(out), json.loads((GOLDEN / name).read_text()))


def test_solve_text_mentions_optima(capsys):
    code, out, _ = run(capsys, "solve", "--set", "phy.mu=1.2", "--set", "optimizer.r_I_grid=201")
    assert code == 0
    for word in ("common throughput", "rho =", "r_I =", "r_U =", "iterations"):
        assert word in out


def test_csv_headers_frozen(capsys):
    code, out, _ = run(capsys, "solve", "--scheme", "gbs-only", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == f"# uavoffload solve schema {cli.SCHEMA_VERSION}"
    assert tuple(lines[1].split(",")) == cli.SOLVE_FIELDS
    assert cli.SWEEP_FIELDS[:4] == ("axis", "label", "value", "scheme")
    assert cli.SIM_FIELDS[:2] == ("kind", "realization")


def test_bad_unit_exit_2(capsys):
    code, out, err = run(capsys, "solve", "--set", "phy.P_U=20 dbm2")
    assert code == 2 and out == ""
    assert "P_U" in err and "dbm2" in err


def test_config_error_has_line(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[phy]\nW = 10 MHz\nP_G = 40 dbz\n")
    code, _, err = run(capsys, "solve", "-c", str(cfg))
    assert code == 2
    assert "run.ini:3" in err and "P_G" in err


def test_unknown_key_and_section(capsys):
    assert run(capsys, "solve", "--set", "phy.bogus=1")[0] == 2
    assert run(capsys, "solve", "--set", "nosuch.key=1")[0] == 2


def test_gbs_only_warns_on_unused(capsys):
    code, _, err = run(capsys, "solve", "--scheme", "gbs-only", "--set", "phy.psi=pi/4", "--format", "csv")
    assert code == 0
    assert "unused" in err and "psi" in err


def test_empty_sweep_exit_2(capsys):
    assert run(capsys, "sweep")[0] == 2
    assert run(capsys, "sweep", "--set", "sweep.P_U=")[0] == 2


def test_sweep_rows(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", "--set", "sweep.P_U=0, 10, 20 dBm", "--set", "phy.mu=1.2",
                     "--set", "optimizer.r_I_grid=201", "--out", str(out), "--threads", "2")
    assert code == 0
    text = out.read_text()
    rows = list(csv.DictReader(io.StringIO(text.split("\n", 1)[1])))
    assert len(rows) == 9
    by = {}
    for r in rows:
        by.setdefault(r["label"], {})[r["scheme"]] = float(r["nu_bar"])
    for v in by.values():
        assert v["reuse"] >= v["orthogonal"] >= v["gbs-only"]


def _sim_args(threads):
    return ["simulate", "--set", "montecarlo.realizations=4", "--set", "run.r_I=500 m", "--set", "run.rho=0.5",
            "--seed", "9", "--threads", str(threads)]


def test_simulate_byte_identical(capsys):
    outs = [run(capsys, *_sim_args(t))[1] for t in (1, 3, 1)]
    assert outs[0] == outs[1] == outs[2]
    assert outs[0].startswith("# uavoffload simulate schema")


def test_simulate_single_realization_json(capsys):
    code, out, _ = run(capsys, "simulate", "--set", "montecarlo.realizations=1", "--set", "run.r_I=500",
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    real = doc["realizations"][0]
    for name in ("theta_U_bound", "theta_G", "outage"):
        assert doc["aggregate"][name]["mean"] == real[name]
        assert doc["aggregate"][name]["se"] == 0.0


def test_simulate_rejects_gbs_only(capsys):
    assert run(capsys, "simulate", "--scheme", "gbs-only")[0] == 2


def test_benchmark_small(capsys):
    code, out, _ = run(capsys, "benchmark", "--set", "microcell.realizations=2", "--set", "microcell.M=1, 4",
                       "--set", "microcell.r_grid=100, 300 m", "--set", "microcell.rho_grid=0.3, 0.5",
                       "--set", "microcell.d_grid=0.7, 0.85", "--set", "phy.mu=1.2", "--set", "optimizer.r_I_grid=201")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.split("\n", 1)[1])))
    assert [r["scheme"] for r in rows] == ["micro", "micro", "uav-orthogonal", "gbs-only"]


def test_energy_text(capsys):
    code, out, _ = run(capsys, "energy")
    assert code == 0
    assert "kbits/J" in out and "m/s" in out


def test_runtime_failure_exit_1(capsys, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("solver blew up")

    monkeypatch.setattr(cli.optimizer, "solve", boom)
    code, _, err = run(capsys, "solve", "--set", "phy.mu=1.2")
    assert code == 1 and "solver blew up" in err


def test_load_config_ranges():
    cfg = load_config("[sweep]\nP_U = 0:30:5 dBm\nlambda = 100, 200 /km2\n")
    assert [lab for _, lab in cfg.sweep_P_U] == ["0 dBm", "5 dBm", "10 dBm", "15 dBm", "20 dBm", "25 dBm", "30 dBm"]
    assert_allclose([v for v, _ in cfg.sweep_lambda], [1e-4, 2e-4])
    with pytest.raises(ConfigError):
        load_config("[phy]\nPhi_G = 2pi\n")
    cfg = load_config(None, ["phy.mu=1.3"])
    assert not cfg.mu_auto and cfg.params.mu == 1.3
