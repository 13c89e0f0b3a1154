import csv
import io
import json

import pytest

from etpasens.cli import main
from etpasens.config import builtin, to_text
from etpasens.sensitivity import bound_attenuation, bound_separation, optimize_eta


@pytest.fixture()
def geneva_cfg(tmp_path):
    path = tmp_path / "geneva.cfg"
    path.write_text(to_text(builtin("geneva")), encoding="utf-8")
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    return [dict(zip(header, row)) for row in body]


def test_sensitivity_separation(capsys, geneva_cfg):
    code, out, err = run_cli(
        capsys, "sensitivity", "--config", geneva_cfg, "--scheme", "separation"
    )
    assert code == 0
    assert "3070" in out
    assert "GM" in out


def test_sensitivity_attenuation_with_eta(capsys, geneva_cfg):
    code, out, _ = run_cli(
        capsys,
        "sensitivity",
        "--config",
        geneva_cfg,
        "--scheme",
        "attenuation",
        "--eta",
        "0.5",
        "--format",
        "csv",
    )
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 1
    assert float(rows[0]["sigma_c_gm"]) == pytest.approx(1.23e4, rel=0.01)
    assert rows[0]["dominant_noise"] == "dark"


def test_sensitivity_defaults_all_schemes(capsys, geneva_cfg):
    code, out, _ = run_cli(capsys, "sensitivity", "--config", geneva_cfg, "--format", "csv")
    assert code == 0
    rows = read_csv(out)
    assert [r["scheme"] for r in rows] == ["separation", "attenuation", "probabilistic"]
    # bare attenuation picks up the recorded reference eta
    assert float(rows[1]["eta"]) == 0.5


def test_missing_config_file_exit_one(capsys):
    code, out, err = run_cli(capsys, "sensitivity", "--config", "/nope/missing.cfg")
    assert code == 1
    assert "missing.cfg" in err


def test_invalid_config_exit_one(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("label = x\npump_mode = pulsed\nT = 1 s\n", encoding="utf-8")
    code, _, err = run_cli(capsys, "sensitivity", "--config", str(bad))
    assert code == 1
    assert "missing key" in err


def test_computation_error_exit_two(capsys, geneva_cfg):
    # gating a CW pump is refused by the model
    code, _, err = run_cli(capsys, "optimize", "gate", "--config", geneva_cfg)
    assert code == 2
    assert "pulsed" in err


def test_table_default_passes(capsys):
    code, out, _ = run_cli(capsys, "table", "--format", "csv")
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 7
    assert [r["label"] for r in rows][:2] == ["Geneva", "Oregon"]
    for row in rows:
        assert row["consistent_att"] == "true"
        assert row["consistent_split"] == "true"
    geneva = rows[0]
    assert float(geneva["deviation_att"]) < 0.15
    # full precision survives the CSV round trip
    assert float(geneva["computed_split_gm"]) == pytest.approx(
        bound_separation(builtin("geneva")), rel=1e-11
    )


def test_table_tight_tolerance_exit_three(capsys):
    code, _, err = run_cli(capsys, "table", "--tolerance", "0.01")
    assert code == 3
    assert "tolerance" in err


def test_table_json_lines(capsys):
    code, out, _ = run_cli(capsys, "table", "--format", "json-lines")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert len(rows) == 7
    assert rows[0]["label"] == "Geneva"
    assert isinstance(rows[0]["computed_att_gm"], float)


def test_sweep_matches_sensitivity(capsys, geneva_cfg, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, _, _ = run_cli(
        capsys,
        "sweep",
        "--config",
        geneva_cfg,
        "--parameter",
        "N_P",
        "--values",
        "190000",
        "--scheme",
        "separation",
        "--format",
        "csv",
        "--output",
        str(out_path),
    )
    assert code == 0
    rows = read_csv(out_path.read_text(encoding="utf-8"))
    assert len(rows) == 1
    assert float(rows[0]["sigma_c_gm"]) == pytest.approx(
        bound_separation(builtin("geneva")), rel=1e-11
    )


def test_sweep_eta_grid_minimum_matches_optimizer(capsys, geneva_cfg):
    # sweeping the attenuation value on a grid brackets the optimizer result
    values = ",".join(str(v / 100.0) for v in range(2, 99, 2))
    code, out, _ = run_cli(
        capsys,
        "sweep",
        "--config",
        geneva_cfg,
        "--parameter",
        "N_P",
        "--values",
        "190000",
        "--scheme",
        "separation",
        "--format",
        "csv",
    )
    assert code == 0
    geneva = builtin("geneva")
    opt = optimize_eta(geneva)
    grid_best = min(
        bound_attenuation(geneva, v / 100.0) for v in range(2, 99, 2)
    )
    assert opt.sigma_c_gm <= grid_best
    assert grid_best == pytest.approx(opt.sigma_c_gm, rel=1e-3)


def test_sweep_ordering_separation_vs_attenuation(capsys, tmp_path):
    out_path = tmp_path / "methods.csv"
    code, _, _ = run_cli(
        capsys,
        "sweep",
        "--builtin",
        "this work",
        "--parameter",
        "N_P",
        "--from",
        "1",
        "--to",
        "1e14",
        "--points",
        "11",
        "--scheme",
        "separation",
        "--scheme",
        "attenuation:0.5",
        "--scheme",
        "attenuation:opt",
        "--format",
        "csv",
        "--output",
        str(out_path),
    )
    assert code == 0
    rows = read_csv(out_path.read_text(encoding="utf-8"))
    assert len(rows) == 33
    by_value = {}
    for row in rows:
        by_value.setdefault(row["value"], {})[row["variant"]] = float(row["sigma_c_gm"])
    for value, variants in by_value.items():
        assert variants["separation"] <= variants["attenuation:0.5"]
        assert variants["separation"] <= variants["attenuation:opt"]


def test_sweep_rejects_unknown_parameter(capsys, geneva_cfg):
    code, _, err = run_cli(
        capsys,
        "sweep",
        "--config",
        geneva_cfg,
        "--parameter",
        "magic",
        "--values",
        "1",
    )
    assert code == 1
    assert "magic" in err


def test_ladder_command(capsys):
    code, out, _ = run_cli(capsys, "ladder", "--builtin", "boulder fs", "--format", "csv")
    assert code == 0
    rows = read_csv(out)
    assert [r["kind"] for r in rows] == [
        "baseline",
        "best_method",
        "time_gating",
        "fourier_limit",
        "zero_dark",
    ]
    assert rows[-1]["meets_target"] == "true"
    assert rows[2]["applied"] == "true"


def test_ladder_all_builtin(capsys):
    code, out, _ = run_cli(capsys, "ladder", "--builtin", "all", "--format", "csv")
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 35  # 7 experiments x 5 steps
    finals = {r["label"]: r["meets_target"] for r in rows if r["kind"] == "zero_dark"}
    assert finals["Geneva"] == "true"
    assert finals["Oregon"] == "false"


def test_optimize_eta_command(capsys, geneva_cfg):
    code, out, _ = run_cli(
        capsys, "optimize", "eta", "--config", geneva_cfg, "--format", "csv"
    )
    assert code == 0
    row = read_csv(out)[0]
    assert float(row["eta_opt"]) == pytest.approx(0.5, abs=0.01)
    assert row["dominant_noise"] == "dark"


def test_optimize_gate_command(capsys):
    code, out, _ = run_cli(
        capsys, "optimize", "gate", "--builtin", "boulder fs", "--format", "csv"
    )
    assert code == 0
    row = read_csv(out)[0]
    assert 0.3 < float(row["g_opt"]) < 0.5
    assert row["tau_assumed"] == "true"


def test_simulate_determinism(capsys, geneva_cfg):
    args = (
        "simulate",
        "--config",
        geneva_cfg,
        "--scheme",
        "separation",
        "--sigma-c",
        "0",
        "--trials",
        "10000",
        "--seed",
        "7",
        "--format",
        "csv",
    )
    code1, out1, _ = run_cli(capsys, *args)
    code2, out2, _ = run_cli(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2


def test_simulate_grid(capsys, geneva_cfg):
    code, out, _ = run_cli(
        capsys,
        "simulate",
        "--config",
        geneva_cfg,
        "--scheme",
        "separation",
        "--grid",
        "300,30000,3",
        "--trials",
        "2000",
        "--seed",
        "3",
        "--format",
        "csv",
    )
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 3
    fractions = [float(r["detect_fraction"]) for r in rows]
    assert fractions[-1] >= fractions[0]


def test_unknown_scheme_exit_one(capsys, geneva_cfg):
    code, _, err = run_cli(
        capsys, "sensitivity", "--config", geneva_cfg, "--scheme", "magic"
    )
    assert code == 1
    assert "magic" in err


def test_csv_headers_are_stable(capsys, geneva_cfg):
    code, out, _ = run_cli(
        capsys, "sensitivity", "--config", geneva_cfg, "--format", "csv"
    )
    header = out.splitlines()[0]
    assert header == "label,scheme,eta,sigma_c_gm,dominant_noise,target_gm,meets_target"
