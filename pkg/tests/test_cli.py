import json
import subprocess
import sys

import pytest

from leocov.cli import load_preset, main, preset_names
from leocov.experiment import read_table


def test_presets_listed_and_parse(capsys):
    assert main(["presets"]) == 0
    names = capsys.readouterr().out.split()
    assert names == preset_names() and len(names) >= 10
    for n in names:
        spec = load_preset(n)
        assert spec.sweep is not None and spec.name == n


def test_coverage_json(capsys):
    assert main(["coverage"]) == 0
    out = json.loads(capsys.readouterr().out)
    a = out["analytic"]
    assert a["p_end_to_end"] == pytest.approx(a["p_s_gw"] * a["p_gw_u"])
    assert a["crossover_abs_distance_m"] > 0
    assert "monte_carlo" not in out


def test_coverage_with_mc(capsys, tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("thresholds: {gamma: -10 dB}\n")
    assert main(["coverage", str(cfg), "--mc", "--trials", "20000", "--seed", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    mc = out["monte_carlo"]
    assert mc["trials"] == 20000 and mc["seed"] == 4
    assert abs(mc["p_s_gw"] - out["analytic"]["p_s_gw"]) < 3 * mc["ci_halfwidth"]["p_s_gw"]


def test_sweep_writes_file(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--preset", "abs_distance_a500_n50", "--trials", "2000", "-o", str(out)]) == 0
    t = read_table(out)
    assert t.columns[0] == "abs_distance_km" and len(t.rows) == 20


def test_sweep_to_stdout(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("sweep: {variable: threshold, values: [0, 5]}\n")
    assert main(["sweep", str(cfg)]) == 0
    lines = capsys.readouterr().out.splitlines()
    body = [l for l in lines if not l.startswith("#")]
    assert body[0].startswith("threshold_dB,") and len(body) == 3


def test_dist(capsys):
    assert main(["dist", "--points", "11", "--d-max-km", "3000"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
    assert lines[0].startswith("d_km,") and len(lines) == 12
    assert lines[-1].startswith("3000.0,")


def test_validate_small_grid_report(capsys):
    code = main(["validate", "--trials", "20000", "--seed", "5"])
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("gamma_dB,altitude_km,count")
    assert len(out) == 1 + 27 * 3
    assert code in (0, 1) and (code == 0) == all(l.endswith("PASS") for l in out[1:])


@pytest.mark.parametrize("argv, code", [
    (["coverage", "/nonexistent/x.yaml"], 2),
    (["coverage", "--preset", "nope"], 2),
    (["sweep"], 2),  # default config has no sweep section
])
def test_config_errors_exit_2(argv, code, capsys):
    assert main(argv) == code
    assert capsys.readouterr().err.startswith("error:")


def test_bad_config_names_key(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("link: {rho_s: 15}\n")
    assert main(["coverage", str(cfg)]) == 2
    assert "link.rho_s" in capsys.readouterr().err


def test_unwritable_output_exits_1(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("sweep: {variable: threshold, values: [0]}\n")
    assert main(["sweep", str(cfg), "-o", str(tmp_path / "no" / "t.csv")]) == 1


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "leocov.cli", "presets"], capture_output=True, text=True)
    assert r.returncode == 0 and "threshold_a500_n50" in r.stdout


def test_empty_sweep_writes_header_only(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("sweep: {variable: threshold, values: []}\n")
    out = tmp_path / "t.csv"
    assert main(["sweep", str(cfg), "-o", str(out)]) == 0
    body = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert body == [",".join(read_table(out).columns)] and body[0].startswith("threshold_dB,")
