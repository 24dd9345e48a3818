import csv
import io
import json
import math
import subprocess
import sys

import pytest

from catlab import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_table_defaults_reproduce_headline_values(capsys):
    code, out, _ = run(["table"], capsys)
    assert code == 0
    rows = {r["criterion"]: r for r in rows_of(out)}
    assert float(rows["klyshko"]["tau_star"]) == pytest.approx(0.0019, rel=0.10)
    assert float(rows["vogel1"]["tau_star"]) == pytest.approx(0.0023, rel=0.05)
    assert float(rows["wigner_neg"]["tau_star"]) == pytest.approx(0.5 * math.log1p(1 / 200), abs=1e-12)
    assert float(rows["depth"]["tau_star"]) == pytest.approx(0.5 * math.log1p(1 / 100), abs=1e-12)
    assert rows["fringe"]["tau_star"] == "inf"
    assert "# tool: \"catlab" in out


def test_output_is_byte_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["table", "--out", str(a)]) == 0
    assert cli.main(["table", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_zero_temperature_table(capsys):
    code, out, _ = run(["table", "--nbar", "0"], capsys)
    assert code == 0
    assert all(r["tau_star"] == "inf" for r in rows_of(out))
    assert "# note:" in out


def test_vacuum_table_reports_zero(capsys):
    _, out, _ = run(["table", "--alpha", "0"], capsys)
    rows = {r["criterion"]: r for r in rows_of(out)}
    assert float(rows["klyshko"]["tau_star"]) == 0.0
    assert float(rows["vogel1"]["tau_star"]) == 0.0


def test_json_infinity_is_null_with_flag(capsys):
    _, out, _ = run(["table", "--format", "json"], capsys)
    data = json.loads(out)
    idx = data["columns"]["criterion"].index("fringe")
    assert data["columns"]["tau_star"][idx] is None
    assert data["columns"]["tau_star_is_inf"][idx] is True
    assert data["meta"]["config"]["alpha"] == [2.0]


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"alpha": 3.0, "nbar": 10.0}))
    _, out, _ = run(["table", "--config", str(cfg), "--nbar", "100"], capsys)
    assert '"alpha": [3.0]' in out and '"nbar": [100.0]' in out


def test_bad_config_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    code, _, err = run(["table", "--config", str(cfg)], capsys)
    assert code == cli.EXIT_USAGE and "unknown config keys" in err
    code, _, _ = run(["table", "--nbar", "-1"], capsys)
    assert code == cli.EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        cli.main(["table", "--format", "xml"])
    assert info.value.code == cli.EXIT_USAGE


def test_sweep_keeps_order_with_workers(capsys):
    args = ["sweep", "--criterion", "depth", "--range", "1,2,5"]
    _, serial, _ = run(args + ["--jobs", "1"], capsys)
    _, parallel, _ = run(args + ["--jobs", "3"], capsys)
    assert serial == parallel
    rows = rows_of(serial)
    assert [float(r["alpha"]) for r in rows] == [1.0, 2.0, 5.0]
    taus = [float(r["tau_star"]) for r in rows]
    assert max(taus) - min(taus) < 1e-6


def test_sweep_env_fallback(monkeypatch):
    monkeypatch.setenv("CATLAB_JOBS", "2")
    assert cli.RunConfig().resolved_jobs() == 2
    assert cli.RunConfig(jobs=5).resolved_jobs() == 5


def test_sweep_vogel_over_alpha(capsys):
    _, out, _ = run(["sweep", "--criterion", "vogel1", "--range", "1:10:4", "--jobs", "1"], capsys)
    taus = [float(r["tau_star"]) for r in rows_of(out)]
    assert taus == sorted(taus)


def test_sweep_needs_range(capsys):
    code, _, err = run(["sweep"], capsys)
    assert code == cli.EXIT_USAGE and "--range" in err


def test_contour_ends_at_vogel_time(capsys):
    _, out, _ = run(["contour", "--points", "40"], capsys)
    rows = rows_of(out)
    tau_v = float(next(l for l in out.splitlines() if l.startswith("# tau_v")).split(":")[1])
    assert tau_v == pytest.approx(0.0023, rel=0.05)
    taus = [float(r["tau"]) for r in rows]
    assert max(taus) <= tau_v
    assert {r["branch"] for r in rows} == {"0", "1"}


def test_contour_empty_for_vacuum(capsys):
    _, out, _ = run(["contour", "--alpha", "0", "--points", "5"], capsys)
    assert rows_of(out) == []


def test_klyshko_crossings_decrease_with_temperature(capsys):
    _, out, _ = run(["klyshko", "--nbar", "1,10,100", "--tau-max", "0.3", "--points", "301"], capsys)
    line = next(l for l in out.splitlines() if l.startswith("# crossings"))
    cross = json.loads(line.split(":", 1)[1])
    last = [cross[k][-1][1] for k in ("1", "10", "100")]
    assert last[0] > last[1] > last[2]
    rows = rows_of(out)
    assert float(rows[0]["B1"]) < 0


def test_oracle_check_passes(capsys):
    code, out, _ = run(["oracle-check", "--nbar", "1", "--taus", "0,0.1,0.5"], capsys)
    assert code == 0
    assert all(r["passed"] == "true" for r in rows_of(out))
    code, out, _ = run(["oracle-check", "--alpha", "0", "--taus", "0,0.01"], capsys)
    assert code == 0


def test_oracle_check_infeasible_cutoff(capsys):
    code, _, err = run(["oracle-check", "--taus", "2"], capsys)
    assert code == cli.EXIT_USAGE and "cutoff" in err


def test_oracle_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(cli, "ORACLE_TOL", 0.0)
    code, _, _ = run(["oracle-check", "--nbar", "1", "--taus", "0.1"], capsys)
    assert code == cli.EXIT_ORACLE_FAIL


def test_nonconvergence_exit_code(monkeypatch, capsys):
    from catlab.errors import ConvergenceError

    def boom(cfg):
        raise ConvergenceError("did not converge", 1.0)

    monkeypatch.setitem(cli.COMMANDS, "table", boom)
    code, _, _ = run(["table"], capsys)
    assert code == cli.EXIT_NONCONVERGENCE


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "catlab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "catlab" in proc.stdout


def test_table_marks_unconverged_row(capsys):
    code, out, err = run(["table", "--alpha", "6"], capsys)
    assert code == cli.EXIT_NONCONVERGENCE
    rows = {r["criterion"]: r for r in rows_of(out)}
    assert rows["klyshko"]["tau_star"] == "nan" and "resolvable" in rows["klyshko"]["reason"]
    assert float(rows["vogel1"]["tau_star"]) > 0
    assert "did not converge" in err
