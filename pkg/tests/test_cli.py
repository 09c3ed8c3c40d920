import json
import subprocess
import sys

import pytest

from gravmode.cli import CSV_COLUMNS, main


def run_cli(*argv):
    return main(list(argv))


# ---------------------------------------------------------------------------
# point
# ---------------------------------------------------------------------------

def test_point_unit_values(capsys):
    code = run_cli("point", "--omega", "1", "--lc", "1")
    out, err = capsys.readouterr()
    assert code == 0
    assert "e00_over_hbar_omega" in out
    assert "0.21036004076434" in out
    assert "warning" in err and "first-order" in err


def test_point_weak_coupling_no_warning(capsys):
    code = run_cli("point", "--omega", "1e-6", "--lc", "1")
    out, err = capsys.readouterr()
    assert code == 0
    assert err == ""


def test_point_rejects_zero_omega(capsys):
    with pytest.raises(SystemExit) as exc:
        run_cli("point", "--omega", "0", "--lc", "1")
    assert exc.value.code == 1


def test_point_requires_both_coordinates():
    with pytest.raises(SystemExit) as exc:
        run_cli("point", "--omega", "1")
    assert exc.value.code == 1


def test_point_extreme_frequency_underflow_safe(capsys):
    code = run_cli("point", "--omega", "1e-33", "--lc", "1")
    out, _ = capsys.readouterr()
    assert code == 0
    row = {line.split("=")[0].strip(): line.split("=")[1].strip()
           for line in out.strip().splitlines()}
    assert float(row["log10_one_minus_fidelity"]) <= -120.0
    assert float(row["one_minus_fidelity"]) > 0.0


def test_point_json_format(capsys):
    code = run_cli("point", "--omega", "0.5", "--lc", "1", "--format", "json")
    out, _ = capsys.readouterr()
    assert code == 0
    data = json.loads(out)
    assert data["omega_over_planck"] == 0.5
    assert data["converged"] is True


# ---------------------------------------------------------------------------
# figure
# ---------------------------------------------------------------------------

def _read_rows(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [dict(zip(header, ln.split(","))) for ln in lines[1:]]


def test_figure_default_grid(tmp_path, capsys):
    out = tmp_path / "fig.csv"
    code = run_cli("figure", "--out", str(out))
    assert code == 0
    header, rows = _read_rows(out)
    assert header == CSV_COLUMNS
    assert len(rows) == 122
    assert all(r["converged"] == "true" for r in rows)
    # lc-major, omega-minor ordering
    assert rows[0]["lc_over_planck"] == "0.5"
    assert rows[61]["lc_over_planck"] == "1.0"
    omegas = [float(r["omega_over_planck"]) for r in rows[:61]]
    assert omegas == sorted(omegas)


def test_figure_rerun_byte_identical(tmp_path, capsys):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run_cli("figure", "--out", str(a), "--points", "9") == 0
    assert run_cli("figure", "--out", str(b), "--points", "9") == 0
    assert a.read_bytes() == b.read_bytes()


def test_figure_json_mirror(tmp_path, capsys):
    csv_path = tmp_path / "fig.csv"
    json_path = tmp_path / "fig.json"
    assert run_cli("figure", "--out", str(csv_path), "--points", "5") == 0
    assert run_cli("figure", "--out", str(json_path), "--points", "5",
                   "--format", "json") == 0
    header, csv_rows = _read_rows(csv_path)
    data = json.loads(json_path.read_text())
    assert [list(r) for r in data["rows"]] == [CSV_COLUMNS] * len(data["rows"])
    assert len(data["rows"]) == len(csv_rows) == 10
    for jr, cr in zip(data["rows"], csv_rows):
        assert repr(jr["one_minus_eta"]) == cr["one_minus_eta"]
        assert jr["converged"] is (cr["converged"] == "true")


def test_figure_monotone_columns(tmp_path, capsys):
    out = tmp_path / "fig.csv"
    assert run_cli("figure", "--out", str(out)) == 0
    _, rows = _read_rows(out)
    by_lc = {}
    for r in rows:
        by_lc.setdefault(r["lc_over_planck"], []).append(r)
    for series in by_lc.values():
        e = [float(r["one_minus_eta"]) for r in series]
        f = [float(r["one_minus_fidelity"]) for r in series]
        assert all(b > a for a, b in zip(e, e[1:]))
        assert all(b > a for a, b in zip(f, f[1:]))


def test_figure_nonconvergence_exits_2(tmp_path, capsys):
    out = tmp_path / "bad.csv"
    code = run_cli("figure", "--out", str(out), "--points", "2",
                   "--omega-min", "1e-3", "--omega-max", "1e-2",
                   "--tol", "1e-12")
    assert code == 2
    _, rows = _read_rows(out)
    assert any(r["converged"] == "false" for r in rows)


def test_figure_bad_grid_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run_cli("figure", "--omega-min", "1.0", "--omega-max", "0.1",
                "--out", str(tmp_path / "x.csv"))
    assert exc.value.code == 1


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text(
        "# sweep configuration\n"
        "omega_min = 1e-2\n"
        "omega_max = 1e-1\n"
        "points = 7\n"
        "lc_list = 1.0\n"
    )
    out = tmp_path / "cfg.csv"
    code = run_cli("figure", "--config", str(cfg), "--out", str(out),
                   "--points", "3")
    assert code == 0
    _, rows = _read_rows(out)
    assert len(rows) == 3                      # flag beats config
    assert rows[0]["omega_over_planck"] == "0.01"
    assert rows[-1]["omega_over_planck"] == "0.1"


def test_config_unknown_key_is_usage_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("omega_minn = 1e-2\n")
    with pytest.raises(SystemExit) as exc:
        run_cli("figure", "--config", str(cfg))
    assert exc.value.code == 1


# ---------------------------------------------------------------------------
# verify / selfcheck
# ---------------------------------------------------------------------------

def test_verify_default_grid_passes(capsys):
    code = run_cli("verify")
    out, _ = capsys.readouterr()
    assert code == 0
    lines = [ln for ln in out.splitlines() if "PASS" in ln or "FAIL" in ln]
    assert len(lines) == 3
    assert all("PASS" in ln for ln in lines)


def test_selfcheck_passes(capsys):
    code = run_cli("selfcheck")
    out, _ = capsys.readouterr()
    assert code == 0
    assert "FAIL" not in out
    assert out.count("PASS") >= 8


# ---------------------------------------------------------------------------
# installed entry point
# ---------------------------------------------------------------------------

def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "gravmode.cli", "point", "--omega", "1", "--lc", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "z_squared" in proc.stdout
