import json
import math

import pytest

from osclab.cli import PRESETS, _parse_omegas, main


def run(argv):
    return main(argv)


def test_crit_prints_headline(capsys):
    assert run(["crit", "--A", "1.3", "--B", "0.9", "--omega", "1.23"]) == 0
    out = capsys.readouterr().out
    assert "z_crit = 0.99" in out


def test_crit_summary(tmp_path):
    out = tmp_path / "crit"
    assert run(["crit", "--A", "1.3", "--B", "0.9", "--omega", "1.0",
                "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert math.isclose(summary["z_crit"], 0.6526254668644184, rel_tol=1e-13)
    assert math.isclose(summary["i0_crit"], 0.22715733333333332, rel_tol=1e-13)


def test_crit_rejects_bad_amplitudes(capsys):
    assert run(["crit", "--A", "0.5", "--B", "0.9", "--omega", "1.0"]) == 2


def test_simulate_preset(tmp_path):
    out = tmp_path / "sim"
    assert run(["simulate", "--preset", "fig1", "--tmax", "5", "--out", str(out)]) == 0
    rows = (out / "traj.csv").read_text().splitlines()
    assert rows[0] == "t,z,p"
    assert rows[1].startswith("0.0,0.1,")
    assert (out / "traj.svg").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "completed"
    assert summary["t_final"] == 5.0


def test_simulate_escaped_is_success(tmp_path):
    out = tmp_path / "esc"
    code = run(["simulate", "--preset", "fig4-unbounded", "--tmax", "60",
                "--out", str(out), "--no-svg"])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] == "escaped"


def test_simulate_requires_system(tmp_path):
    assert run(["simulate", "--out", str(tmp_path / "x")]) == 2


def test_simulate_rejects_both_preset_and_spec(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text('{"omega": 1.0, "m": 2, "g": {"kind": "trig", "A": 1.3, "B": 0.9, "C": 0.0}}')
    assert run(["simulate", "--preset", "fig1", "--spec", str(spec),
                "--out", str(tmp_path / "x")]) == 2


def test_simulate_spec_file(tmp_path):
    spec = tmp_path / "s.json"
    spec.write_text('{"omega": 1.0, "m": 2, "g": {"kind": "trig", "A": 1.3, "B": 0.9, "C": 0.0}}')
    out = tmp_path / "sim"
    assert run(["simulate", "--spec", str(spec), "--z0", "0.1", "--tmax", "3",
                "--out", str(out), "--no-svg"]) == 0


def test_simulate_unknown_preset(tmp_path):
    assert run(["simulate", "--preset", "fig9", "--out", str(tmp_path / "x")]) == 2


def test_simulate_bad_spec_json(tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text("{not json")
    assert run(["simulate", "--spec", str(spec), "--out", str(tmp_path / "x")]) == 2


def test_drift_outputs(tmp_path):
    out = tmp_path / "drift"
    assert run(["drift", "--preset", "fig1", "--tmax", "10", "--out", str(out)]) == 0
    rows = (out / "drift.csv").read_text().splitlines()
    assert rows[0] == "t,rel_drift"
    summary = json.loads((out / "summary.json").read_text())
    assert summary["mode"] == "relative"
    assert summary["max_rel_drift"] < 1e-9
    assert math.isclose(summary["i0"], 0.004204302988625225, rel_tol=1e-12)


def test_drift_is_byte_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    for out in (a, b):
        assert run(["drift", "--preset", "fig1", "--tmax", "10", "--out", str(out)]) == 0
    for name in ("drift.csv", "drift.svg", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_poincare_outputs(tmp_path):
    out = tmp_path / "poin"
    assert run(["poincare", "--preset", "fig2", "--points", "24", "--out", str(out)]) == 0
    strobe = (out / "strobe.csv").read_text().splitlines()
    assert strobe[0] == "z,p"
    assert len(strobe) == 25
    curve = (out / "curve.csv").read_text().splitlines()
    assert curve[0] == "z,p"
    assert len(curve) > 100
    summary = json.loads((out / "summary.json").read_text())
    assert summary["n_points"] == 24
    assert summary["residual_max"] < 1e-6
    assert (out / "section.svg").exists()


def test_stability_scan_small(tmp_path):
    out = tmp_path / "scan"
    assert run(["stability-scan", "--preset", "fig3", "--omegas", "1.0:1.0:0.2",
                "--dz0", "0.05", "--tmax", "120", "--out", str(out)]) == 0
    rows = (out / "scan.csv").read_text().splitlines()
    assert rows[0] == "omega,z_last_bounded,z_crit"
    assert len(rows) == 2
    summary = json.loads((out / "summary.json").read_text())
    assert summary["all_agree"] is True


def test_stability_scan_worker_count_invariance(tmp_path, monkeypatch):
    args = ["stability-scan", "--preset", "fig3", "--omegas", "1.0:1.0:0.2",
            "--dz0", "0.05", "--tmax", "120", "--no-svg"]
    a = tmp_path / "a"
    monkeypatch.setenv("OSC_LAB_THREADS", "1")
    assert run(args + ["--out", str(a)]) == 0
    b = tmp_path / "b"
    monkeypatch.setenv("OSC_LAB_THREADS", "2")
    assert run(args + ["--out", str(b)]) == 0
    assert (a / "scan.csv").read_bytes() == (b / "scan.csv").read_bytes()
    assert (a / "summary.json").read_bytes() == (b / "summary.json").read_bytes()


def test_parse_omegas():
    assert _parse_omegas("0.8:1.8:0.2") == pytest.approx(
        (0.8, 1.0, 1.2, 1.4, 1.6, 1.8))
    assert _parse_omegas("1.0:1.0:0.5") == (1.0,)


def test_parse_omegas_rejects_malformed():
    from osclab.errors import ConfigError

    for text in ("0.8:1.8", "a:b:c", "1.0:0.5:0.2", "1.0:2.0:0"):
        with pytest.raises(ConfigError):
            _parse_omegas(text)


def test_family_run(tmp_path):
    spec = tmp_path / "fp.json"
    spec.write_text('{"omega": 1.0, "C1": 0.05, "C2": 0.0, "alpha2": [2.2, 0.0, -3.6]}')
    out = tmp_path / "fam"
    assert run(["family", "--spec", str(spec), "--z0", "0.1", "--tmax", "20",
                "--out", str(out)]) == 0
    rows = (out / "traj.csv").read_text().splitlines()
    assert rows[0] == "t,z,p,alpha2,dalpha2,ddalpha2"
    summary = json.loads((out / "summary.json").read_text())
    assert summary["max_rel_drift"] < 1e-8


def _write_hill_csv(path, f, g, T, n=121):
    rows = ["t,f,g"]
    for k in range(n):
        t = T * k / (n - 1)
        rows.append(f"{t!r},{f(t)!r},{g(t)!r}")
    path.write_text("\n".join(rows) + "\n")


def test_reduce_run(tmp_path):
    hill = tmp_path / "hill.csv"
    T = 2 * math.pi
    _write_hill_csv(hill, lambda t: 0.3 + 0.05 * math.cos(t),
                    lambda t: 0.2 * (1.0 + 0.5 * math.sin(t)), T)
    out = tmp_path / "red"
    assert run(["reduce", "--hill", str(hill), "--T", repr(T), "--m", "2",
                "--n-grid", "401", "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert abs(summary["det"] - 1.0) < 1e-9
    assert 0.0 < summary["mu"] < 2 * math.pi
    assert summary["defect_w"] < 1e-7
    rows = (out / "envelope.csv").read_text().splitlines()
    assert rows[0] == "t,phi,w,wp"
    assert (out / "gnf.csv").read_text().splitlines()[0] == "s,g_nf"


def test_reduce_unstable_exits_3(tmp_path):
    hill = tmp_path / "hill.csv"
    T = 2 * math.pi
    # inside the first parametric resonance tongue
    _write_hill_csv(hill, lambda t: 0.25 * (1.0 + 0.1 * math.cos(t)),
                    lambda t: 0.2, T)
    out = tmp_path / "red"
    assert run(["reduce", "--hill", str(hill), "--T", repr(T), "--m", "2",
                "--out", str(out)]) == 3
    summary = json.loads((out / "summary.json").read_text())
    assert summary["error"] == "unstable_hill"


def test_reduce_rejects_nonperiodic_grid(tmp_path):
    hill = tmp_path / "hill.csv"
    T = 2 * math.pi
    _write_hill_csv(hill, lambda t: 0.3 + 0.01 * t, lambda t: 0.2, T)
    assert run(["reduce", "--hill", str(hill), "--T", repr(T), "--m", "2",
                "--out", str(tmp_path / "x")]) == 2


def test_reduce_rejects_wrong_header(tmp_path):
    hill = tmp_path / "hill.csv"
    hill.write_text("time,f,g\n0,1,1\n1,1,1\n2,1,1\n3,1,1\n")
    assert run(["reduce", "--hill", str(hill), "--T", "3", "--m", "2",
                "--out", str(tmp_path / "x")]) == 2


def test_presets_cover_documented_demos():
    assert set(PRESETS) == {"fig1", "sec3ref", "fig2", "fig3",
                            "fig4-bounded", "fig4-unbounded"}
    assert PRESETS["fig2"]["points"] == 190
    assert PRESETS["fig3"]["omegas"] == (0.8, 1.0, 1.2, 1.4, 1.6, 1.8)
