import csv
import io
import json
import subprocess
import sys

import pytest

from recoherence.cli import OUTPUT_DIR_ENV, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_landscape_default(capsys):
    code, out, _ = run(capsys, "landscape")
    assert code == 0
    table = rows(out)
    assert len(table) == 101
    mid = table[50]
    assert (float(mid["b"]), float(mid["p_with"]), float(mid["p_without"])) == (0.5, 0.75, 0.5)


def test_landscape_single_point(capsys):
    code, out, _ = run(capsys, "landscape", "--b-min", "0.5", "--b-max", "0.5")
    assert code == 0
    assert rows(out) == [{"b": "0.5", "p_without": "0.5", "p_with": "0.75"}]


def test_visibility_scan_endpoint(capsys):
    code, out, _ = run(capsys, "visibility-scan", "--x-max", "74")
    assert code == 0
    last = rows(out)[-1]
    assert float(last["x_lambda0"]) == 74.0
    assert float(last["v_without"]) == pytest.approx(0.0129, abs=5e-4)
    assert float(last["v_with"]) == pytest.approx(0.5064, abs=5e-4)


def test_visibility_scan_mc_is_reproducible(capsys):
    argv = ["visibility-scan", "--x-max", "20", "--x-step", "10", "--mc", "--seed", "7"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv, "--workers", "3")
    assert first == second
    assert "mc_p" in first.splitlines()[0]


def test_fidelity_scan_default(capsys):
    code, out, _ = run(capsys, "fidelity-scan")
    assert code == 0
    table = rows(out)
    assert float(table[-1]["x_lambda0"]) == 148.0
    assert float(table[-1]["p_with"]) == pytest.approx(0.750, abs=1e-3)
    assert [r["segment"] for r in table if float(r["x_lambda0"]) == 74.0] == ["pre", "post"]


def test_fidelity_scan_short(capsys):
    code, out, _ = run(capsys, "fidelity-scan", "--l1", "37", "--x-max", "74")
    assert code == 0
    assert float(rows(out)[-1]["p_with"]) == pytest.approx(0.7532118652099378, abs=1e-9)


def test_fidelity_inset_reports_period(capsys):
    code, out, _ = run(capsys, "fidelity-scan", "--inset", "--format", "structured")
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["period_lambda0"] == pytest.approx(1.0, abs=1e-6)
    assert len(doc["rows"]) == 201


def test_tilt_scan(capsys):
    code, out, _ = run(capsys, "tilt-scan", "--span", "0")
    assert code == 0
    assert len(rows(out)) == 1


def test_tilt_span_too_wide(capsys):
    code, _, err = run(capsys, "tilt-scan", "--span", "3")
    assert code == 2
    assert "span" in err


def test_montecarlo(capsys):
    code, out, _ = run(capsys, "montecarlo", "--x1", "37", "--x2", "37", "--seed", "1")
    assert code == 0
    (r,) = rows(out)
    assert float(r["p_closed"]) == pytest.approx(0.7532118652099378, abs=1e-11)
    assert float(r["p_quadrature"]) == pytest.approx(float(r["p_closed"]), abs=1e-9)
    assert abs(float(r["z_score"])) < 5


def test_montecarlo_without_measurement(capsys):
    code, out, _ = run(capsys, "montecarlo", "--x1", "74", "--x2", "0", "--no-measurement")
    assert code == 0
    (r,) = rows(out)
    assert float(r["p_closed"]) == pytest.approx(0.5064237304198806, abs=1e-11)
    assert float(r["p_quadrature"]) == pytest.approx(float(r["p_closed"]), abs=1e-9)


@pytest.mark.parametrize(
    "argv",
    [
        ["visibility-scan", "--sigma-hz", "0"],
        ["landscape", "--b-min", "1.5"],
        ["landscape", "--b-min", "0.8", "--b-max", "0.2"],
        ["montecarlo", "--pair-rate", "-1"],
        ["nonsense"],
        [],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_validate_quick(capsys):
    code, out, _ = run(capsys, "validate", "--quick")
    assert code == 0
    assert all(r["status"] == "pass" for r in rows(out))


def test_validate_angular_sigma_fails(capsys):
    code, out, _ = run(capsys, "validate", "--quick", "--sigma-angular")
    assert code == 1
    assert any(r["status"] == "FAIL" for r in rows(out))


def test_manifest_replay(tmp_path, capsys):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    argv = ["visibility-scan", "--x-max", "30", "--x-step", "10", "--mc", "--seed", "5"]
    assert run(capsys, *argv, "--out", str(first))[0] == 0
    manifest = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert manifest["command"] == "visibility-scan"
    assert manifest["seed"] == 5
    assert manifest["parameters"]["mc"] is True
    man_path = str(tmp_path / "a.csv.manifest.json")
    assert run(capsys, "visibility-scan", "--config", man_path, "--out", str(second))[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_manifest_for_other_command_rejected(tmp_path, capsys):
    out = tmp_path / "l.csv"
    run(capsys, "landscape", "--out", str(out))
    assert run(capsys, "visibility-scan", "--config", str(tmp_path / "l.csv.manifest.json"))[0] == 2


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    code, out, _ = run(capsys, "landscape", "--b-points", "3", "--format", "structured")
    assert code == 0 and out == ""
    doc = json.loads((tmp_path / "landscape.json").read_text())
    assert len(doc["rows"]) == 3
    assert (tmp_path / "landscape.json.manifest.json").exists()


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"b_points": 5, "b-max": 0.5}))
    _, out, _ = run(capsys, "landscape", "--config", str(cfg))
    assert [float(r["b"]) for r in rows(out)] == [0.0, 0.125, 0.25, 0.375, 0.5]
    _, out, _ = run(capsys, "landscape", "--config", str(cfg), "--b-points", "2")
    assert [float(r["b"]) for r in rows(out)] == [0.0, 0.5]


@pytest.mark.parametrize("payload", ['{"frobnicate": 1}', '{"b_points": "many"}', "not json", "[1, 2]"])
def test_bad_config(tmp_path, capsys, payload):
    cfg = tmp_path / "c.json"
    cfg.write_text(payload)
    assert run(capsys, "landscape", "--config", str(cfg))[0] == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "recoherence", "landscape", "--b-points", "2"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "b,p_without,p_with"
