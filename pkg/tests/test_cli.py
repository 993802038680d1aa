import json

import pytest

from threebm.cli import EXIT_FAIL, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, run


def _load(path):
    return json.loads(path.read_text())


def test_unknown_flag_is_usage_error(capsys):
    assert run(["kernel", "constants", "--bogus"]) == EXIT_USAGE
    assert "usage" in capsys.readouterr().err


def test_missing_point_is_usage_error(tmp_path):
    assert run(["dist", "eval", "--out", str(tmp_path)]) == EXIT_USAGE


def test_help_exits_zero(capsys):
    assert run(["--help"]) == EXIT_OK


def test_kernel_constants(tmp_path):
    assert run(["kernel", "constants", "--out", str(tmp_path)]) == EXIT_OK
    out = _load(tmp_path / "kernel-constants.json")
    assert out["W1"] == pytest.approx(out["W1_closed"], rel=1e-9)
    man = _load(tmp_path / "kernel-constants.manifest.json")
    assert man["pass"] and man["versions"]["numpy"] and man["seed"] == 0


def test_non_converged_quadrature_exit_code(tmp_path):
    assert run(["kernel", "constants", "--nodes", "8", "--angular", "4", "--out", str(tmp_path)]) == EXIT_NUMERIC


def test_algebra_check_small(tmp_path):
    assert run(["algebra", "check", "--n-gap", "50", "--degrees", "2", "--out", str(tmp_path)]) == EXIT_OK
    names = [c["name"] for c in _load(tmp_path / "algebra-check.json")["checks"]]
    assert "bracket table" in names


def test_radial_check_small(tmp_path):
    assert run(["radial", "check", "--pairs", "20", "--points", "100", "--out", str(tmp_path)]) == EXIT_OK


def test_manifest_replay_is_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["sim", "run", "--paths", "3000", "--dt", "0.01", "--seed", "4", "--out", str(a)]) == EXIT_OK
    assert run(["sim", "run", "--config", str(a / "sim-run.manifest.json"), "--out", str(b)]) == EXIT_OK
    ma, mb = _load(a / "sim-run.json")["moments"], _load(b / "sim-run.json")["moments"]
    assert ma == mb


def test_full_precision_round_trip(tmp_path):
    assert run(["dist", "eval", "--point", "0.1", "0.2", "0.3", "0.4", "0.5", "0.6", "--out", str(tmp_path)]) == 0
    out = _load(tmp_path / "dist-eval.json")
    from threebm.geodesy import cc_distance
    assert out["d"] == cc_distance([0.1, 0.2, 0.3, 0.4, 0.5, 0.6]).d


def test_dist_scan_csv(tmp_path):
    import csv
    assert run(["dist", "scan", "--n", "3", "--out", str(tmp_path)]) == EXIT_OK
    with open(tmp_path / "dist-scan.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3 and all(float(r["lower"]) <= float(r["d"]) <= float(r["upper"]) for r in rows)


def test_verify_reverse_poincare(tmp_path):
    assert run(["verify", "rpoincare", "--paths", "20000", "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "verify-rpoincare.csv").exists()


def test_failing_comparison_exit_code(tmp_path):
    # an impossible tolerance makes the comparison fail rather than crash
    code = run(["sim", "compare-kernel", "--paths", "20000", "--dt", "0.01", "--points", "2",
                "--max-rel", "0", "--out", str(tmp_path)])
    assert code == EXIT_FAIL
