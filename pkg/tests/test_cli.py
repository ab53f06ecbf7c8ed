"""Cache round-trips, command plumbing, and exit codes."""

import json

import pytest

from thseries.cli import (CACHE_VERSION, EXIT_DATA_GAP, EXIT_PASS,
                          EXIT_UNCONVERGED, CoeffCache, RunConfig, cmd_compute,
                          cmd_verify, main)


def test_run_config_validation():
    cfg = RunConfig(c_max=100, n_max=4)
    assert cfg.fingerprint()["c_max"] == 100
    with pytest.raises(ValueError):
        RunConfig(threshold=0.6)
    with pytest.raises(ValueError):
        RunConfig(c_max=0)
    with pytest.raises(ValueError):
        RunConfig(fmt="xml")


def test_cache_round_trip(tmp_path):
    cache = CoeffCache()
    cache.add("2A", -3, 2, "test")
    cache.add("2A", 0, -8, "test")
    cache.add("2A", 4, 240, "test")
    path = str(tmp_path / "cache.txt")
    cache.write(path)
    text = (tmp_path / "cache.txt").read_text()
    assert text.startswith(f"# {CACHE_VERSION}\n")
    back = CoeffCache.read(path)
    assert back.coefficients("2A") == {-3: 2, 0: -8, 4: 240}
    assert back.exponents("2A") == [-3, 0, 4]


def test_cache_validation_rejects_bad_leading_entry(tmp_path):
    cache = CoeffCache()
    cache.add("2A", 0, -8, "test")
    path = str(tmp_path / "cache.txt")
    cache.write(path)
    with pytest.raises(ValueError):
        CoeffCache.read(path)


def test_cache_rejects_wrong_header(tmp_path):
    p = tmp_path / "cache.txt"
    p.write_text("# some-other-version\n2A -3 2 x\n")
    with pytest.raises(ValueError):
        CoeffCache.read(str(p))


def test_compute_small_class(tmp_path):
    cfg = RunConfig(c_max=1500, n_max=4, precision=96)
    path = str(tmp_path / "cache.txt")
    code, report, cache = cmd_compute(["4A"], cfg, path)
    assert code == EXIT_PASS
    assert not report["unconverged"]
    got = cache.coefficients("4A")
    assert got[-3] == 2
    assert got[0] == 8
    back = CoeffCache.read(path)
    assert back.coefficients("4A") == got


def test_compute_flags_unconverged():
    cfg = RunConfig(c_max=20, n_max=4, precision=96, threshold=0.0001)
    code, report, _ = cmd_compute(["2A"], cfg)
    assert code == EXIT_UNCONVERGED
    assert report["unconverged"][0]["label"] == "2A"


def test_verify_orthogonality_passes():
    code, report = cmd_verify("orthogonality", RunConfig())
    assert code == EXIT_PASS
    assert report["schur"]["failures"] == 0


def test_verify_reports_data_gap_for_empty_cache(tmp_path):
    p = tmp_path / "cache.txt"
    p.write_text(f"# {CACHE_VERSION}\n2A -3 2 x\n")
    code, report = cmd_verify("relations", RunConfig(), str(p))
    assert code == EXIT_DATA_GAP
    assert "1A" in report["missing_series"]


def test_main_json_output(tmp_path, capsys):
    code = main(["verify", "orthogonality"])
    out = capsys.readouterr().out
    assert code == EXIT_PASS
    payload = json.loads(out)
    assert payload["exit_code"] == EXIT_PASS


def test_main_csv_output(capsys):
    code = main(["--format", "csv", "verify", "orthogonality"])
    out = capsys.readouterr().out
    assert code == EXIT_PASS
    assert out.splitlines()[0].startswith("suite,")
