"""CLI contract: exit codes, report schema, config precedence, cache store."""

import dataclasses
import json
from fractions import Fraction
from pathlib import Path

import pytest
from click.testing import CliRunner

from loopcft import cache as cache_store
from loopcft.cli import main
from loopcft.operators import OperatorTable
from loopcft.reports import RunConfig, parse_rational
from loopcft.symbolic import CoeffPoly


@pytest.fixture()
def runner():
    return CliRunner()


def _report(result):
    return json.loads(result.output)


# ---------------------------------------------------------------------------
# configuration parsing
# ---------------------------------------------------------------------------


def test_parse_rational_accepts_exact_forms():
    assert parse_rational("8/3") == Fraction(8, 3)
    assert parse_rational("3") == Fraction(3)
    assert parse_rational(Fraction(1, 2)) == Fraction(1, 2)


def test_parse_rational_rejects_floats_and_garbage():
    with pytest.raises(ValueError):
        parse_rational(0.5)
    with pytest.raises(ValueError):
        parse_rational("not-a-number")
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"max_mod": 2}))
    with pytest.raises(ValueError, match="unknown config key"):
        RunConfig.from_sources(path)


def test_config_lambda_alias_and_caps(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"lambda": "5/16", "level": 2}))
    cfg = RunConfig.from_sources(path)
    assert cfg.weight == Fraction(5, 16)
    assert cfg.level == 2
    with pytest.raises(ValueError):
        RunConfig(level=-1)
    with pytest.raises(ValueError):
        RunConfig(loewner_dt=0.0)


def test_params_echo_uses_rational_strings():
    params = RunConfig(kappa=Fraction(8, 3), weight=Fraction(0)).params()
    assert params["kappa"] == "8/3"
    assert params["lambda"] == "0/1"
    assert "weight" not in params


# ---------------------------------------------------------------------------
# exit codes and the three documented invocations
# ---------------------------------------------------------------------------


def test_kac_prints_determinant_and_roots(runner):
    result = runner.invoke(main, ["kac", "--level", "2", "--kappa", "3/1"])
    assert result.exit_code == 0
    report = _report(result)
    assert report["overall"] == "pass"
    roots = next(
        c for c in report["checks"] if c["name"].startswith("degenerate roots")
    )
    assert "roots: 0, 1/16, 1/2" in roots["witness"]
    assert "lambda^3" in roots["witness"]


def test_reflection_at_origin_prints_unity(runner):
    result = runner.invoke(main, ["reflection", "--kappa", "8/3", "--lambda", "0"])
    assert result.exit_code == 0
    report = _report(result)
    spot = next(c for c in report["checks"] if c["name"] == "requested evaluation")
    assert "= 1.0" in spot["witness"]


def test_reflection_at_pole_exits_one(runner):
    result = runner.invoke(main, ["reflection", "--kappa", "3/1", "--lambda", "5/16"])
    assert result.exit_code == 1
    report = _report(result)
    assert report["overall"] == "fail"
    spot = next(c for c in report["checks"] if c["name"] == "requested evaluation")
    assert spot["status"] == "fail"
    assert "Pole" in spot["witness"]


def test_unknown_command_is_usage_error(runner):
    result = runner.invoke(main, ["no-such-thing"])
    assert result.exit_code == 2


def test_bad_rational_is_usage_error(runner):
    result = runner.invoke(main, ["kac", "--kappa", "zero"])
    assert result.exit_code == 2


def test_out_of_range_kappa_is_usage_error(runner):
    result = runner.invoke(main, ["reflection", "--kappa", "5/1"])
    assert result.exit_code == 2


def test_missing_config_file_is_usage_error(runner):
    result = runner.invoke(main, ["--config", "/no/such/file.json", "kac"])
    assert result.exit_code == 2


# ---------------------------------------------------------------------------
# report schema and determinism
# ---------------------------------------------------------------------------


def test_report_schema_fields(runner):
    result = runner.invoke(main, ["singular", "--level", "2", "--kappa", "3/1"])
    report = _report(result)
    assert set(report) == {"schema_version", "suite", "params", "checks", "overall"}
    assert report["schema_version"] == "1"
    assert report["suite"] == "singular"
    assert report["params"]["kappa"] == "3/1"
    for check in report["checks"]:
        assert set(check) == {"name", "status", "witness", "timing"}
        assert check["status"] in {"pass", "fail"}


def test_overall_fails_iff_any_check_fails(runner):
    good = _report(runner.invoke(main, ["reflection", "--kappa", "2/1"]))
    assert good["overall"] == "pass"
    assert all(c["status"] == "pass" for c in good["checks"])
    bad = _report(
        runner.invoke(main, ["reflection", "--kappa", "2/1", "--lambda", "3/8"])
    )
    statuses = {c["status"] for c in bad["checks"]}
    assert statuses == {"pass", "fail"}
    assert bad["overall"] == "fail"


def _strip_timing(report):
    for check in report["checks"]:
        check["timing"] = 0.0
    return report


def test_reports_deterministic_up_to_timing(runner):
    args = [
        "report-all",
        "--level", "1",
        "--max-mode", "1",
        "--seeds", "60",
        "--seed", "11",
    ]
    first = _strip_timing(_report(runner.invoke(main, args)))
    second = _strip_timing(_report(runner.invoke(main, args)))
    assert first == second


def test_commutator_report_lists_every_pair(runner):
    result = runner.invoke(
        main, ["verify-commutators", "--max-mode", "2", "--max-degree", "3"]
    )
    assert result.exit_code == 0
    report = _report(result)
    names = [c["name"] for c in report["checks"]]
    for n in range(-2, 3):
        for m in range(n + 1, 3):
            assert f"bracket L({n}) L({m})" in names
        for m in range(-2, 3):
            assert f"bracket L({n}) Lbar({m})" in names


def test_output_flag_writes_file(runner, tmp_path):
    target = tmp_path / "report.json"
    result = runner.invoke(
        main, ["kac", "--level", "2", "--kappa", "3/1", "--output", str(target)]
    )
    assert result.exit_code == 0
    report = json.loads(target.read_text())
    assert report["suite"] == "kac"


def test_config_file_feeds_flags_and_flags_win(runner, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"kappa": "8/3", "level": 2}))
    result = runner.invoke(main, ["--config", str(cfg), "kac", "--kappa", "3/1"])
    assert result.exit_code == 0
    report = _report(result)
    assert report["params"]["kappa"] == "3/1"  # flag beats file
    assert report["params"]["level"] == 2  # file beats default


# ---------------------------------------------------------------------------
# cache store
# ---------------------------------------------------------------------------


def test_cache_round_trip_is_exact(tmp_path):
    table, info = cache_store.warm(tmp_path, max_mode=2, max_index=5)
    assert Path(info["path"]).exists()
    loaded = cache_store.load_operator_table(tmp_path, 5)
    assert loaded is not None
    for n in range(-2, 3):
        for bar in (False, True):
            got = loaded.mode_operator(n, bar)
            want = table.mode_operator(n, bar)
            assert got.e_coeff == want.e_coeff
            assert got.id_coeff == want.id_coeff
            assert got.d_a == want.d_a
            assert got.d_abar == want.d_abar


def test_cache_missing_and_wrong_window(tmp_path):
    assert cache_store.load_operator_table(tmp_path, 4) is None
    cache_store.warm(tmp_path, max_mode=1, max_index=4)
    assert cache_store.load_operator_table(tmp_path, 9) is None


def test_cache_stale_version_is_ignored(tmp_path):
    _, info = cache_store.warm(tmp_path, max_mode=1, max_index=4)
    path = Path(info["path"])
    raw = bytearray(path.read_bytes())
    raw[4] = 99  # version byte
    path.write_bytes(bytes(raw))
    assert cache_store.load_operator_table(tmp_path, 4) is None


def test_cache_corruption_is_detected_and_rebuilt(tmp_path, caplog):
    _, info = cache_store.warm(tmp_path, max_mode=1, max_index=4)
    path = Path(info["path"])
    raw = bytearray(path.read_bytes())
    raw[-1] ^= 0xFF
    path.write_bytes(bytes(raw))
    with caplog.at_level("WARNING", logger="loopcft.cache"):
        assert cache_store.load_operator_table(tmp_path, 4) is None
    assert any("checksum" in r.message for r in caplog.records)
    # warming again replaces the damaged file with a good one
    cache_store.warm(tmp_path, max_mode=1, max_index=4)
    assert cache_store.load_operator_table(tmp_path, 4) is not None


def test_cache_rewarm_checks_shared_coefficients(tmp_path):
    cache_store.warm(tmp_path, max_mode=2, max_index=4)
    _, info = cache_store.warm(tmp_path, max_mode=2, max_index=8)
    assert "operators_m4.lcfc" in info["checked_against"]


def test_cache_rewarm_rejects_tampered_history(tmp_path):
    table, _ = cache_store.warm(tmp_path, max_mode=1, max_index=4)
    bad = OperatorTable(max_index=4)
    for (n, bar), op in table._cache.items():
        if n == -1 and not bar:
            op = dataclasses.replace(op, e_coeff=op.e_coeff + CoeffPoly.one())
        bad.insert(op)
    cache_store.save_operator_table(bad, tmp_path)
    with pytest.raises(cache_store.CacheConsistencyError):
        cache_store.warm(tmp_path, max_mode=1, max_index=6)


def test_cache_cli_lifecycle(runner, tmp_path):
    env = {"LOOPCFT_CACHE_DIR": str(tmp_path)}
    result = runner.invoke(
        main, ["cache", "warm", "--max-mode", "1", "--max-index", "4"], env=env
    )
    assert result.exit_code == 0
    assert "operators_m4.lcfc" in _report(result)["checks"][0]["witness"]

    result = runner.invoke(main, ["cache", "stat"], env=env)
    assert result.exit_code == 0
    entries = json.loads(_report(result)["checks"][0]["witness"])
    assert entries and entries[0]["max_index"] == 4
    assert entries[0]["modes"] == [-1, 0, 1]

    result = runner.invoke(main, ["cache", "clear"], env=env)
    assert result.exit_code == 0
    assert "removed 1 files" in _report(result)["checks"][0]["witness"]
    assert list(tmp_path.glob("*.lcfc")) == []


def test_cache_dir_flag_beats_environment(runner, tmp_path):
    flag_dir = tmp_path / "flagged"
    env_dir = tmp_path / "environment"
    env = {"LOOPCFT_CACHE_DIR": str(env_dir)}
    result = runner.invoke(
        main,
        ["cache", "warm", "--max-mode", "1", "--max-index", "4",
         "--cache-dir", str(flag_dir)],
        env=env,
    )
    assert result.exit_code == 0
    assert list(flag_dir.glob("*.lcfc"))
    assert not env_dir.exists()
