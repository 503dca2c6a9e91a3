from __future__ import annotations

import json
from pathlib import Path

import pytest

from rosen_mediant.cli import main as cli_main


def _run(capsys, tmp_path: Path, *argv: str) -> tuple[int, dict]:
    exit_code = cli_main([*argv, "--root", str(tmp_path)])
    captured = capsys.readouterr()
    return exit_code, json.loads(captured.out)


def test_context_json(tmp_path: Path, capsys) -> None:
    exit_code, payload = _run(capsys, tmp_path, "context", "--k", "8")
    assert exit_code == 0
    assert payload["k"] == 8
    assert payload["min_poly"] == [2, 0, -4, 0, 1]
    assert payload["constants"]["mediant_lenstra"].startswith("0.847759065")


def test_context_reads_project_config(tmp_path: Path, capsys) -> None:
    (tmp_path / "rosen-mediant.config.json").write_text(json.dumps({"context": {"k": 5}}), encoding="utf-8")
    _, payload = _run(capsys, tmp_path, "context")
    assert payload["k"] == 5
    assert payload["parity"]["kind"] == "odd"


def test_expand_decimal(tmp_path: Path, capsys) -> None:
    exit_code, payload = _run(capsys, tmp_path, "expand", "--k", "8", "--x", "0.3", "--depth", "6")
    assert exit_code == 0
    assert payload["depth"] == 6
    assert payload["digits"]["length"] == 6
    assert payload["symbols"]["length"] == 6
    assert len(payload["theta"]["theta"]) == 6
    assert payload["mediants"]
    assert len(payload["convergents"]) == 7


def test_expand_exact_literal(tmp_path: Path, capsys) -> None:
    exit_code, payload = _run(capsys, tmp_path, "expand", "--k", "8", "--x", "(1-l)/2", "--depth", "4")
    assert exit_code == 0
    assert payload["x"] == "(1-l)/2"
    assert payload["digits"]["digits"].startswith("(-1:")
    assert payload["convergents"][0]["n"] == 0


def test_expand_terminal_point(tmp_path: Path, capsys) -> None:
    _, payload = _run(capsys, tmp_path, "expand", "--k", "5", "--x", "0/1")
    assert payload["digits"]["terminated"]
    assert payload["theta"] is None
    assert "notice" in payload


def test_expand_text_format(tmp_path: Path, capsys) -> None:
    assert cli_main(["expand", "--k", "8", "--x", "0.3", "--depth", "3", "--format", "text", "--root", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("digits  : (+1:")
    assert "symbols :" in out


def test_expand_outside_interval_reports_error(tmp_path: Path, capsys) -> None:
    exit_code, payload = _run(capsys, tmp_path, "expand", "--k", "8", "--x", "1.5")
    assert exit_code == 1
    assert payload["error"].startswith("OutOfIntervalError")
    assert payload["kind"] == "OutOfIntervalError"
    assert payload["schema_version"] == 1


def test_domain_with_images_and_dual(tmp_path: Path, capsys) -> None:
    exit_code, payload = _run(capsys, tmp_path, "domain", "--k", "8", "--images", "--dual")
    assert exit_code == 0
    assert set(payload) >= {"omega0", "omega_star", "measure_omega0", "images", "dual_partition"}
    assert len(payload["dual_partition"]) == 4
    assert payload["images"]


def test_domain_csv_to_file(tmp_path: Path, capsys) -> None:
    out = tmp_path / "fibers.csv"
    exit_code = cli_main(["domain", "--k", "4", "--format", "csv", "--out", str(out), "--root", str(tmp_path)])
    assert exit_code == 0
    assert capsys.readouterr().out == ""
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("domain,fiber")
    # k = 4: two fibers in Omega0, three in OmegaStar
    assert len(lines) == 1 + 2 + 3


def test_verify_single_check(tmp_path: Path, capsys) -> None:
    config = tmp_path / "small.json"
    config.write_text(json.dumps({"verify": {"induced_points": 20}, "orbits": {"depth": 8}}), encoding="utf-8")
    exit_code, payload = _run(
        capsys, tmp_path, "verify", "--k", "9", "--check", "factorization", "--check", "witness", "--config", str(config)
    )
    assert exit_code == 0
    assert payload["passed"]
    assert [c["name"] for c in payload["checks"]] == ["factorization", "witness"]


def test_witness_command(tmp_path: Path, capsys) -> None:
    exit_code, payload = _run(capsys, tmp_path, "witness", "--k", "8", "--n-iter", "2000")
    assert exit_code == 0
    assert float(payload["orbit"]["min_theta"]) == 0.5
    assert payload["hits"]["tail_hits"] == 0


def test_stats_skips_breakpoint_on_short_runs(tmp_path: Path, capsys) -> None:
    exit_code, payload = _run(
        capsys, tmp_path, "stats", "--k", "8", "--n-iter", "2000", "--seeds", "1", "2", "--grid", "0.1:1.0:5"
    )
    assert exit_code == 0
    assert payload["counting"]["N"] == 4000
    assert len(payload["counting"]["rows"]) == 5
    assert "skipped" in payload["breakpoint"]


def test_legendre_audit_command(tmp_path: Path, capsys) -> None:
    exit_code, payload = _run(
        capsys, tmp_path, "legendre-audit", "--k", "8", "--samples", "3", "--word-length", "5"
    )
    assert exit_code == 0
    assert payload["violation_count"] == 0
    assert payload["threshold"] == pytest.approx(payload["mediant_lenstra"] - 0.01)
    assert payload["rationals"] > 0


def test_small_index_is_rejected_by_parser(tmp_path: Path) -> None:
    with pytest.raises(SystemExit) as info:
        cli_main(["context", "--k", "3", "--root", str(tmp_path)])
    assert info.value.code == 2


def test_missing_config_file(tmp_path: Path, capsys) -> None:
    exit_code, payload = _run(capsys, tmp_path, "context", "--config", str(tmp_path / "missing.json"))
    assert exit_code == 1
    assert "Config file not found" in payload["error"]
    assert payload["kind"] == "ValueError"


def test_invalid_grid_goes_to_stderr_in_text_mode(tmp_path: Path, capsys) -> None:
    exit_code = cli_main(["stats", "--grid", "1:0:3", "--format", "text", "--root", str(tmp_path)])
    assert exit_code == 1
    err = capsys.readouterr().err
    assert err.startswith("rosen-mediant: error:")
    assert "grid" in err
