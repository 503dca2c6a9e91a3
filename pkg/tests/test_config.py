from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
import pytest

from rosen_mediant.config import DEFAULT_CONFIG, ConfigLoader, RunConfig, deep_merge, parse_grid


def test_defaults_without_project_files(tmp_path: Path) -> None:
    config = ConfigLoader(tmp_path).load()
    assert config == DEFAULT_CONFIG
    assert config is not DEFAULT_CONFIG
    config["context"]["k"] = 12
    assert DEFAULT_CONFIG["context"]["k"] == 8


def test_json_files_and_inline_overrides(tmp_path: Path) -> None:
    (tmp_path / "rosen-mediant.config.json").write_text(
        json.dumps({"context": {"k": 9}, "stats": {"seeds": [7]}}), encoding="utf-8"
    )
    (tmp_path / ".rosen-mediant.json").write_text(json.dumps({"context": {"precision_bits": 512}}), encoding="utf-8")

    config = ConfigLoader(tmp_path).load({"stats": {"workers": 3}})

    assert config["context"] == {"k": 9, "precision_bits": 512}
    assert config["stats"]["seeds"] == [7]
    assert config["stats"]["workers"] == 3
    assert config["stats"]["grid"] == DEFAULT_CONFIG["stats"]["grid"]


def test_pyproject_table(tmp_path: Path) -> None:
    (tmp_path / "pyproject.toml").write_text(
        '[project]\nname = "demo"\n\n[tool.rosen_mediant.context]\nk = 5\n', encoding="utf-8"
    )
    assert ConfigLoader(tmp_path).load()["context"]["k"] == 5


def test_malformed_files_are_skipped(tmp_path: Path, caplog) -> None:
    (tmp_path / "rosen-mediant.config.json").write_text("{not json", encoding="utf-8")
    (tmp_path / "pyproject.toml").write_text("[tool\n", encoding="utf-8")
    with caplog.at_level(logging.WARNING, logger="rosen_mediant.config"):
        config = ConfigLoader(tmp_path).load()
    assert config == DEFAULT_CONFIG
    assert "malformed config" in caplog.text
    assert "unreadable" in caplog.text


def test_deep_merge_replaces_leaves_and_adds_keys() -> None:
    base = {"a": {"b": 1, "c": [1, 2]}, "d": 1}
    deep_merge(base, {"a": {"c": [3]}, "e": {"f": 2}, "d": {"g": 1}})
    assert base == {"a": {"b": 1, "c": [3]}, "d": {"g": 1}, "e": {"f": 2}}


def test_deep_merge_copies_merged_leaves() -> None:
    override = {"stats": {"seeds": [1, 2, 3]}, "audit": {"depth": 12}}
    base = {"stats": {"seeds": [42], "workers": 1}}
    deep_merge(base, override)
    override["stats"]["seeds"].append(4)
    override["audit"]["depth"] = 99
    assert base == {"stats": {"seeds": [1, 2, 3], "workers": 1}, "audit": {"depth": 12}}


def test_parse_grid() -> None:
    grid = parse_grid("0.1:1.0:10")
    assert len(grid) == 10
    assert grid[0] == pytest.approx(0.1)
    assert grid[-1] == pytest.approx(1.0)
    assert np.all(np.diff(grid) > 0)


@pytest.mark.parametrize("text", ["0.1:1.0", "a:b:c", "0:1:10", "1:0.5:10", "0.1:1:1", "-1:1:5"])
def test_parse_grid_rejects(text: str) -> None:
    with pytest.raises(ValueError):
        parse_grid(text)


def test_run_config_from_defaults() -> None:
    run = RunConfig.from_mapping(DEFAULT_CONFIG)
    assert run.k == 8
    assert run.precision_bits == 256
    assert run.n_iter == 1_000_000
    assert run.output_format == "json"
    assert run.output_path is None
    assert len(run.grid) == 120


def test_run_config_overrides(tmp_path: Path) -> None:
    run = RunConfig.from_mapping(
        DEFAULT_CONFIG, k=5, seed=None, output_format="csv", output_path=str(tmp_path / "out.csv")
    )
    assert run.k == 5
    assert run.seed == 42
    assert run.output_format == "csv"
    assert isinstance(run.output_path, Path)


def test_run_config_section_is_a_copy() -> None:
    run = RunConfig.from_mapping(DEFAULT_CONFIG)
    section = run.section("audit")
    section["depth"] = 1
    assert run.section("audit")["depth"] == DEFAULT_CONFIG["audit"]["depth"]
    assert run.section("missing") == {}


@pytest.mark.parametrize(
    "overrides",
    [
        {"k": 3},
        {"precision_bits": 64},
        {"n_iter": 0},
        {"output_format": "yaml"},
        {"grid_spec": "1:0:3"},
    ],
)
def test_run_config_validation(overrides) -> None:
    with pytest.raises(ValueError):
        RunConfig.from_mapping(DEFAULT_CONFIG, **overrides)
