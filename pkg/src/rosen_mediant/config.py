"""Configuration loader for rosen-mediant.

Settings cascade from built-in defaults through optional project files
(``rosen-mediant.config.json``, ``.rosen-mediant.json``, the
``[tool.rosen_mediant]`` table of ``pyproject.toml``) to inline overrides
coming from the command line.  Every source is optional.
"""

from __future__ import annotations

import json
import logging
import sys
from copy import deepcopy
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on older interpreters only
    import tomli as tomllib

logger = logging.getLogger(__name__)

OUTPUT_FORMATS = ("json", "csv", "text")
MIN_CONTEXT_PRECISION = 128

DEFAULT_CONFIG: Dict[str, Any] = {
    "context": {
        "k": 8,
        "precision_bits": 256,
    },
    "orbits": {
        "depth": 20,
        "boundary_margin_factor": 8,
        "max_precision_bits": 4096,
    },
    "domain": {
        "boundary_collar_bits": 40,
        "y_max_factor": 10,
    },
    "verify": {
        "samples": 100_000,
        "rectangles": 100,
        "dual_points": 1_000,
        "induced_points": 1_000,
        "orbits": 100,
        "orbit_length": 50,
        "theta_points": 100,
        "audit_precision_bits": 53,
        "witness_precision_bits": 512,
    },
    "stats": {
        "precision_bits": 53,
        "seed": 42,
        "n_iter": 1_000_000,
        "seeds": [1, 2, 3, 4, 5],
        "grid": "0.01:1.2:120",
        "workers": 1,
        "entropy_iter": 1_000_000,
        "borel_iter": 1_000_000,
    },
    "audit": {
        "word_length": 8,
        "depth": 40,
        "samples": 100,
        "threshold_offset": -0.01,
        "counterexample_offset": 0.05,
        "counterexample_samples": 2_000,
    },
    "output": {
        "format": "json",
        "digits": 30,
    },
}


class ConfigLoader:
    """Load and merge configuration data for a run."""

    def __init__(self, root: Path) -> None:
        self.root = root

    def load(self, inline: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        config = deepcopy(DEFAULT_CONFIG)

        for data in self._iter_config_files():
            deep_merge(config, data)

        if inline:
            deep_merge(config, inline)

        return config

    # ------------------------------------------------------------------
    # Configuration sources
    # ------------------------------------------------------------------
    def _iter_config_files(self) -> Iterable[Dict[str, Any]]:
        candidates = (
            self.root / "rosen-mediant.config.json",
            self.root / ".rosen-mediant.json",
        )
        for path in candidates:
            if path.is_file():
                try:
                    yield json.loads(path.read_text(encoding="utf-8"))
                except json.JSONDecodeError as exc:
                    logger.warning("[rosen-mediant] skipping malformed config %s: %s", path, exc)
                    continue

        pyproject = self.root / "pyproject.toml"
        if pyproject.is_file():
            try:
                data = tomllib.loads(pyproject.read_text(encoding="utf-8"))
            except tomllib.TOMLDecodeError as exc:
                logger.warning("[rosen-mediant] skipping unreadable %s: %s", pyproject, exc)
                return
            section = data.get("tool", {}).get("rosen_mediant")
            if isinstance(section, dict):
                yield section


def deep_merge(base: Dict[str, Any], override: Mapping[str, Any]) -> None:
    """Fold ``override`` into ``base``.

    Sections (``context``, ``stats``, ...) merge key by key; leaves such as seed
    lists or grid specs replace the default and are copied, so a loaded config
    never shares state with the mapping it came from.
    """

    for key, value in override.items():
        current = base.get(key)
        if isinstance(current, dict) and isinstance(value, Mapping):
            deep_merge(current, value)
        elif isinstance(value, (dict, list)):
            base[key] = deepcopy(value)
        else:
            base[key] = value


def parse_grid(spec: str) -> np.ndarray:
    """``lo:hi:steps`` -> ``steps`` evenly spaced thresholds from lo to hi."""

    try:
        lo_text, hi_text, steps_text = spec.split(":")
        lo, hi, steps = float(lo_text), float(hi_text), int(steps_text)
    except ValueError as exc:
        raise ValueError(f"grid must look like lo:hi:steps, got {spec!r}") from exc
    if not 0 < lo < hi or steps < 2:
        raise ValueError(f"grid needs 0 < lo < hi and at least 2 steps, got {spec!r}")
    return np.linspace(lo, hi, steps)


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one command invocation."""

    k: int
    precision_bits: int
    seed: int
    n_iter: int
    depth: int
    grid_spec: str
    output_format: str = "json"
    output_path: Optional[Path] = None
    digits: int = 30
    sections: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.k < 4:
            raise ValueError(f"k must be at least 4, got {self.k}")
        if self.precision_bits < MIN_CONTEXT_PRECISION:
            raise ValueError(f"precision must be at least {MIN_CONTEXT_PRECISION} bits")
        if self.n_iter < 1:
            raise ValueError("n_iter must be at least 1")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"format must be one of {', '.join(OUTPUT_FORMATS)}")
        parse_grid(self.grid_spec)

    @property
    def grid(self) -> np.ndarray:
        return parse_grid(self.grid_spec)

    def section(self, name: str) -> Dict[str, Any]:
        return dict(self.sections.get(name, {}))

    @classmethod
    def from_mapping(cls, config: Mapping[str, Any], **overrides: Any) -> "RunConfig":
        """Build from a merged config; ``None`` overrides fall back to the config."""

        context, stats = config.get("context", {}), config.get("stats", {})
        output, orbits = config.get("output", {}), config.get("orbits", {})
        values: Dict[str, Any] = {
            "k": context.get("k", 8),
            "precision_bits": context.get("precision_bits", 256),
            "seed": stats.get("seed", 42),
            "n_iter": stats.get("n_iter", 1),
            "depth": orbits.get("depth", 20),
            "grid_spec": stats.get("grid", "0.01:1.2:120"),
            "output_format": output.get("format", "json"),
            "digits": output.get("digits", 30),
        }
        for key, value in overrides.items():
            if value is not None:
                values[key] = value
        if values.get("output_path") is not None:
            values["output_path"] = Path(values["output_path"])
        return cls(sections=deepcopy(dict(config)), **values)
