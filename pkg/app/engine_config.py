"""
Engine Configuration Manager.

Loads the tpq_config.yaml file holding cost-model thresholds, the
statistics provider used by cost-based dispatch, debug assertions and
benchmark defaults.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml
from dotenv import load_dotenv

from app.config import CONFIG_PATH
from app.errors import ConfigurationError

load_dotenv()
logger = logging.getLogger("tpq.config")

STATISTICS_PROVIDERS = ("exact", "heuristic")
DEBUG_ENV_VAR = "TPQ_DEBUG_ASSERTS"


@dataclass(frozen=True)
class EngineConfig:
    """Configuration for planning, execution and benchmarking."""

    # Cost-based dispatch thresholds
    selectivity_threshold: float = 0.001
    core_selectivity_threshold: float = 0.1
    statistics_provider: str = "exact"

    # Execution
    debug_asserts: bool = False

    # Benchmarking
    bench_workers: int = 4
    bench_repetitions: int = 1
    bench_engines: tuple[str, ...] = field(default=("bj", "hj", "cj"))
    seed: int = 7

    log_level: str = "WARNING"

    def __post_init__(self):
        """Validate value ranges."""
        for name in ("selectivity_threshold", "core_selectivity_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(
                    message=f"{name} must lie in [0, 1], got {value}",
                    suggestion="Fix the threshold in tpq_config.yaml",
                    details={name: value},
                )
        if self.statistics_provider not in STATISTICS_PROVIDERS:
            raise ConfigurationError(
                message=f"Unknown statistics provider: {self.statistics_provider}",
                suggestion=f"Use one of: {', '.join(STATISTICS_PROVIDERS)}",
            )
        if self.bench_workers < 1 or self.bench_repetitions < 1:
            raise ConfigurationError(
                message="bench_workers and bench_repetitions must be >= 1",
                suggestion="Fix the bench section in tpq_config.yaml",
            )

    def with_overrides(self, **overrides: Any) -> "EngineConfig":
        """Return a copy with the non-None overrides applied."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes) if changes else self


def _env_debug_asserts() -> bool:
    return os.getenv(DEBUG_ENV_VAR, "").strip().lower() in {"1", "true", "yes"}


def _load_yaml_config(config_path: Path) -> dict[str, Any]:
    """Load configuration from YAML file."""
    if not config_path.exists():
        logger.warning("Config file not found: %s, using defaults", config_path)
        return {}

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            config = yaml.safe_load(f)
            return config if isinstance(config, dict) else {}
    except yaml.YAMLError as e:
        logger.error("Failed to parse config file: %s", e)
        return {}
    except OSError as e:
        logger.error("Failed to load config file: %s", e)
        return {}


def load_config(config_path: Path | None = None) -> EngineConfig:
    """
    Load engine configuration from YAML file.

    Args:
        config_path: Path to config file. Defaults to tpq_config.yaml in project root.

    Returns:
        EngineConfig instance with loaded or default values.
    """
    path = config_path or CONFIG_PATH
    raw = _load_yaml_config(path)
    cost = raw.get("cost_model") or {}
    bench = raw.get("bench") or {}
    defaults = EngineConfig()

    return EngineConfig(
        selectivity_threshold=float(cost.get("selectivity_threshold", defaults.selectivity_threshold)),
        core_selectivity_threshold=float(
            cost.get("core_selectivity_threshold", defaults.core_selectivity_threshold)
        ),
        statistics_provider=cost.get("statistics_provider", defaults.statistics_provider),
        debug_asserts=bool(raw.get("debug_asserts", False)) or _env_debug_asserts(),
        bench_workers=int(bench.get("workers", defaults.bench_workers)),
        bench_repetitions=int(bench.get("repetitions", defaults.bench_repetitions)),
        bench_engines=tuple(bench.get("engines") or defaults.bench_engines),
        seed=int(bench.get("seed", defaults.seed)),
        log_level=str(raw.get("log_level", defaults.log_level)).upper(),
    )


# Singleton config instance
_config: EngineConfig | None = None


def get_config() -> EngineConfig:
    """Get the singleton engine configuration."""
    global _config
    if _config is None:
        _config = load_config()
    return _config


def reload_config(config_path: Path | None = None) -> EngineConfig:
    """Reload configuration from disk."""
    global _config
    _config = load_config(config_path)
    return _config
