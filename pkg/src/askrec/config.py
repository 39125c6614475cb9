"""Engine and service configuration: one file, environment overrides."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, fields
from pathlib import Path

ENV_PREFIX = "ASKREC_"


@dataclass
class EngineConfig:
    """Tunables for one dialogue engine instance.

    ``entropy_mode`` switches the question-selection threshold between
    normalized entropy (default; comparable across cardinalities) and raw
    bits. ``question_policy`` 'fixed' replaces entropy-guided selection
    with schema-order questioning (ablation only).
    """

    tau_h: float = 0.3
    entropy_mode: str = "normalized"
    max_questions: int = 2
    strategy: str = "es"
    mmr_lambda: float = 0.85
    cr_lambda: float = 0.5
    align_tau: float = 0.6
    rank_k: int = 9
    grid_rows: int = 3
    grid_cols: int = 3
    confidence_tau: float = 0.51
    question_policy: str = "entropy"
    embedding_dim: int = 256


@dataclass
class ServiceConfig:
    """Service-level settings wrapping an EngineConfig."""

    catalog_csv: str = ""
    catalog_schema: str = ""
    port: int = 8000
    session_log_dir: str | None = None
    static_dir: str | None = None
    engine: EngineConfig = dataclasses.field(default_factory=EngineConfig)


def _coerce(value: str, target_type: type) -> object:
    if target_type is bool:
        return value.lower() in ("1", "true", "yes", "on")
    if target_type is int:
        return int(value)
    if target_type is float:
        return float(value)
    return value


def _apply_env(config, env: dict[str, str]) -> None:
    for f in fields(config):
        if dataclasses.is_dataclass(getattr(config, f.name)):
            _apply_env(getattr(config, f.name), env)
            continue
        key = ENV_PREFIX + f.name.upper()
        if key in env:
            base = f.type if isinstance(f.type, type) else type(getattr(config, f.name) or "")
            setattr(config, f.name, _coerce(env[key], base))


def load_engine_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> EngineConfig:
    config = EngineConfig()
    if path is not None:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        for key, value in data.items():
            if hasattr(config, key):
                setattr(config, key, value)
    _apply_env(config, os.environ if env is None else env)
    return config


def load_service_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> ServiceConfig:
    config = ServiceConfig()
    if path is not None:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        engine_data = data.pop("engine", {})
        for key, value in data.items():
            if hasattr(config, key):
                setattr(config, key, value)
        for key, value in engine_data.items():
            if hasattr(config.engine, key):
                setattr(config.engine, key, value)
    _apply_env(config, os.environ if env is None else env)
    return config
