"""Pipeline configuration: flat key = value files, strictly parsed.

Unknown keys are errors so every report's config digest means what it says.
Format: one `key = value` per line, `#` comments, blank lines ignored.
Budgets use dotted keys (`budget.roberta = 514`). A fully annotated example
lives at example-config.cfg in the repository root.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, Optional, Tuple

from .rouge import VARIANTS

DEFAULT_BUDGETS = {"pegasus": 1024, "bart": 1024, "led": 1024, "roberta": 514}


class ConfigError(Exception):
    """Raised for unknown keys, bad values, or malformed config lines."""


@dataclass(frozen=True)
class PipelineConfig:
    stopword_path: Optional[str] = None
    stemming: bool = False
    evidence_cap: int = 6
    budgets: Dict[str, int] = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    embed_file: Optional[str] = None
    embed_dim: int = 64
    embed_seed: int = 0
    extractive_k: int = 2
    rouge_variants: Tuple[str, ...] = VARIANTS

    def __post_init__(self) -> None:
        for name, value in (
            ("evidence_cap", self.evidence_cap),
            ("embed_dim", self.embed_dim),
            ("extractive_k", self.extractive_k),
        ):
            if value < 1:
                raise ConfigError(f"{name} must be positive, got {value}")
        for model, budget in self.budgets.items():
            if budget < 1:
                raise ConfigError(f"budget.{model} must be positive, got {budget}")
        unknown = set(self.rouge_variants) - set(VARIANTS)
        if unknown:
            raise ConfigError(f"unknown rouge variants {sorted(unknown)}")


def _parse_bool(key: str, value: str) -> bool:
    if value.lower() in ("true", "1", "yes"):
        return True
    if value.lower() in ("false", "0", "no"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {value!r}")


def _parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {value!r}") from None


def load_config(path: str | Path) -> PipelineConfig:
    """Parse a config file; any unrecognized key is an error."""
    kwargs: dict = {}
    budgets = dict(DEFAULT_BUDGETS)
    with Path(path).open(encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key.startswith("budget."):
                budgets[key[len("budget."):]] = _parse_int(key, value)
            elif key == "stopword_path":
                kwargs["stopword_path"] = value
            elif key == "stemming":
                kwargs["stemming"] = _parse_bool(key, value)
            elif key == "evidence_cap":
                kwargs["evidence_cap"] = _parse_int(key, value)
            elif key == "embed_file":
                kwargs["embed_file"] = value
            elif key == "embed_dim":
                kwargs["embed_dim"] = _parse_int(key, value)
            elif key == "embed_seed":
                kwargs["embed_seed"] = _parse_int(key, value)
            elif key == "extractive_k":
                kwargs["extractive_k"] = _parse_int(key, value)
            elif key == "rouge_variants":
                kwargs["rouge_variants"] = tuple(
                    v.strip() for v in value.split(",") if v.strip()
                )
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return PipelineConfig(budgets=budgets, **kwargs)


def config_digest(config: PipelineConfig, provider_descriptor: str) -> str:
    """Deterministic identity of everything that affects report numbers."""
    payload = {
        "stopword_path": config.stopword_path,
        "stemming": config.stemming,
        "evidence_cap": config.evidence_cap,
        "budgets": dict(sorted(config.budgets.items())),
        "extractive_k": config.extractive_k,
        "rouge_variants": list(config.rouge_variants),
        "provider": provider_descriptor,
    }
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()
