"""Job specification and JSONL schema validation for bridge runs.

Two tasks share one spec shape:

  evidence_gen  train lines {"sample_id", "document", "evidence"}
                infer lines {"sample_id", "document"|"input"}
  summarize     train lines {"sample_id", "input"|"model_input"|"document",
                             "summary"}
                infer lines {"sample_id", "input"|"model_input"|"document"}
                (a "summary" field on an infer line is a hard error: the
                bridge must never see gold summaries at inference time)

Hyperparameter defaults are fixed; any override is recorded verbatim in the
job manifest.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple


class BridgeError(Exception):
    """Schema violations, missing checkpoints, and other structured failures."""


TASKS = ("evidence_gen", "summarize")

_INPUT_KEYS = ("input", "model_input", "document")


def default_hyperparams(task: str) -> Dict[str, float | int]:
    if task not in TASKS:
        raise BridgeError(f"unknown task {task!r}")
    return {
        "epochs": 3,
        "weight_decay": 0.01,
        "learning_rate": 5e-5,
        "adam_beta1": 0.9,
        "adam_beta2": 0.999,
        "adam_epsilon": 1e-8,
        "train_batch": 8,
        "eval_batch": 32,
        "warmup_steps": 5000 if task == "evidence_gen" else 1000,
        "eval_every": 500 if task == "evidence_gen" else 250,
    }


@dataclass(frozen=True)
class BridgeJobSpec:
    task: str
    model_name: str = "tiny-transformer"
    train_path: Optional[str] = None
    eval_path: Optional[str] = None
    infer_in_path: Optional[str] = None
    infer_out_path: Optional[str] = None
    checkpoint_dir: str = "checkpoint"
    hyperparams: Dict[str, float | int] = field(default_factory=dict)
    max_source_len: int = 128
    max_target_len: int = 16
    seed: int = 0

    def __post_init__(self) -> None:
        if self.task not in TASKS:
            raise BridgeError(f"unknown task {self.task!r}")
        defaults = default_hyperparams(self.task)
        unknown = set(self.hyperparams) - set(defaults)
        if unknown:
            raise BridgeError(f"unknown hyperparams {sorted(unknown)}")

    def resolved_hyperparams(self) -> Dict[str, float | int]:
        merged = default_hyperparams(self.task)
        merged.update(self.hyperparams)
        return merged

    def target_key(self) -> str:
        return "evidence" if self.task == "evidence_gen" else "summary"


def _input_text(obj: dict, lineno: int) -> str:
    for key in _INPUT_KEYS:
        if isinstance(obj.get(key), str):
            return obj[key]
    raise BridgeError(
        f"line {lineno}: no input text field (expected one of {_INPUT_KEYS})"
    )


def read_train_lines(path: str | Path, task: str) -> List[Tuple[str, str, str]]:
    """(sample_id, input text, target text) per line; strict schema."""
    target_key = "evidence" if task == "evidence_gen" else "summary"
    rows: List[Tuple[str, str, str]] = []
    with Path(path).open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BridgeError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if not isinstance(obj.get("sample_id"), str):
                raise BridgeError(f"line {lineno}: missing sample_id")
            if not isinstance(obj.get(target_key), str):
                raise BridgeError(f"line {lineno}: missing {target_key!r}")
            rows.append((obj["sample_id"], _input_text(obj, lineno), obj[target_key]))
    return rows


def read_infer_lines(path: str | Path, task: str) -> List[Tuple[str, str]]:
    """(sample_id, input text) per line, order preserved, ids unique.

    Gold targets are forbidden on inference inputs so the transfer protocol
    cannot leak them.
    """
    target_key = "evidence" if task == "evidence_gen" else "summary"
    rows: List[Tuple[str, str]] = []
    seen = set()
    with Path(path).open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise BridgeError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if target_key in obj:
                raise BridgeError(
                    f"line {lineno}: inference input carries a {target_key!r} field "
                    "(target leakage)"
                )
            if not isinstance(obj.get("sample_id"), str):
                raise BridgeError(f"line {lineno}: missing sample_id")
            sid = obj["sample_id"]
            if sid in seen:
                raise BridgeError(f"line {lineno}: duplicate sample_id {sid!r}")
            seen.add(sid)
            rows.append((sid, _input_text(obj, lineno)))
    return rows


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()
