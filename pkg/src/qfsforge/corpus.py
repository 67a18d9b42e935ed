"""Summarization corpus ingestion and persistence.

On-disk format is JSON Lines, one sample per line:

    {"sample_id": str, "cluster_id": str?, "document": str,
     "summary": str?, "original_query": str?}

Three corpus kinds constrain which optional fields must be present:
pair (document+summary), triad (query+document+summary), clustered
(cluster id + original query). A loaded Corpus is immutable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple


class CorpusError(Exception):
    """Raised for any malformed or invariant-violating corpus input."""


class CorpusKind(str, Enum):
    PAIR = "pair"
    TRIAD = "triad"
    CLUSTERED = "clustered"


_KNOWN_FIELDS = {"sample_id", "cluster_id", "document", "summary", "original_query"}


@dataclass(frozen=True)
class CorpusSample:
    sample_id: str
    document: str
    cluster_id: Optional[str] = None
    summary: Optional[str] = None
    original_query: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.document.strip():
            raise CorpusError(
                f"sample {self.sample_id!r}: document is empty after trimming"
            )


@dataclass(frozen=True)
class Corpus:
    samples: Tuple[CorpusSample, ...]
    kind: CorpusKind
    name: str = ""

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self):
        return iter(self.samples)


def _required_fields(kind: CorpusKind) -> Tuple[str, ...]:
    if kind is CorpusKind.PAIR:
        return ("summary",)
    if kind is CorpusKind.TRIAD:
        return ("summary", "original_query")
    return ("original_query",)


def _parse_sample(obj: dict, kind: CorpusKind, lineno: int) -> CorpusSample:
    if not isinstance(obj, dict):
        raise CorpusError(f"line {lineno}: expected a JSON object")
    unknown = set(obj) - _KNOWN_FIELDS
    if unknown:
        raise CorpusError(f"line {lineno}: unknown fields {sorted(unknown)}")
    for field in ("sample_id", "document"):
        if not isinstance(obj.get(field), str) or not obj[field]:
            raise CorpusError(f"line {lineno}: missing or non-string {field!r}")
    for field in _required_fields(kind):
        if not isinstance(obj.get(field), str):
            raise CorpusError(
                f"line {lineno}: kind {kind.value!r} requires field {field!r}"
            )
    for field in ("cluster_id", "summary", "original_query"):
        if field in obj and not isinstance(obj[field], str):
            raise CorpusError(f"line {lineno}: field {field!r} must be a string")
    try:
        return CorpusSample(
            sample_id=obj["sample_id"],
            document=obj["document"],
            cluster_id=obj.get("cluster_id"),
            summary=obj.get("summary"),
            original_query=obj.get("original_query"),
        )
    except CorpusError as exc:
        raise CorpusError(f"line {lineno}: {exc}") from None


def load_corpus(path: str | Path, kind: CorpusKind | str, name: str = "") -> Corpus:
    """Load a JSONL corpus, validating every sample.

    Raises CorpusError (with the offending line number) on malformed JSON,
    missing required fields, or duplicate sample_ids. Never returns a
    partially validated corpus.
    """
    kind = CorpusKind(kind)
    path = Path(path)
    samples: List[CorpusSample] = []
    seen_ids = set()
    with path.open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            sample = _parse_sample(obj, kind, lineno)
            if sample.sample_id in seen_ids:
                raise CorpusError(
                    f"line {lineno}: duplicate sample_id {sample.sample_id!r}"
                )
            seen_ids.add(sample.sample_id)
            samples.append(sample)
    return Corpus(samples=tuple(samples), kind=kind, name=name or path.stem)


def sample_to_dict(sample: CorpusSample) -> dict:
    obj = {"sample_id": sample.sample_id, "document": sample.document}
    if sample.cluster_id is not None:
        obj["cluster_id"] = sample.cluster_id
    if sample.summary is not None:
        obj["summary"] = sample.summary
    if sample.original_query is not None:
        obj["original_query"] = sample.original_query
    return obj


def write_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write JSONL such that load_corpus round-trips field-for-field."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for sample in corpus.samples:
            f.write(json.dumps(sample_to_dict(sample), ensure_ascii=False))
            f.write("\n")
