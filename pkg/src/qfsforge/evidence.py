"""Evidence keyword extraction and query generation.

An evidence query is the ordered, capped list of content words a document
shares with its summary (set intersection over normalized, stopword-filtered
tokens, ordered by first occurrence in the document). For query-free
inference a tf-idf scorer over the document alone stands in for the neural
generation path, which lives in the separate bridge package.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .corpus import Corpus, CorpusError, CorpusKind
from .textnorm import content_norms

DEFAULT_CAP = 6


@dataclass(frozen=True)
class EvidenceQuery:
    keywords: Tuple[str, ...]
    source: str  # pair_oracle | document_only | bridge_generated
    sample_id: str = ""

    def as_text(self) -> str:
        return " ".join(self.keywords)


@dataclass(frozen=True)
class DocumentFrequencyTable:
    """Per-token document counts over a corpus."""
    counts: Dict[str, int]
    n_docs: int

    def idf(self, token: str) -> float:
        # smoothed idf; never zero, so tf always contributes
        return math.log((1 + self.n_docs) / (1 + self.counts.get(token, 0))) + 1.0


def build_df_table(
    documents: Iterable[str],
    stopwords: Optional[frozenset] = None,
    stemming: bool = False,
) -> DocumentFrequencyTable:
    counts: Counter = Counter()
    n_docs = 0
    for doc in documents:
        n_docs += 1
        counts.update(set(content_norms(doc, stopwords, stemming)))
    return DocumentFrequencyTable(counts=dict(counts), n_docs=n_docs)


def extract_evidence(
    document: str,
    summary: str,
    cap: int = DEFAULT_CAP,
    sample_id: str = "",
    stopwords: Optional[frozenset] = None,
    stemming: bool = False,
) -> EvidenceQuery:
    """Content words present in both document and summary.

    Deduplicated, ordered by first occurrence in the document, truncated to
    `cap`. An empty intersection yields a zero-keyword query; the caller
    decides what to do with it.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    doc_norms = content_norms(document, stopwords, stemming)
    summary_support = set(content_norms(summary, stopwords, stemming))
    keywords: List[str] = []
    seen = set()
    for norm in doc_norms:
        if norm in summary_support and norm not in seen:
            seen.add(norm)
            keywords.append(norm)
            if len(keywords) == cap:
                break
    return EvidenceQuery(
        keywords=tuple(keywords), source="pair_oracle", sample_id=sample_id
    )


def generate_query_document_only(
    document: str,
    cap: int = DEFAULT_CAP,
    df_table: Optional[DocumentFrequencyTable] = None,
    sample_id: str = "",
    stopwords: Optional[frozenset] = None,
    stemming: bool = False,
) -> EvidenceQuery:
    """tf-idf keyword query from the document alone.

    Selection scores each distinct content token by tf * idf; ties go to the
    earlier first occurrence, then lexicographic order. The selected tokens
    are emitted in document order.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    doc_norms = content_norms(document, stopwords, stemming)
    tf = Counter(doc_norms)
    first_pos = {}
    for pos, norm in enumerate(doc_norms):
        first_pos.setdefault(norm, pos)
    if df_table is None:
        df_table = DocumentFrequencyTable(counts={}, n_docs=1)
    ranked = sorted(
        tf,
        key=lambda t: (-(tf[t] * df_table.idf(t)), first_pos[t], t),
    )
    selected = set(ranked[:cap])
    keywords = []
    for norm in doc_norms:
        if norm in selected:
            selected.remove(norm)
            keywords.append(norm)
    return EvidenceQuery(
        keywords=tuple(keywords), source="document_only", sample_id=sample_id
    )


def export_training_pairs(
    corpus: Corpus,
    cap: int = DEFAULT_CAP,
    stopwords: Optional[frozenset] = None,
    stemming: bool = False,
) -> Tuple[List[dict], int]:
    """(document, evidence) training records for the neural bridge.

    Samples whose evidence is empty are skipped; returns (records, skipped).
    Record schema: {"sample_id": str, "document": str, "evidence": str}.
    """
    if corpus.kind is not CorpusKind.PAIR:
        raise CorpusError(
            f"export_training_pairs needs a pair corpus, got {corpus.kind.value!r}"
        )
    records: List[dict] = []
    skipped = 0
    for sample in corpus:
        query = extract_evidence(
            sample.document,
            sample.summary or "",
            cap=cap,
            sample_id=sample.sample_id,
            stopwords=stopwords,
            stemming=stemming,
        )
        if not query.keywords:
            skipped += 1
            continue
        records.append(
            {
                "sample_id": sample.sample_id,
                "document": sample.document,
                "evidence": query.as_text(),
            }
        )
    return records, skipped


def query_to_dict(query: EvidenceQuery) -> dict:
    return {
        "sample_id": query.sample_id,
        "keywords": list(query.keywords),
        "source": query.source,
    }


def write_queries(queries: Sequence[EvidenceQuery], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as f:
        for q in queries:
            f.write(json.dumps(query_to_dict(q), ensure_ascii=False))
            f.write("\n")


def load_queries(path: str | Path) -> Dict[str, EvidenceQuery]:
    """Query JSONL keyed by sample_id."""
    out: Dict[str, EvidenceQuery] = {}
    with Path(path).open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            for key in ("sample_id", "keywords"):
                if key not in obj:
                    raise CorpusError(f"line {lineno}: missing {key!r}")
            sid = obj["sample_id"]
            if sid in out:
                raise CorpusError(f"line {lineno}: duplicate sample_id {sid!r}")
            out[sid] = EvidenceQuery(
                keywords=tuple(obj["keywords"]),
                source=obj.get("source", "bridge_generated"),
                sample_id=sid,
            )
    return out
