"""Intrinsic and extrinsic evaluation over a corpus.

Intrinsic: mean cosine similarity between each sample's original query and
its evidence query, with a per-sample audit trail. Extrinsic: rank every
document against its query (original or evidence mode), summarize (built-in
extractive top-k or pre-generated summaries from a bridge file), and score
against gold summaries with the bundled ROUGE implementation. Reports are
serialized deterministically and carry a config digest so only like-for-like
runs get compared.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .config import PipelineConfig, config_digest
from .corpus import Corpus, CorpusError, CorpusKind
from .embed import EmbeddingProvider, cosine_similarity, embed_text
from .evidence import EvidenceQuery, extract_evidence
from .rank import extractive_summary, rank_sentences
from .rouge import RougeScore, corpus_rouge, scores_to_dict
from .textnorm import content_norms, load_stopwords


@dataclass(frozen=True)
class IntrinsicReport:
    corpus_name: str
    per_sample: Tuple[Tuple[str, float], ...]
    mean_similarity: float
    provider_descriptor: str
    skipped: int = 0


@dataclass(frozen=True)
class ExtrinsicReport:
    corpus_name: str
    query_mode: str
    rouge: Dict[str, RougeScore]
    config_digest: str


def intrinsic_similarity(
    corpus: Corpus,
    queries: Mapping[str, EvidenceQuery],
    provider: EmbeddingProvider,
    stopwords: Optional[frozenset] = None,
    stemming: bool = False,
) -> IntrinsicReport:
    """Per-sample cosine between original-query and evidence-query vectors.

    Samples without an original query or without an evidence query are
    excluded and counted in `skipped`.
    """
    per_sample: List[Tuple[str, float]] = []
    skipped = 0
    for sample in corpus:
        query = queries.get(sample.sample_id)
        if sample.original_query is None or query is None:
            skipped += 1
            continue
        original_vec = embed_text(
            provider, content_norms(sample.original_query, stopwords, stemming)
        )
        evidence_vec = embed_text(provider, query.keywords)
        per_sample.append(
            (sample.sample_id, cosine_similarity(original_vec, evidence_vec))
        )
    mean = sum(s for _, s in per_sample) / len(per_sample) if per_sample else 0.0
    return IntrinsicReport(
        corpus_name=corpus.name,
        per_sample=tuple(per_sample),
        mean_similarity=mean,
        provider_descriptor=provider.descriptor(),
        skipped=skipped,
    )


def load_bridge_summaries(path: str | Path) -> Dict[str, str]:
    """Bridge output JSONL: {"sample_id": str, "summary": str} per line."""
    out: Dict[str, str] = {}
    with Path(path).open(encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if "sample_id" not in obj or "summary" not in obj:
                raise CorpusError(f"line {lineno}: needs sample_id and summary")
            if obj["sample_id"] in out:
                raise CorpusError(
                    f"line {lineno}: duplicate sample_id {obj['sample_id']!r}"
                )
            out[obj["sample_id"]] = obj["summary"]
    return out


def _original_query_keywords(
    sample, stopwords: Optional[frozenset], stemming: bool
) -> Sequence[str]:
    return content_norms(sample.original_query or "", stopwords, stemming)


def _evidence_query_keywords(
    sample, cap: int, stopwords: Optional[frozenset], stemming: bool
) -> Sequence[str]:
    return extract_evidence(
        sample.document,
        sample.summary or "",
        cap=cap,
        sample_id=sample.sample_id,
        stopwords=stopwords,
        stemming=stemming,
    ).keywords


def run_extrinsic(
    corpus: Corpus,
    query_mode: str,
    provider: EmbeddingProvider,
    config: Optional[PipelineConfig] = None,
    bridge_summaries: Optional[Mapping[str, str]] = None,
    queries: Optional[Mapping[str, EvidenceQuery]] = None,
    audit_path: Optional[str | Path] = None,
) -> ExtrinsicReport:
    """Rank, summarize, and ROUGE-score a triad corpus.

    query_mode "original" reads only original_query; "evidence" reads only
    (document, summary) pairs or a precomputed `queries` map. Summaries come
    from the extractive top-k stand-in unless `bridge_summaries` covers the
    corpus, in which case those are scored instead.
    """
    if query_mode not in ("original", "evidence"):
        raise ValueError(f"unknown query_mode {query_mode!r}")
    if corpus.kind is not CorpusKind.TRIAD:
        raise CorpusError(f"extrinsic evaluation needs a triad corpus")
    config = config or PipelineConfig()
    stopwords = load_stopwords(config.stopword_path)

    if bridge_summaries is not None:
        missing = [s.sample_id for s in corpus if s.sample_id not in bridge_summaries]
        if missing:
            raise CorpusError(
                f"bridge summaries missing sample_ids: {missing}"
            )

    pairs: List[Tuple[str, str]] = []
    for sample in corpus:
        if queries is not None and sample.sample_id in queries:
            keywords: Sequence[str] = queries[sample.sample_id].keywords
        elif query_mode == "original":
            keywords = _original_query_keywords(sample, stopwords, config.stemming)
        else:
            keywords = _evidence_query_keywords(
                sample, config.evidence_cap, stopwords, config.stemming
            )
        if bridge_summaries is not None:
            candidate = bridge_summaries[sample.sample_id]
        else:
            ranked = rank_sentences(
                sample.document,
                keywords,
                provider,
                sample_id=sample.sample_id,
                stopwords=stopwords,
                stemming=config.stemming,
            )
            candidate = extractive_summary(ranked, config.extractive_k)
        pairs.append((candidate, sample.summary or ""))

    scores = corpus_rouge(pairs, config.rouge_variants, audit_path=audit_path)
    return ExtrinsicReport(
        corpus_name=corpus.name,
        query_mode=query_mode,
        rouge=scores,
        config_digest=config_digest(config, provider.descriptor()),
    )


def intrinsic_report_to_dict(report: IntrinsicReport) -> dict:
    return {
        "corpus_name": report.corpus_name,
        "mean_similarity": report.mean_similarity,
        "per_sample": [
            {"sample_id": sid, "similarity": sim} for sid, sim in report.per_sample
        ],
        "provider_descriptor": report.provider_descriptor,
        "skipped": report.skipped,
    }


def extrinsic_report_to_dict(report: ExtrinsicReport) -> dict:
    return {
        "corpus_name": report.corpus_name,
        "query_mode": report.query_mode,
        "rouge": scores_to_dict(report.rouge),
        "config_digest": report.config_digest,
    }


def write_report(report_dict: dict, path: str | Path) -> None:
    """Deterministic JSON serialization (sorted keys, LF, trailing newline)."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as f:
        json.dump(report_dict, f, ensure_ascii=False, sort_keys=True, indent=2)
        f.write("\n")
