"""Sentence ranking against an evidence query and model-input assembly.

Sentences are ranked by cosine similarity between the mean vector of the
query keywords and the mean vector of each sentence's content words, sorted
descending with ties broken by original position. Model inputs concatenate
ranked sentences under a word-level token budget; the downstream model (or
bridge) re-truncates with its own subword tokenizer.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .embed import EmbeddingProvider, cosine_similarity, embed_text
from .evidence import EvidenceQuery
from .textnorm import content_norms, split_sentences, tokenize

QUERY_SEPARATOR = "</q>"


@dataclass(frozen=True)
class RankedSentence:
    text: str
    orig_index: int
    similarity: float


@dataclass(frozen=True)
class RankedDocument:
    sample_id: str
    entries: Tuple[RankedSentence, ...]

    def budget_view(self, budget: int) -> Tuple[RankedSentence, ...]:
        """Longest prefix of entries whose cumulative word count fits `budget`."""
        if budget < 1:
            raise ValueError("budget must be >= 1")
        out: List[RankedSentence] = []
        used = 0
        for entry in self.entries:
            cost = len(tokenize(entry.text))
            if used + cost > budget:
                break
            out.append(entry)
            used += cost
        return tuple(out)


def _query_keywords(query: EvidenceQuery | Sequence[str]) -> Tuple[str, ...]:
    if isinstance(query, EvidenceQuery):
        return query.keywords
    return tuple(query)


def rank_sentences(
    document: str,
    query: EvidenceQuery | Sequence[str],
    provider: EmbeddingProvider,
    sample_id: str = "",
    stopwords: Optional[frozenset] = None,
    stemming: bool = False,
) -> RankedDocument:
    """Split, embed, score, and stably sort the document's sentences.

    An empty (or zero-vector) query gives every sentence similarity 0.0,
    which leaves the original order intact.
    """
    sentences = split_sentences(document)
    query_vec = embed_text(provider, _query_keywords(query))
    entries: List[RankedSentence] = []
    for sent in sentences:
        sent_norms = content_norms(sent.text, stopwords, stemming)
        sim = cosine_similarity(query_vec, embed_text(provider, sent_norms))
        entries.append(
            RankedSentence(text=sent.text, orig_index=sent.index, similarity=sim)
        )
    entries.sort(key=lambda e: (-e.similarity, e.orig_index))
    return RankedDocument(sample_id=sample_id, entries=tuple(entries))


def build_model_input(
    ranked: RankedDocument,
    query: EvidenceQuery | Sequence[str],
    budget: int,
    query_prefix: bool = False,
) -> str:
    """Ranked-sentence concatenation under a word-token budget.

    With query_prefix, the keywords and a literal separator are prepended
    (they do not count against the budget). If even the top sentence
    overflows the budget, its first `budget` words are emitted so output is
    never empty for a non-empty document.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    kept = ranked.budget_view(budget)
    if kept:
        body = " ".join(e.text for e in kept)
    elif ranked.entries:
        words = ranked.entries[0].text.split()
        body = " ".join(words[:budget])
    else:
        body = ""
    keywords = _query_keywords(query)
    if query_prefix:
        prefix = " ".join(keywords) + f" {QUERY_SEPARATOR} " if keywords else f"{QUERY_SEPARATOR} "
        return prefix + body
    return body


def extractive_summary(ranked: RankedDocument, k: int) -> str:
    """Top-k ranked sentences, restored to document order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    top = sorted(ranked.entries[:k], key=lambda e: e.orig_index)
    return " ".join(e.text for e in top)


def ranked_to_dict(ranked: RankedDocument, query: EvidenceQuery | Sequence[str]) -> dict:
    return {
        "sample_id": ranked.sample_id,
        "query": list(_query_keywords(query)),
        "ranked_sentences": [
            {"text": e.text, "orig_index": e.orig_index, "sim": e.similarity}
            for e in ranked.entries
        ],
    }


def write_ranked(records: Sequence[dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False))
            f.write("\n")
