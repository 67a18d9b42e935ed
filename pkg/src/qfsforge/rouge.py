"""From-scratch ROUGE metrics: ROUGE-1/2, ROUGE-L, ROUGE-SU4.

All variants report precision, recall, and F1 over pre-normalized token
lists (lowercased, edge punctuation stripped; stopwords kept and no
stemming unless the caller opts in upstream). ROUGE-L is summary-level
(one LCS over the full sequences). ROUGE-SU4 counts skip-bigrams with a
maximum gap of 4 plus unigrams, the latter realized by pairing a begin
marker with every token.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .textnorm import norms

VARIANTS = ("R1", "R2", "RL", "RSU4")

_BOS = "\x00bos"
_SU4_MAX_GAP = 4


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float
    variant: str


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def _score(overlap: int, cand_total: int, ref_total: int, variant: str) -> RougeScore:
    precision = overlap / cand_total if cand_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    return RougeScore(
        precision=precision, recall=recall, f1=_f1(precision, recall), variant=variant
    )


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _clipped_overlap(a: Counter, b: Counter) -> int:
    return sum((a & b).values())


def rouge_n(candidate: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram overlap, n in {1, 2}."""
    if n not in (1, 2):
        raise ValueError("n must be 1 or 2")
    variant = f"R{n}"
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    return _score(
        _clipped_overlap(cand, ref), sum(cand.values()), sum(ref.values()), variant
    )


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        curr = [0] * (len(b) + 1)
        ai = a[i - 1]
        for j in range(1, len(b) + 1):
            if ai == b[j - 1]:
                curr[j] = prev[j - 1] + 1
            else:
                curr[j] = max(prev[j], curr[j - 1])
        prev = curr
    return prev[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """Longest common subsequence over the full token sequences."""
    if not candidate or not reference:
        return _score(0, len(candidate), len(reference), "RL")
    lcs = _lcs_length(candidate, reference)
    return _score(lcs, len(candidate), len(reference), "RL")


def _skip_bigrams(tokens: Sequence[str]) -> Counter:
    pairs: Counter = Counter()
    m = len(tokens)
    for i in range(m):
        # gap-limited skip bigrams
        for j in range(i + 1, min(i + 1 + _SU4_MAX_GAP, m)):
            pairs[(tokens[i], tokens[j])] += 1
        # unigram contribution: begin marker pairs with every token
        pairs[(_BOS, tokens[i])] += 1
    return pairs


def rouge_su4(candidate: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """Skip-bigrams (max gap 4) plus unigrams, clipped overlap."""
    if not candidate or not reference:
        return _score(0, 0, 0, "RSU4")
    cand = _skip_bigrams(candidate)
    ref = _skip_bigrams(reference)
    return _score(
        _clipped_overlap(cand, ref), sum(cand.values()), sum(ref.values()), "RSU4"
    )


def score_pair(
    candidate: Sequence[str], reference: Sequence[str], variant: str
) -> RougeScore:
    if variant == "R1":
        return rouge_n(candidate, reference, 1)
    if variant == "R2":
        return rouge_n(candidate, reference, 2)
    if variant == "RL":
        return rouge_l(candidate, reference)
    if variant == "RSU4":
        return rouge_su4(candidate, reference)
    raise ValueError(f"unknown variant {variant!r}")


def corpus_rouge(
    pairs: Sequence[Tuple[str, str]],
    variants: Iterable[str] = VARIANTS,
    audit_path: Optional[str | Path] = None,
) -> Dict[str, RougeScore]:
    """Macro-averaged scores over (candidate text, reference text) pairs.

    Texts are tokenized/normalized here; stopwords are kept. When
    audit_path is given, per-pair scores go to a JSONL file for recomputing
    the means independently.
    """
    if not pairs:
        raise ValueError("corpus_rouge needs at least one pair")
    variants = [v for v in VARIANTS if v in set(variants)]
    if not variants:
        raise ValueError("no known variants requested")
    per_pair: List[Dict[str, RougeScore]] = []
    for cand_text, ref_text in pairs:
        cand = norms(cand_text)
        ref = norms(ref_text)
        per_pair.append({v: score_pair(cand, ref, v) for v in variants})
    if audit_path is not None:
        with Path(audit_path).open("w", encoding="utf-8", newline="\n") as f:
            for idx, scores in enumerate(per_pair):
                rec = {"pair_index": idx}
                for v, s in scores.items():
                    rec[v] = {"precision": s.precision, "recall": s.recall, "f1": s.f1}
                f.write(json.dumps(rec, ensure_ascii=False, sort_keys=True))
                f.write("\n")
    means: Dict[str, RougeScore] = {}
    n = len(per_pair)
    for v in variants:
        means[v] = RougeScore(
            precision=sum(s[v].precision for s in per_pair) / n,
            recall=sum(s[v].recall for s in per_pair) / n,
            f1=sum(s[v].f1 for s in per_pair) / n,
            variant=v,
        )
    return means


def scores_to_dict(scores: Dict[str, RougeScore]) -> dict:
    return {
        v: {"precision": s.precision, "recall": s.recall, "f1": s.f1}
        for v, s in scores.items()
    }
