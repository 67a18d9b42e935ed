"""Deterministic tokenization, normalization, stopword filtering, and
sentence splitting.

Everything here is a pure function of (input, flags): no models, no external
downloads. The bundled English stopword list (175 entries) can be overridden
by path; the optional light stemmer strips plural -s / -es / -ing with a
minimum stem length of 4 and is off by default.
"""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

_STOPWORDS_PATH = Path(__file__).parent / "data" / "stopwords.txt"

# Trailing "word." forms that do not end a sentence.
_ABBREVIATIONS = {
    "dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "jr.", "sr.", "vs.",
    "e.g.", "i.e.", "cf.", "fig.", "no.", "al.", "inc.", "ltd.", "co.",
    "dept.", "est.", "approx.", "jan.", "feb.", "mar.", "apr.", "jun.",
    "jul.", "aug.", "sep.", "sept.", "oct.", "nov.", "dec.", "u.s.",
    "u.k.", "a.m.", "p.m.",
}

_MIN_STEM_LEN = 4


@dataclass(frozen=True)
class Token:
    """One whitespace-delimited piece with its normalized form.

    char_span indexes the source string (character offsets, end-exclusive).
    """
    surface: str
    norm: str
    char_span: Tuple[int, int]


@dataclass(frozen=True)
class Sentence:
    text: str
    tokens: Tuple[Token, ...]
    index: int


@dataclass(frozen=True)
class SentenceList:
    sentences: Tuple[Sentence, ...]

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, i: int) -> Sentence:
        return self.sentences[i]


def _is_edge_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


def _strip_edge_punct(piece: str) -> str:
    start, end = 0, len(piece)
    while start < end and _is_edge_punct(piece[start]):
        start += 1
    while end > start and _is_edge_punct(piece[end - 1]):
        end -= 1
    return piece[start:end]


def normalize_token(piece: str) -> str:
    """Lowercase + strip leading/trailing punctuation.

    Internal hyphens and apostrophes survive ("non-small" stays one token).
    Returns "" when nothing alphanumeric remains.
    """
    return _strip_edge_punct(piece).lower()


def light_stem(norm: str) -> str:
    """Strip -ing / -es / plural -s when the stem keeps >= 4 characters."""
    for suffix in ("ing", "es", "s"):
        if norm.endswith(suffix) and not (suffix == "s" and norm.endswith("ss")):
            stem = norm[: -len(suffix)]
            if len(stem) >= _MIN_STEM_LEN:
                return stem
    return norm


def tokenize(text: str, stemming: bool = False) -> List[Token]:
    """Split on Unicode whitespace; drop pieces that normalize to nothing."""
    tokens: List[Token] = []
    i, n = 0, len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        piece = text[i:j]
        norm = normalize_token(piece)
        if stemming and norm:
            norm = light_stem(norm)
        if norm:
            tokens.append(Token(surface=piece, norm=norm, char_span=(i, j)))
        i = j
    return tokens


def norms(text: str, stemming: bool = False) -> List[str]:
    """Normalized forms only, in order."""
    return [t.norm for t in tokenize(text, stemming=stemming)]


@lru_cache(maxsize=8)
def _load_stopword_file(path: str) -> frozenset:
    words = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            word = line.strip().lower()
            if word:
                words.add(word)
    return frozenset(words)


def load_stopwords(path: Optional[str | Path] = None) -> frozenset:
    """Stopword set from `path`, or the bundled list when path is None."""
    return _load_stopword_file(str(path) if path else str(_STOPWORDS_PATH))


def filter_stopwords(
    tokens: Sequence[Token], stopwords: Optional[frozenset] = None
) -> List[Token]:
    """Drop tokens whose norm is a stopword; order preserved."""
    sw = stopwords if stopwords is not None else load_stopwords()
    return [t for t in tokens if t.norm not in sw]


def content_norms(
    text: str, stopwords: Optional[frozenset] = None, stemming: bool = False
) -> List[str]:
    """Normalized, stopword-filtered token forms of `text`, in order."""
    return [
        t.norm for t in filter_stopwords(tokenize(text, stemming=stemming), stopwords)
    ]


def _is_boundary(text: str, pos: int) -> bool:
    """True when the terminator run ending at `pos` closes a sentence."""
    # pos is the index of the last char of a [.?!]+ run
    j = pos + 1
    n = len(text)
    if j >= n:
        return True
    if not text[j].isspace():
        return False
    while j < n and text[j].isspace():
        j += 1
    if j >= n:
        return True
    if not (text[j].isupper() or text[j].isdigit()):
        return False
    if text[pos] == ".":
        # back up to the start of the word holding this period
        k = pos
        while k > 0 and not text[k - 1].isspace():
            k -= 1
        word = text[k : pos + 1].lower()
        if word in _ABBREVIATIONS:
            return False
    return True


def split_sentences(text: str, stemming: bool = False) -> SentenceList:
    """Rule-based sentence splitting on [.?!] + whitespace + uppercase/digit.

    Abbreviations like "Dr." never open a boundary. Input with no terminator
    comes back as a single sentence; every non-whitespace character lands in
    exactly one sentence.
    """
    spans: List[Tuple[int, int]] = []
    n = len(text)
    start = 0
    i = 0
    while i < n:
        if text[i] in ".?!":
            # extend over the whole terminator run ("?!", "...")
            j = i
            while j + 1 < n and text[j + 1] in ".?!":
                j += 1
            if _is_boundary(text, j):
                spans.append((start, j + 1))
                start = j + 1
            i = j + 1
        else:
            i += 1
    if start < n:
        spans.append((start, n))

    sentences: List[Sentence] = []
    for span_start, span_end in spans:
        sent_text = text[span_start:span_end].strip()
        if not sent_text:
            continue
        sentences.append(
            Sentence(
                text=sent_text,
                tokens=tuple(tokenize(sent_text, stemming=stemming)),
                index=len(sentences),
            )
        )
    return SentenceList(sentences=tuple(sentences))
