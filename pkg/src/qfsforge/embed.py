"""Token embeddings and text-vector similarity.

Two providers share one interface: a GloVe-style text vector file (one line
per token: token followed by `dimension` floats), and a deterministic hash
fallback that needs no external files. Text vectors are the arithmetic mean
of in-vocabulary token vectors; similarity is cosine.

The hash fallback uses 64-bit FNV-1a over "{seed}:{token}:{component_index}"
(UTF-8), mapped linearly from [0, 2^64) onto [-1, 1), so independent
implementations can reproduce it bit-for-bit.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


class EmbeddingError(Exception):
    """Raised for malformed vector files."""


@dataclass(frozen=True)
class TextVector:
    components: np.ndarray
    token_count: int

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.components))


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def hash_fallback_vector(token: str, dimension: int, seed: int = 0) -> np.ndarray:
    """Deterministic pseudo-random vector for `token`, components in [-1, 1)."""
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    out = np.empty(dimension, dtype=np.float64)
    for i in range(dimension):
        h = _fnv1a64(f"{seed}:{token}:{i}".encode("utf-8"))
        out[i] = (h / 2.0**64) * 2.0 - 1.0
    return out


class EmbeddingProvider:
    """token -> fixed-dimension vector, immutable after construction.

    vector_file providers return None for out-of-vocabulary tokens;
    the hash fallback has no OOV.
    """

    def __init__(
        self,
        dimension: int,
        source: str,
        vectors: Optional[Dict[str, np.ndarray]] = None,
        seed: int = 0,
    ):
        self.dimension = dimension
        self.source = source
        self.seed = seed
        self._vectors = vectors
        self._fallback_cache: Dict[str, np.ndarray] = {}

    @classmethod
    def from_vector_file(cls, path: str | Path) -> "EmbeddingProvider":
        """Load a GloVe-style text embedding file."""
        vectors: Dict[str, np.ndarray] = {}
        dimension = None
        with Path(path).open(encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                parts = line.rstrip("\n").split(" ")
                if len(parts) < 2:
                    raise EmbeddingError(f"line {lineno}: too few fields")
                token = parts[0]
                try:
                    vec = np.array([float(x) for x in parts[1:]], dtype=np.float64)
                except ValueError:
                    raise EmbeddingError(
                        f"line {lineno}: non-numeric vector component"
                    ) from None
                if not np.all(np.isfinite(vec)):
                    raise EmbeddingError(f"line {lineno}: non-finite component")
                if dimension is None:
                    dimension = len(vec)
                elif len(vec) != dimension:
                    raise EmbeddingError(
                        f"line {lineno}: dimension {len(vec)} != {dimension}"
                    )
                vectors[token] = vec
        if dimension is None:
            raise EmbeddingError(f"{path}: empty vector file")
        return cls(dimension=dimension, source="vector_file", vectors=vectors)

    @classmethod
    def hash_fallback(cls, dimension: int = 64, seed: int = 0) -> "EmbeddingProvider":
        return cls(dimension=dimension, source="hash_fallback", seed=seed)

    def lookup(self, token: str) -> Optional[np.ndarray]:
        if self._vectors is not None:
            return self._vectors.get(token)
        cached = self._fallback_cache.get(token)
        if cached is None:
            cached = hash_fallback_vector(token, self.dimension, self.seed)
            self._fallback_cache[token] = cached
        return cached

    def descriptor(self) -> str:
        """Stable identity string for report config digests."""
        if self.source == "vector_file":
            return f"vector_file(dim={self.dimension},vocab={len(self._vectors)})"
        return f"hash_fallback(dim={self.dimension},seed={self.seed})"


def embed_text(provider: EmbeddingProvider, tokens: Sequence[str]) -> TextVector:
    """Mean of in-vocabulary token vectors; OOV tokens are skipped.

    Empty or all-OOV input yields a zero vector with token_count 0.
    """
    found: List[np.ndarray] = []
    for token in tokens:
        vec = provider.lookup(token)
        if vec is not None:
            found.append(vec)
    if not found:
        return TextVector(
            components=np.zeros(provider.dimension, dtype=np.float64), token_count=0
        )
    return TextVector(
        components=np.mean(found, axis=0), token_count=len(found)
    )


def cosine_similarity(a: TextVector | np.ndarray, b: TextVector | np.ndarray) -> float:
    """dot(a,b) / (|a||b|); 0.0 by convention when either norm is zero."""
    va = a.components if isinstance(a, TextVector) else np.asarray(a, dtype=np.float64)
    vb = b.components if isinstance(b, TextVector) else np.asarray(b, dtype=np.float64)
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(va, vb) / (na * nb))
