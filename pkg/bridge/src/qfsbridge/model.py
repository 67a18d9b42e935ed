"""Compact word-level transformer seq2seq used for desk-scale runs.

model_name selects a size preset ("tiny-transformer" or "small-transformer");
the string is recorded in the manifest either way. The vocabulary is built
from the training data and saved with the checkpoint, so inference
re-truncates inputs with the model's own tokenizer before generation.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Sequence

import torch
from torch import nn

from .spec import BridgeError

PAD, BOS, EOS, UNK = "<pad>", "<s>", "</s>", "<unk>"
SPECIALS = (PAD, BOS, EOS, UNK)

PRESETS = {
    "tiny-transformer": {"d_model": 64, "nhead": 2, "layers": 1, "ff": 128},
    "small-transformer": {"d_model": 128, "nhead": 4, "layers": 2, "ff": 256},
}


class WordTokenizer:
    """Whitespace + lowercase word tokenizer with a closed vocabulary."""

    def __init__(self, vocab: Sequence[str]):
        self.itos: List[str] = list(vocab)
        self.stoi: Dict[str, int] = {t: i for i, t in enumerate(self.itos)}
        if self.itos[: len(SPECIALS)] != list(SPECIALS):
            raise BridgeError("vocabulary must start with the special tokens")

    @classmethod
    def build(cls, texts: Sequence[str], max_vocab: int = 8000) -> "WordTokenizer":
        from collections import Counter

        counts: Counter = Counter()
        for text in texts:
            counts.update(text.lower().split())
        most_common = [t for t, _ in counts.most_common(max_vocab - len(SPECIALS))]
        return cls(list(SPECIALS) + most_common)

    @property
    def pad_id(self) -> int:
        return self.stoi[PAD]

    @property
    def bos_id(self) -> int:
        return self.stoi[BOS]

    @property
    def eos_id(self) -> int:
        return self.stoi[EOS]

    def encode(self, text: str, max_len: int) -> List[int]:
        """Truncate to max_len tokens (the model's true input limit)."""
        unk = self.stoi[UNK]
        ids = [self.stoi.get(t, unk) for t in text.lower().split()]
        return ids[:max_len]

    def decode(self, ids: Sequence[int]) -> str:
        words = []
        for i in ids:
            token = self.itos[i] if 0 <= i < len(self.itos) else UNK
            if token in (PAD, BOS):
                continue
            if token == EOS:
                break
            words.append(token)
        return " ".join(words)


class Seq2SeqTransformer(nn.Module):
    def __init__(self, vocab_size: int, d_model: int, nhead: int, layers: int, ff: int):
        super().__init__()
        self.d_model = d_model
        self.embed = nn.Embedding(vocab_size, d_model)
        self.pos = nn.Embedding(1024, d_model)
        self.transformer = nn.Transformer(
            d_model=d_model,
            nhead=nhead,
            num_encoder_layers=layers,
            num_decoder_layers=layers,
            dim_feedforward=ff,
            batch_first=True,
            dropout=0.1,
        )
        self.out = nn.Linear(d_model, vocab_size)

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.size(1), device=ids.device).unsqueeze(0)
        return self.embed(ids) + self.pos(positions)

    def forward(
        self, src: torch.Tensor, tgt: torch.Tensor, pad_id: int
    ) -> torch.Tensor:
        tgt_mask = torch.triu(
            torch.ones(tgt.size(1), tgt.size(1), dtype=torch.bool, device=tgt.device),
            diagonal=1,
        )
        hidden = self.transformer(
            self._embed(src),
            self._embed(tgt),
            tgt_mask=tgt_mask,
            src_key_padding_mask=src.eq(pad_id),
            tgt_key_padding_mask=tgt.eq(pad_id),
            memory_key_padding_mask=src.eq(pad_id),
        )
        return self.out(hidden)

    @torch.no_grad()
    def greedy_decode(
        self, src: torch.Tensor, bos_id: int, eos_id: int, pad_id: int, max_len: int
    ) -> List[List[int]]:
        self.eval()
        batch = src.size(0)
        tgt = torch.full((batch, 1), bos_id, dtype=torch.long, device=src.device)
        finished = torch.zeros(batch, dtype=torch.bool, device=src.device)
        for _ in range(max_len):
            logits = self.forward(src, tgt, pad_id)
            next_ids = logits[:, -1].argmax(dim=-1)
            next_ids = torch.where(finished, torch.full_like(next_ids, pad_id), next_ids)
            tgt = torch.cat([tgt, next_ids.unsqueeze(1)], dim=1)
            finished |= next_ids.eq(eos_id)
            if bool(finished.all()):
                break
        return tgt[:, 1:].tolist()


def build_model(model_name: str, vocab_size: int) -> Seq2SeqTransformer:
    preset = PRESETS.get(model_name)
    if preset is None:
        raise BridgeError(
            f"unknown model_name {model_name!r}; available: {sorted(PRESETS)}"
        )
    return Seq2SeqTransformer(
        vocab_size, preset["d_model"], preset["nhead"], preset["layers"], preset["ff"]
    )


def save_checkpoint(
    directory: str | Path, model: Seq2SeqTransformer, tokenizer: WordTokenizer,
    model_name: str,
) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), directory / "model.pt")
    (directory / "vocab.json").write_text(
        json.dumps({"model_name": model_name, "vocab": tokenizer.itos}),
        encoding="utf-8",
    )


def load_checkpoint(directory: str | Path):
    directory = Path(directory)
    vocab_file = directory / "vocab.json"
    weights_file = directory / "model.pt"
    if not vocab_file.exists() or not weights_file.exists():
        raise BridgeError(f"no checkpoint at {directory}")
    meta = json.loads(vocab_file.read_text(encoding="utf-8"))
    tokenizer = WordTokenizer(meta["vocab"])
    model = build_model(meta["model_name"], len(tokenizer.itos))
    model.load_state_dict(torch.load(weights_file, map_location="cpu"))
    model.eval()
    return model, tokenizer, meta["model_name"]
