"""Batch inference: JSONL in, JSONL out, one line per input, order preserved.

Inputs are re-truncated with the checkpoint's own tokenizer to the model's
source limit before generation. Output lines carry {"sample_id", "evidence"}
for the evidence task and {"sample_id", "summary"} for summarization, the
shape the evaluator's bridge_file mode consumes.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import List

import torch

from .model import load_checkpoint
from .spec import BridgeError, BridgeJobSpec, read_infer_lines


def run_infer(spec: BridgeJobSpec) -> List[dict]:
    if spec.infer_in_path is None or spec.infer_out_path is None:
        raise BridgeError("infer_in_path and infer_out_path are required")
    rows = read_infer_lines(spec.infer_in_path, spec.task)
    out_key = spec.target_key()
    hp = spec.resolved_hyperparams()
    records: List[dict] = []
    if rows:
        model, tokenizer, _ = load_checkpoint(spec.checkpoint_dir)
        pad = tokenizer.pad_id
        batch_size = int(hp["eval_batch"])
        try:
            for start in range(0, len(rows), batch_size):
                batch = rows[start : start + batch_size]
                src_ids = [
                    tokenizer.encode(text, spec.max_source_len) or [pad]
                    for _, text in batch
                ]
                src_len = max(len(s) for s in src_ids)
                src = torch.tensor([s + [pad] * (src_len - len(s)) for s in src_ids])
                decoded = model.greedy_decode(
                    src, tokenizer.bos_id, tokenizer.eos_id, pad, spec.max_target_len
                )
                for (sample_id, _), ids in zip(batch, decoded):
                    records.append({"sample_id": sample_id, out_key: tokenizer.decode(ids)})
        except torch.cuda.OutOfMemoryError as exc:
            raise BridgeError(f"out of memory during generation: {exc}") from None
    with Path(spec.infer_out_path).open("w", encoding="utf-8", newline="\n") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False))
            f.write("\n")
    return records
