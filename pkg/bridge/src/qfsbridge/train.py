"""Supervised fine-tuning loop with manifest output.

Cross-entropy over teacher-forced targets, AdamW with the configured betas,
epsilon, and weight decay, linear warmup. Evaluation runs every `eval_every`
optimizer steps plus once at the end; when `eval_every` exceeds the total
step count that final pass is the only one. The manifest records resolved
hyperparameters, data digests, the step count, and eval history; a NaN
training loss is flagged as divergence rather than raised.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import torch
from torch import nn

from .model import WordTokenizer, build_model, save_checkpoint
from .spec import BridgeError, BridgeJobSpec, file_digest, read_train_lines


def _batches(rows, batch_size):
    for start in range(0, len(rows), batch_size):
        yield rows[start : start + batch_size]


def _encode_batch(
    batch, tokenizer: WordTokenizer, max_source_len: int, max_target_len: int
) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    pad = tokenizer.pad_id
    src_ids = [tokenizer.encode(inp, max_source_len) for _, inp, _ in batch]
    tgt_ids = [
        [tokenizer.bos_id]
        + tokenizer.encode(target, max_target_len)
        + [tokenizer.eos_id]
        for _, _, target in batch
    ]
    src_len = max(len(s) for s in src_ids)
    tgt_len = max(len(t) for t in tgt_ids)
    src = torch.tensor([s + [pad] * (src_len - len(s)) for s in src_ids])
    tgt = torch.tensor([t + [pad] * (tgt_len - len(t)) for t in tgt_ids])
    return src, tgt[:, :-1], tgt[:, 1:]


def _eval_loss(model, rows, tokenizer, spec, loss_fn) -> Optional[float]:
    if not rows:
        return None
    hp = spec.resolved_hyperparams()
    model.eval()
    total, count = 0.0, 0
    with torch.no_grad():
        for batch in _batches(rows, int(hp["eval_batch"])):
            src, tgt_in, tgt_out = _encode_batch(
                batch, tokenizer, spec.max_source_len, spec.max_target_len
            )
            logits = model(src, tgt_in, tokenizer.pad_id)
            loss = loss_fn(logits.reshape(-1, logits.size(-1)), tgt_out.reshape(-1))
            total += float(loss) * len(batch)
            count += len(batch)
    model.train()
    return total / count


def run_finetune(spec: BridgeJobSpec) -> dict:
    """Train from spec.train_path, write checkpoint + manifest, return manifest."""
    if spec.train_path is None:
        raise BridgeError("train_path is required for fine-tuning")
    torch.manual_seed(spec.seed)
    hp = spec.resolved_hyperparams()

    train_rows = read_train_lines(spec.train_path, spec.task)
    if not train_rows:
        raise BridgeError(f"{spec.train_path}: no training samples")
    eval_rows = read_train_lines(spec.eval_path, spec.task) if spec.eval_path else []

    tokenizer = WordTokenizer.build(
        [inp for _, inp, _ in train_rows] + [t for _, _, t in train_rows]
    )
    model = build_model(spec.model_name, len(tokenizer.itos))
    model.train()

    optimizer = torch.optim.AdamW(
        model.parameters(),
        lr=float(hp["learning_rate"]),
        betas=(float(hp["adam_beta1"]), float(hp["adam_beta2"])),
        eps=float(hp["adam_epsilon"]),
        weight_decay=float(hp["weight_decay"]),
    )
    warmup = int(hp["warmup_steps"])
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda step: min(1.0, (step + 1) / max(1, warmup))
    )
    loss_fn = nn.CrossEntropyLoss(ignore_index=tokenizer.pad_id)

    epochs = int(hp["epochs"])
    batch_size = int(hp["train_batch"])
    eval_every = int(hp["eval_every"])
    steps_per_epoch = math.ceil(len(train_rows) / batch_size)

    step = 0
    diverged = False
    last_loss = float("nan")
    evals: List[dict] = []
    for _ in range(epochs):
        for batch in _batches(train_rows, batch_size):
            src, tgt_in, tgt_out = _encode_batch(
                batch, tokenizer, spec.max_source_len, spec.max_target_len
            )
            optimizer.zero_grad()
            logits = model(src, tgt_in, tokenizer.pad_id)
            loss = loss_fn(logits.reshape(-1, logits.size(-1)), tgt_out.reshape(-1))
            last_loss = float(loss.detach())
            if math.isnan(last_loss):
                diverged = True
                break
            loss.backward()
            optimizer.step()
            scheduler.step()
            step += 1
            if step % eval_every == 0:
                evals.append({
                    "step": step,
                    "eval_loss": _eval_loss(model, eval_rows, tokenizer, spec, loss_fn),
                })
        if diverged:
            break
    if not evals or evals[-1]["step"] != step:
        evals.append({
            "step": step,
            "eval_loss": _eval_loss(model, eval_rows, tokenizer, spec, loss_fn),
        })

    checkpoint_dir = Path(spec.checkpoint_dir)
    save_checkpoint(checkpoint_dir, model, tokenizer, spec.model_name)
    manifest = {
        "task": spec.task,
        "model_name": spec.model_name,
        "hyperparams": hp,
        "overrides": dict(spec.hyperparams),
        "train_samples": len(train_rows),
        "eval_samples": len(eval_rows),
        "steps_per_epoch": steps_per_epoch,
        "optimizer_steps": step,
        "final_train_loss": None if math.isnan(last_loss) else last_loss,
        "diverged": diverged,
        "evals": evals,
        "data_digests": {
            "train": file_digest(spec.train_path),
            "eval": file_digest(spec.eval_path) if spec.eval_path else None,
        },
        "vocab_size": len(tokenizer.itos),
        "max_source_len": spec.max_source_len,
        "max_target_len": spec.max_target_len,
        "seed": spec.seed,
    }
    (checkpoint_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return manifest
