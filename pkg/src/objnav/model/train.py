"""Training loop: seeded 4:1 split, AdamW, best-validation checkpointing."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, DataError
from .checkpoint import Checkpoint
from .config import ModelConfig
from .network import AdamW, Model, head_losses_and_grads
from .vocab import TokenVocab

LOG_HEADER = "epoch,train_loss,val_loss,val_state_acc"


@dataclass
class TrainSettings:
    epochs: int = 25
    batch_size: int = 512
    lr: float = 1e-4
    beta: float = 10.0
    weight_decay: float = 0.01
    seed: int = 0
    log_path: str | Path | None = None

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be positive")


@dataclass
class EpochStats:
    epoch: int
    train_loss: float
    val_loss: float
    val_state_acc: float
    seconds: float = 0.0


@dataclass
class TrainResult:
    checkpoint: Checkpoint
    history: list[EpochStats] = field(default_factory=list)

    @property
    def best(self) -> EpochStats:
        return min(self.history, key=lambda e: e.val_loss)


def split_indices(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded 4:1 train/validation split."""
    perm = np.random.default_rng(seed).permutation(n)
    n_val = max(1, n // 5)
    return perm[n_val:], perm[:n_val]


def _batch_targets(data: dict[str, np.ndarray], config: ModelConfig,
                   idx: np.ndarray) -> dict[str, np.ndarray]:
    return {name: data[name][idx] for name, _, _ in config.output_heads}


def evaluate(model: Model, data: dict[str, np.ndarray], idx: np.ndarray,
             beta: float, batch_size: int = 1024) -> tuple[float, float, dict]:
    """Validation loss, joint state accuracy, and per-head outputs."""
    cfg = model.config
    total = 0.0
    correct = np.ones(len(idx), dtype=bool)
    collected: dict[str, list[np.ndarray]] = {n: [] for n, _, _ in cfg.output_heads}
    for s in range(0, len(idx), batch_size):
        bidx = idx[s : s + batch_size]
        outputs, _ = model.forward(data["tokens"][bidx], train=False)
        losses, _ = head_losses_and_grads(
            cfg, outputs, _batch_targets(data, cfg, bidx), beta)
        total += losses["total"] * len(bidx)
        for name, kind, _ in cfg.output_heads:
            collected[name].append(outputs[name])
            if kind == "classify":
                pred = outputs[name].argmax(axis=1)
                correct[s : s + len(bidx)] &= pred == data[name][bidx]
    outputs_full = {n: np.concatenate(v) for n, v in collected.items()}
    return total / len(idx), float(correct.mean()), outputs_full


def train(data: dict[str, np.ndarray], config: ModelConfig, vocab: TokenVocab,
          settings: TrainSettings | None = None) -> TrainResult:
    """Train a model and return the lowest-validation-loss checkpoint.

    `data` holds "tokens" plus one target array per output head. The split,
    shuffling, initialization, and dropout all derive from settings.seed, so
    identical inputs reproduce identical checkpoints bit for bit (given a
    fixed BLAS thread count).
    """
    settings = settings or TrainSettings()
    n = len(data["tokens"])
    if n < 2:
        raise DataError("dataset too small to split")
    train_idx, val_idx = split_indices(n, settings.seed)

    model = Model(config, vocab_size=len(vocab), seed=settings.seed)
    opt = AdamW(model.params, lr=settings.lr, weight_decay=settings.weight_decay)
    shuffle_rng = np.random.default_rng(settings.seed + 2)

    log_lines = [f"# seed={settings.seed}", LOG_HEADER]
    history: list[EpochStats] = []
    best_loss = np.inf
    best_params: dict[str, np.ndarray] | None = None
    best_epoch = -1

    for epoch in range(1, settings.epochs + 1):
        t0 = time.perf_counter()
        order = shuffle_rng.permutation(train_idx)
        running = 0.0
        for s in range(0, len(order), settings.batch_size):
            bidx = order[s : s + settings.batch_size]
            losses, grads, _ = model.loss_and_grads(
                data["tokens"][bidx], _batch_targets(data, config, bidx),
                beta=settings.beta, train=True)
            if not np.isfinite(losses["total"]):
                raise DataError(
                    f"non-finite loss {losses} at epoch {epoch} batch {s // settings.batch_size}"
                )
            opt.step(model.params, grads)
            running += losses["total"] * len(bidx)
        train_loss = running / len(order)
        val_loss, val_acc, _ = evaluate(model, data, val_idx, settings.beta)
        stats = EpochStats(epoch, train_loss, val_loss, val_acc,
                           time.perf_counter() - t0)
        history.append(stats)
        log_lines.append(f"{epoch},{train_loss:.6f},{val_loss:.6f},{val_acc:.6f}")
        if settings.log_path is not None:  # per-epoch so long runs are visible
            Path(settings.log_path).write_text("\n".join(log_lines) + "\n")
        if val_loss < best_loss:
            best_loss = val_loss
            best_params = {k: v.copy() for k, v in model.params.items()}
            best_epoch = epoch

    assert best_params is not None
    ckpt = Checkpoint(
        config=config,
        vocab=vocab,
        params=best_params,
        metadata={
            "epochs": settings.epochs,
            "best_epoch": best_epoch,
            "seed": settings.seed,
            "beta": settings.beta,
            "lr": settings.lr,
            "batch_size": settings.batch_size,
            "train_samples": int(len(train_idx)),
            "val_samples": int(len(val_idx)),
            "final_train_loss": history[-1].train_loss,
            "final_val_loss": history[-1].val_loss,
            "best_val_loss": float(best_loss),
            "val_state_acc": history[-1].val_state_acc,
        },
    )
    return TrainResult(checkpoint=ckpt, history=history)
