"""Shared helpers for the heavier test fixtures.

Trained checkpoints are cached under .cache/acceptance keyed by the exact
inputs (corpus digest, model config, train settings), which is sound because
training is bit-reproducible for fixed inputs. A fresh clone retrains; a
cached tree just loads.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
CACHE = ROOT / ".cache"


def corpus_path(n: int, seed: int) -> Path:
    """Generate-or-reuse a corpus of n oracle-labeled samples."""
    from objnav.datagen import generate_dataset

    path = CACHE / "corpora" / f"corpus_n{n}_seed{seed}.jsonl"
    if not path.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        generate_dataset(n, seed, tmp)
        tmp.rename(path)
    return path


def _digest(path: Path) -> str:
    h = hashlib.blake2b(digest_size=16)
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def train_cached(corpus: Path, preset_name: str, *, epochs: int, seed: int,
                 beta: float = 10.0, use_sep: bool = True,
                 limit: int | None = None, tag: str = ""):
    """Train (or load) a motion-model checkpoint for the given recipe."""
    from objnav.model import build_vocab, load_checkpoint, save_checkpoint
    from objnav.model.config import preset
    from objnav.model.data import load_training_arrays
    from objnav.model.train import TrainSettings, train

    config = preset(preset_name, use_sep=use_sep)
    settings = dict(epochs=epochs, seed=seed, beta=beta, limit=limit)
    key_src = json.dumps(
        {"corpus": _digest(corpus), "config": config.to_dict(),
         "settings": settings}, sort_keys=True)
    key = hashlib.blake2b(key_src.encode(), digest_size=8).hexdigest()
    name = tag or f"{preset_name}-e{epochs}-s{seed}"
    out_dir = CACHE / "acceptance" / f"{name}-{key}"
    ckpt_path = out_dir / "checkpoint.l2mm"
    if ckpt_path.exists():
        return load_checkpoint(ckpt_path), out_dir

    out_dir.mkdir(parents=True, exist_ok=True)
    vocab = build_vocab()
    data = load_training_arrays(corpus, vocab, config, limit=limit)
    result = train(data, config, vocab,
                   TrainSettings(epochs=epochs, seed=seed, beta=beta,
                                 log_path=out_dir / "train_log.csv"))
    ckpt = result.checkpoint
    ckpt.metadata["recipe"] = settings | {"preset": preset_name,
                                          "use_sep": use_sep}
    tmp = ckpt_path.with_suffix(".tmp")
    save_checkpoint(tmp, ckpt)
    tmp.rename(ckpt_path)
    (out_dir / "history.json").write_text(json.dumps(
        [vars(e) for e in result.history], indent=2))
    return ckpt, out_dir


def ioe_cached(n: int = 40000, epochs: int = 5, seed: int = 19):
    """Train (or load) the instruction-object extractor."""
    import numpy as np

    from objnav.datagen.templates import InstructionTemplate, SPEED_GRID, \
        vary_instruction
    from objnav.lexicon import default_lexicon
    from objnav.model import build_vocab, load_checkpoint, save_checkpoint
    from objnav.model.config import ioe_config
    from objnav.model.train import TrainSettings, train
    from objnav.model.vocab import tokenize_instruction

    out_dir = CACHE / "acceptance" / f"ioe-n{n}-e{epochs}-s{seed}"
    ckpt_path = out_dir / "checkpoint.l2mm"
    if ckpt_path.exists():
        return load_checkpoint(ckpt_path)
    out_dir.mkdir(parents=True, exist_ok=True)

    lexicon = default_lexicon()
    vocab = build_vocab(lexicon)
    config = ioe_config(len(lexicon.classes))
    template = InstructionTemplate(lexicon=lexicon)
    rng = np.random.default_rng(seed)
    tokens = np.zeros((n, config.max_seq_len), dtype=np.int32)
    labels = np.zeros(n, dtype=np.int64)
    for i in range(n):
        cls_idx = i % len(lexicon.classes)
        speed = SPEED_GRID[int(rng.integers(len(SPEED_GRID)))]
        text = vary_instruction(template, lexicon.classes[cls_idx], speed, rng)
        tokens[i] = tokenize_instruction(text, vocab, config.max_seq_len)
        labels[i] = cls_idx
    data = {"tokens": tokens, "object": labels}
    result = train(data, config, vocab,
                   TrainSettings(epochs=epochs, seed=seed, beta=1.0,
                                 log_path=out_dir / "train_log.csv"))
    ckpt = result.checkpoint
    ckpt.metadata["classes"] = list(lexicon.classes)
    ckpt.metadata["kind"] = "instruction-object-extractor"
    tmp = ckpt_path.with_suffix(".tmp")
    save_checkpoint(tmp, ckpt)
    tmp.rename(ckpt_path)
    return ckpt


def speed_eval(ckpt, corpus: Path, v_star: float = 0.40,
               limit: int | None = None):
    """(sigma_v, eps_v, state_acc) on the held-out split of `corpus`."""
    import numpy as np

    from objnav.model.data import load_training_arrays
    from objnav.model.infer import model_of
    from objnav.model.metrics import eval_speed_metrics
    from objnav.model.train import evaluate, split_indices

    data = load_training_arrays(corpus, ckpt.vocab, ckpt.config, limit=limit)
    seed = int(ckpt.metadata.get("seed", 0))
    _, val_idx = split_indices(len(data["tokens"]), seed)
    model = model_of(ckpt)
    _, state_acc, _ = evaluate(model, data, val_idx,
                               beta=float(ckpt.metadata.get("beta", 10.0)))
    running = val_idx[(data["mission"][val_idx] == 1)
                      & (data["motion"][val_idx, 0] == np.float32(v_star))]
    sigma_v, eps_v = eval_speed_metrics(model, data["tokens"][running], v_star)
    return sigma_v, eps_v, state_acc
