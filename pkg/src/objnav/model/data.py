"""Corpus loading and tokenization into training arrays."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from ..errors import DataError
from .config import ModelConfig
from .vocab import EncoderInput, TokenVocab, tokenize

MISSION_LABELS = {"success": 0, "running": 1}
SEARCH_LABELS = {"searching_0": 0, "searching_1": 1}


def parse_corpus_line(line: str) -> dict:
    rec = json.loads(line)
    required = {"im0", "im1", "obj", "conf", "cx", "cy", "w", "h", "sm", "ss",
                "target"}
    if not required.issubset(rec):
        raise DataError(f"corpus line missing fields: {sorted(required - set(rec))}")
    return rec


def iter_corpus(path: str | Path, limit: int | None = None) -> Iterator[dict]:
    """Stream corpus records; `limit` takes the seeded-prefix subset."""
    with open(path, "r", encoding="utf-8") as f:
        for i, line in enumerate(f):
            if limit is not None and i >= limit:
                return
            if line.strip():
                yield parse_corpus_line(line)


def record_to_input(rec: dict) -> EncoderInput:
    return EncoderInput(
        prev_instruction=rec["im0"],
        instruction=rec["im1"],
        obj=rec["obj"] if rec["obj"] else None,
        confidence=rec["conf"],
        center=(rec["cx"], rec["cy"]),
        size=(rec["w"], rec["h"]),
        mission_state=rec["sm"],
        search_state=rec["ss"],
    )


def tokenize_records(records: Iterable[dict], vocab: TokenVocab,
                     config: ModelConfig) -> dict[str, np.ndarray]:
    """Tokenize a corpus into dense arrays keyed for the trainer."""
    tokens: list[np.ndarray] = []
    motion: list[list[float]] = []
    mission: list[int] = []
    search: list[int] = []
    for rec in records:
        tokens.append(tokenize(record_to_input(rec), vocab, config.max_seq_len,
                               use_sep=config.use_sep))
        tgt = rec["target"]
        motion.append(tgt["v"])
        mission.append(MISSION_LABELS[tgt["sm"]])
        search.append(SEARCH_LABELS[tgt["ss"]])
    if not tokens:
        raise DataError("empty corpus")
    return {
        "tokens": np.stack(tokens).astype(np.int32),
        "motion": np.asarray(motion, dtype=np.float32),
        "mission": np.asarray(mission, dtype=np.int64),
        "search": np.asarray(search, dtype=np.int64),
    }


def load_training_arrays(path: str | Path, vocab: TokenVocab,
                         config: ModelConfig, limit: int | None = None
                         ) -> dict[str, np.ndarray]:
    return tokenize_records(iter_corpus(path, limit), vocab, config)
