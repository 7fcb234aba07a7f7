"""Token vocabulary and encoder-input tokenization.

The encoder consumes a flat token sequence built from eleven slots: the
previous and current instruction sentences, the detected-object entity
token, five 2-decimal numeric buckets (confidence, center x/y, box w/h),
and the mission / search state tokens. Every slot is terminated by [SEP]
(ten separators total before padding); the no-SEP ablation drops them.

Numeric fields tokenize as bucket strings "0.00".."1.00" (half-up rounding),
and numeric-looking instruction words normalize to the same bucket tokens so
"0.4 m/s" and "0.40 m/s" encode identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EncodingError, VocabMismatchError
from ..lexicon import ClassLexicon, default_lexicon
from ..planner import GRAMMAR_WORDS

PAD = "[PAD]"
UNK = "[UNK]"
SEP = "[SEP]"
NOOBJ = "[NOOBJ]"
SPECIALS = (PAD, UNK, SEP, NOOBJ)

STATE_TOKENS = ("success", "running", "searching_0", "searching_1")

OBJ_PREFIX = "obj:"  # entity token namespace for whole-class tokens


def bucket_index(x: float) -> int:
    """Half-up 2-decimal bucket index in [0, 100]."""
    idx = int(math.floor(x * 100.0 + 0.5))
    return min(100, max(0, idx))


def bucket_token(x: float) -> str:
    idx = bucket_index(x)
    return f"{idx // 100}.{idx % 100:02d}"


def bucket_value(token: str) -> float:
    """Inverse of bucket_token (center of the bucket's rounding range)."""
    return float(token)


ALL_BUCKETS = tuple(f"{i // 100}.{i % 100:02d}" for i in range(101))


def normalize_word(word: str) -> str:
    """Lowercase; numeric-looking words map onto bucket token strings."""
    w = word.lower().strip(".,!?;")
    try:
        v = float(w)
    except ValueError:
        return w
    if 0.0 <= v <= 1.0049:
        return bucket_token(v)
    return w


@dataclass
class TokenVocab:
    """Dense token-id table; [PAD] is always id 0."""

    tokens: list[str]

    def __post_init__(self) -> None:
        if not self.tokens or self.tokens[0] != PAD:
            raise VocabMismatchError("vocabulary must start with [PAD] at id 0")
        self.index: dict[str, int] = {t: i for i, t in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise VocabMismatchError("duplicate token strings in vocabulary")

    def __len__(self) -> int:
        return len(self.tokens)

    def id(self, token: str) -> int:
        return self.index.get(token, self.index[UNK])

    def word_id(self, word: str) -> int:
        return self.id(normalize_word(word))

    @property
    def pad_id(self) -> int:
        return 0

    @property
    def sep_id(self) -> int:
        return self.index[SEP]


def build_vocab(lexicon: ClassLexicon | None = None) -> TokenVocab:
    """Deterministic vocabulary over the instruction grammar and lexicon."""
    lexicon = lexicon or default_lexicon()
    tokens: list[str] = list(SPECIALS)
    tokens += STATE_TOKENS
    tokens += ALL_BUCKETS
    tokens += [OBJ_PREFIX + cls for cls in lexicon.classes]
    words: set[str] = set(GRAMMAR_WORDS)
    for phrase in lexicon.synonyms:
        words.update(phrase.split())
    tokens += sorted(words)
    return TokenVocab(tokens=tokens)


@dataclass
class EncoderInput:
    """Everything the motion model sees for one tick."""

    prev_instruction: str
    instruction: str
    obj: str | None          # detected class, or None when nothing is visible
    confidence: float = 0.0
    center: tuple[float, float] = (0.0, 0.0)
    size: tuple[float, float] = (0.0, 0.0)
    mission_state: str = "running"
    search_state: str = "searching_1"


def instruction_word_ids(text: str, vocab: TokenVocab) -> list[int]:
    return [vocab.word_id(w) for w in text.split()]


def tokenize(inp: EncoderInput, vocab: TokenVocab, max_seq_len: int = 64,
             use_sep: bool = True) -> np.ndarray:
    """Encode one input as int32 ids, padded to max_seq_len."""
    sep = [vocab.sep_id] if use_sep else []
    if inp.obj is None:
        obj_id = vocab.id(NOOBJ)
        conf, (cx, cy), (w, h) = 0.0, (0.0, 0.0), (0.0, 0.0)
    else:
        obj_id = vocab.id(OBJ_PREFIX + inp.obj)
        conf, (cx, cy), (w, h) = inp.confidence, inp.center, inp.size

    ids: list[int] = []
    ids += instruction_word_ids(inp.prev_instruction, vocab) + sep
    ids += instruction_word_ids(inp.instruction, vocab) + sep
    ids += [obj_id] + sep
    for value in (conf, cx, cy, w, h):
        ids += [vocab.id(bucket_token(value))] + sep
    ids += [vocab.id(inp.mission_state)] + sep
    ids += [vocab.id(inp.search_state)] + sep

    if len(ids) > max_seq_len:
        raise EncodingError(
            f"encoded length {len(ids)} exceeds max_seq_len {max_seq_len}"
        )
    out = np.zeros(max_seq_len, dtype=np.int32)
    out[: len(ids)] = ids
    return out


def tokenize_instruction(text: str, vocab: TokenVocab, max_seq_len: int = 24
                         ) -> np.ndarray:
    """Encode a bare instruction sentence (extractor input)."""
    ids = instruction_word_ids(text, vocab)
    if len(ids) > max_seq_len:
        raise EncodingError(
            f"instruction length {len(ids)} exceeds max_seq_len {max_seq_len}"
        )
    out = np.zeros(max_seq_len, dtype=np.int32)
    out[: len(ids)] = ids
    return out
