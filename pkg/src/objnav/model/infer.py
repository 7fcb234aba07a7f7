"""Inference helpers over saved checkpoints."""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from ..perception import Detection
from .checkpoint import Checkpoint
from .network import Model
from .vocab import EncoderInput, tokenize, tokenize_instruction


def model_of(ckpt: Checkpoint) -> Model:
    """Model view of a checkpoint; cached on the checkpoint object."""
    model = getattr(ckpt, "_model", None)
    if model is None:
        model = Model(ckpt.config, vocab_size=len(ckpt.vocab), params=ckpt.params)
        ckpt._model = model
    return model


def forward_input(ckpt: Checkpoint, inp: EncoderInput) -> dict[str, np.ndarray]:
    tokens = tokenize(inp, ckpt.vocab, ckpt.config.max_seq_len,
                      use_sep=ckpt.config.use_sep)[None, :]
    outputs, _ = model_of(ckpt).forward(tokens, train=False)
    return {name: arr[0] for name, arr in outputs.items()}


def predict_motion(ckpt: Checkpoint, prev_instruction: str, instruction: str,
                   detection: Detection | None, mission_state: str,
                   search_state: str) -> tuple[float, float, float]:
    """Motion vector [v_x, v_y, theta] for one tick's encoder input."""
    inp = EncoderInput(
        prev_instruction=prev_instruction,
        instruction=instruction,
        obj=detection.label if detection is not None else None,
        confidence=detection.confidence if detection is not None else 0.0,
        center=detection.center if detection is not None else (0.0, 0.0),
        size=detection.size if detection is not None else (0.0, 0.0),
        mission_state=mission_state,
        search_state=search_state,
    )
    v = forward_input(ckpt, inp)["motion"]
    return float(v[0]), float(v[1]), float(v[2])


def classify_instruction(ckpt: Checkpoint, text: str) -> str:
    """Argmax class of the instruction-object extractor."""
    classes = ckpt.metadata.get("classes")
    if not classes:
        raise DataError("checkpoint metadata lacks the class list")
    tokens = tokenize_instruction(text, ckpt.vocab, ckpt.config.max_seq_len)[None, :]
    outputs, _ = model_of(ckpt).forward(tokens, train=False)
    return classes[int(outputs["object"][0].argmax())]
