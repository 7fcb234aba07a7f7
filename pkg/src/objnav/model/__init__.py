"""Language-to-motion sequence model: vocabulary, network, training, metrics."""

from .config import ModelConfig, preset
from .vocab import EncoderInput, TokenVocab, build_vocab, bucket_token, tokenize
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .losses import motion_loss, state_loss

__all__ = [
    "Checkpoint",
    "EncoderInput",
    "ModelConfig",
    "TokenVocab",
    "build_vocab",
    "bucket_token",
    "load_checkpoint",
    "motion_loss",
    "preset",
    "save_checkpoint",
    "state_loss",
    "tokenize",
]
