"""Model architecture configuration and the named presets."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError

# head layout: (name, kind, output size); kind is "regression" or "classify"
MOTION_HEADS: tuple[tuple[str, str, int], ...] = (
    ("motion", "regression", 3),
    ("mission", "classify", 2),
    ("search", "classify", 2),
)


@dataclass
class ModelConfig:
    feature_dim: int = 256
    layers: int = 4
    heads: int = 8
    feedforward_dim: int = 1024
    dropout: float = 0.1
    max_seq_len: int = 64
    output_heads: tuple[tuple[str, str, int], ...] = MOTION_HEADS
    use_sep: bool = True  # ablation switch: drop [SEP] tokens from encodings
    dtype: str = "float32"

    def __post_init__(self) -> None:
        if self.feature_dim % self.heads != 0:
            raise ConfigError(
                f"feature_dim {self.feature_dim} not divisible by {self.heads} heads"
            )
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout {self.dropout} outside [0, 1)")

    @property
    def head_dim(self) -> int:
        return self.feature_dim // self.heads

    def param_count(self, vocab_size: int) -> int:
        """Exact parameter count for a given vocabulary size."""
        d, ff = self.feature_dim, self.feedforward_dim
        per_layer = (
            3 * d * d + 3 * d      # qkv projection
            + d * d + d            # attention output projection
            + d * ff + ff          # feedforward in
            + ff * d + d           # feedforward out
            + 4 * d                # two layernorms
        )
        total = vocab_size * d + self.max_seq_len * d  # token + position embeddings
        total += self.layers * per_layer
        total += 2 * d  # final layernorm
        for _, _, size in self.output_heads:
            total += d * size + size
        return total

    def to_dict(self) -> dict:
        return {
            "feature_dim": self.feature_dim,
            "layers": self.layers,
            "heads": self.heads,
            "feedforward_dim": self.feedforward_dim,
            "dropout": self.dropout,
            "max_seq_len": self.max_seq_len,
            "output_heads": [list(h) for h in self.output_heads],
            "use_sep": self.use_sep,
            "dtype": self.dtype,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        d = dict(d)
        d["output_heads"] = tuple(tuple(h) for h in d["output_heads"])
        return cls(**d)


# Parameter targets for the motion-model presets: small ~0.47M, base ~3.30M,
# large ~25.51M (with the default ~560-token vocabulary).
_PRESETS: dict[str, dict] = {
    "tiny": dict(feature_dim=16, layers=1, heads=2, feedforward_dim=32,
                 dropout=0.0, max_seq_len=64),
    "small": dict(feature_dim=128, layers=2, heads=4, feedforward_dim=512),
    "base": dict(feature_dim=256, layers=4, heads=8, feedforward_dim=1024),
    "large": dict(feature_dim=512, layers=8, heads=8, feedforward_dim=2048),
}


def preset(name: str, **overrides) -> ModelConfig:
    """Named motion-model preset. Overrides are applied on top."""
    if name not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(_PRESETS)}")
    kwargs = dict(_PRESETS[name])
    kwargs.update(overrides)
    return ModelConfig(**kwargs)


def ioe_config(num_classes: int, **overrides) -> ModelConfig:
    """Instruction-object-extractor architecture: a reduced encoder with a
    single classification head over the lexicon."""
    kwargs = dict(
        feature_dim=64,
        layers=2,
        heads=4,
        feedforward_dim=256,
        max_seq_len=24,
        output_heads=(("object", "classify", num_classes),),
    )
    kwargs.update(overrides)
    return ModelConfig(**kwargs)
