"""Versioned binary checkpoint container.

Layout: magic bytes "L2MM", little-endian uint32 format version, uint64
header length, UTF-8 JSON header (config, vocabulary, metadata, per-tensor
shape/offset table), then raw little-endian float32 tensor data at the
stated offsets.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import DataError
from .config import ModelConfig
from .vocab import TokenVocab

MAGIC = b"L2MM"
FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    config: ModelConfig
    vocab: TokenVocab
    params: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        from .network import init_params

        expected = init_params(self.config, len(self.vocab), seed=0)
        if set(expected) != set(self.params):
            missing = set(expected) ^ set(self.params)
            raise DataError(f"parameter names inconsistent with config: {missing}")
        for name, ref in expected.items():
            if self.params[name].shape != ref.shape:
                raise DataError(
                    f"tensor {name}: shape {self.params[name].shape} != "
                    f"{ref.shape} required by config"
                )


def save_checkpoint(path: str | Path, ckpt: Checkpoint) -> None:
    names = sorted(ckpt.params)
    table = []
    offset = 0
    for name in names:
        arr = ckpt.params[name]
        size = int(arr.size) * 4
        table.append({"name": name, "shape": list(arr.shape), "offset": offset,
                      "size": size})
        offset += size
    header = {
        "config": ckpt.config.to_dict(),
        "vocab": ckpt.vocab.tokens,
        "metadata": ckpt.metadata,
        "tensors": table,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", FORMAT_VERSION))
        f.write(struct.pack("<Q", len(blob)))
        f.write(blob)
        for name in names:
            f.write(np.ascontiguousarray(ckpt.params[name], dtype="<f4").tobytes())


def load_checkpoint(path: str | Path) -> Checkpoint:
    data = Path(path).read_bytes()
    if data[:4] != MAGIC:
        raise DataError(f"{path}: bad magic {data[:4]!r}")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != FORMAT_VERSION:
        raise DataError(f"{path}: unsupported format version {version}")
    (hlen,) = struct.unpack_from("<Q", data, 8)
    header = json.loads(data[16 : 16 + hlen].decode("utf-8"))
    base = 16 + hlen
    config = ModelConfig.from_dict(header["config"])
    dtype = np.float64 if config.dtype == "float64" else np.float32
    params: dict[str, np.ndarray] = {}
    for entry in header["tensors"]:
        arr = np.frombuffer(
            data, dtype="<f4", count=entry["size"] // 4,
            offset=base + entry["offset"],
        )
        params[entry["name"]] = arr.reshape(entry["shape"]).astype(dtype)
    return Checkpoint(
        config=config,
        vocab=TokenVocab(tokens=list(header["vocab"])),
        params=params,
        metadata=header.get("metadata", {}),
    )
