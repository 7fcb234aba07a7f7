"""RGB / grayscale frames and binary PPM (P6) I/O."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InvalidFrameError

# ITU-R BT.601 luma weights.
_LUMA = np.array([0.299, 0.587, 0.114])

MIN_SIDE = 3  # the Laplacian stencil needs at least one interior pixel


@dataclass
class RawFrame:
    """One RGB camera frame. Pixels are (height, width, 3) uint8."""

    width: int
    height: int
    pixels: np.ndarray
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if self.width < MIN_SIDE or self.height < MIN_SIDE:
            raise InvalidFrameError(
                f"frame {self.width}x{self.height} below {MIN_SIDE}x{MIN_SIDE}"
            )
        self.pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if self.pixels.shape != (self.height, self.width, 3):
            raise InvalidFrameError(
                f"pixel buffer {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )


@dataclass
class GrayFrame:
    """Luminance frame; values are (height, width) uint8 in [0, 255]."""

    width: int
    height: int
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.ascontiguousarray(self.values, dtype=np.uint8)
        if self.values.shape != (self.height, self.width):
            raise InvalidFrameError(
                f"gray buffer {self.values.shape} does not match "
                f"{self.height}x{self.width}"
            )


def to_grayscale(frame: RawFrame) -> GrayFrame:
    """BT.601 luma conversion, rounded half-up and clamped to [0, 255]."""
    luma = frame.pixels.astype(np.float64) @ _LUMA
    values = np.clip(np.floor(luma + 0.5), 0.0, 255.0).astype(np.uint8)
    return GrayFrame(width=frame.width, height=frame.height, values=values)


def read_ppm(path: str | Path) -> RawFrame:
    """Read a binary PPM (P6, maxval 255) image."""
    data = Path(path).read_bytes()
    fields: list[bytes] = []
    i = 0
    while len(fields) < 4:
        if i >= len(data):
            raise InvalidFrameError(f"{path}: truncated PPM header")
        c = data[i : i + 1]
        if c == b"#":  # comment runs to end of line
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
        elif c.isspace():
            i += 1
        else:
            j = i
            while j < len(data) and not data[j : j + 1].isspace():
                j += 1
            fields.append(data[i:j])
            i = j
    i += 1  # single whitespace after maxval
    magic, w, h, maxval = fields
    if magic != b"P6" or int(maxval) != 255:
        raise InvalidFrameError(f"{path}: expected P6 maxval 255")
    width, height = int(w), int(h)
    raw = np.frombuffer(data, dtype=np.uint8, count=width * height * 3, offset=i)
    return RawFrame(width=width, height=height, pixels=raw.reshape(height, width, 3))


def write_ppm(path: str | Path, frame: RawFrame) -> None:
    """Write a binary PPM (P6, maxval 255) image."""
    header = f"P6\n{frame.width} {frame.height}\n255\n".encode()
    Path(path).write_bytes(header + frame.pixels.tobytes())
