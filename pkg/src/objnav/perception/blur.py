"""Laplacian-variance sharpness scoring and the blur gate.

Blurred frames score low because blur suppresses the high-frequency content
the Laplacian responds to. The gate replaces any frame scoring below its
threshold with the last clear frame so downstream detection never sees a
smeared image.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .frames import GrayFrame, RawFrame, to_grayscale

# 4-neighbor Laplacian stencil: [[0,1,0],[1,-4,1],[0,1,0]]
DEFAULT_BLUR_THRESHOLD = 150.0


def laplacian_variance(gray: GrayFrame) -> float:
    """Population variance of the Laplacian response over interior pixels.

    Border pixels are excluded rather than padded; padding would bias the
    variance on small frames.
    """
    g = gray.values.astype(np.float64)
    resp = (
        g[:-2, 1:-1] + g[2:, 1:-1] + g[1:-1, :-2] + g[1:-1, 2:] - 4.0 * g[1:-1, 1:-1]
    )
    return float(resp.var())


def frame_sharpness(frame: RawFrame) -> float:
    """Laplacian variance of a frame's grayscale conversion."""
    return laplacian_variance(to_grayscale(frame))


@dataclass
class GateStats:
    total: int = 0
    blurred: int = 0

    @property
    def blurred_ratio(self) -> float:
        return self.blurred / self.total if self.total else 0.0


@dataclass
class FrameGate:
    """Replaces blurred frames (variance strictly below the threshold) with
    the last clear frame.

    Before any clear frame has been seen, a blurred frame passes through
    unchanged (dropping it would stall the pipeline) but still counts as
    blurred in the stats.
    """

    blur_threshold: float = DEFAULT_BLUR_THRESHOLD
    last_clear: RawFrame | None = None
    stats: GateStats = field(default_factory=GateStats)

    def __post_init__(self) -> None:
        if self.blur_threshold <= 0:
            raise ValueError("blur threshold must be positive")

    def gate(self, frame: RawFrame) -> tuple[RawFrame, bool]:
        """Return (frame to use, was_blurred)."""
        self.stats.total += 1
        if frame_sharpness(frame) < self.blur_threshold:
            self.stats.blurred += 1
            if self.last_clear is None:
                return frame, True  # startup pass-through
            return self.last_clear, True
        self.last_clear = frame
        return frame, False
