"""Moving-average smoothing of the detection stream."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .types import Detection

DEFAULT_WINDOW = 5  # ~0.33 s at a 15 Hz camera


@dataclass
class DetectionSmoother:
    """Component-wise moving average over the last `window` detections.

    The buffer only ever holds detections of one class; a label change or a
    missing detection resets it, so stale boxes never leak across target-loss
    gaps or class switches.
    """

    window: int = DEFAULT_WINDOW
    buffer: deque[Detection] = field(default_factory=deque)

    def __post_init__(self) -> None:
        if self.window < 1:
            raise ValueError("window must be a positive integer")

    def smooth(self, det: Detection | None) -> Detection | None:
        if det is None:
            self.buffer.clear()
            return None
        if self.buffer and self.buffer[-1].label != det.label:
            self.buffer.clear()
        self.buffer.append(det)
        while len(self.buffer) > self.window:
            self.buffer.popleft()
        n = len(self.buffer)
        return Detection(
            label=det.label,
            confidence=sum(d.confidence for d in self.buffer) / n,
            center=(
                sum(d.center[0] for d in self.buffer) / n,
                sum(d.center[1] for d in self.buffer) / n,
            ),
            size=(
                sum(d.size[0] for d in self.buffer) / n,
                sum(d.size[1] for d in self.buffer) / n,
            ),
        )

    def reset(self) -> None:
        self.buffer.clear()
