"""Normalized detection result, the unit of perception."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Detection:
    """One open-vocabulary detection in normalized image coordinates.

    All geometric values and the confidence live in [0, 1]; the center is
    (x, y) with x = 0.5 meaning straight ahead of the camera.
    """

    label: str
    confidence: float
    center: tuple[float, float]
    size: tuple[float, float]

    def __post_init__(self) -> None:
        vals = (self.confidence, *self.center, *self.size)
        if not all(0.0 <= v <= 1.0 for v in vals):
            raise ValueError(f"detection fields outside [0, 1]: {self}")

    @property
    def x(self) -> float:
        return self.center[0]

    @property
    def y(self) -> float:
        return self.center[1]

    @property
    def width(self) -> float:
        return self.size[0]

    @property
    def height(self) -> float:
        return self.size[1]
