"""Frame stabilization: blur gating and detection smoothing."""

from .frames import GrayFrame, RawFrame, read_ppm, to_grayscale, write_ppm
from .types import Detection
from .blur import FrameGate, GateStats, laplacian_variance
from .smoothing import DetectionSmoother

__all__ = [
    "Detection",
    "DetectionSmoother",
    "FrameGate",
    "GateStats",
    "GrayFrame",
    "RawFrame",
    "laplacian_variance",
    "read_ppm",
    "to_grayscale",
    "write_ppm",
]
