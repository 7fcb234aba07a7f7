"""Synthetic sharp/blurred frame corpus and its benchmark evaluation.

Corpus layout: a directory of P6 PPM images plus `manifest.txt` with one
`<filename> <0|1>` line per file (1 = blurred). Sharp frames are
high-frequency textures; blurred frames are the same textures under a strong
Gaussian blur, which collapses their Laplacian variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import DataError
from .blur import FrameGate, frame_sharpness
from .frames import RawFrame, read_ppm, write_ppm
from .smoothing import DetectionSmoother
from .types import Detection

MANIFEST = "manifest.txt"


def _gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur with reflect padding (channels last)."""
    radius = max(1, int(math.ceil(3.0 * sigma)))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (x / sigma) ** 2)
    kernel /= kernel.sum()

    out = img.astype(np.float64)
    for axis in (0, 1):
        pad = [(0, 0)] * out.ndim
        pad[axis] = (radius, radius)
        padded = np.pad(out, pad, mode="reflect")
        acc = np.zeros_like(out)
        for k, w in enumerate(kernel):
            sl = [slice(None)] * out.ndim
            sl[axis] = slice(k, k + out.shape[axis])
            acc += w * padded[tuple(sl)]
        out = acc
    return np.clip(np.round(out), 0, 255).astype(np.uint8)


def _texture(rng: np.random.Generator, size: int) -> np.ndarray:
    """Sharp synthetic frame: noise plus a few random rectangles."""
    img = rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8)
    for _ in range(4):
        x0, y0 = rng.integers(0, size - 8, size=2)
        w, h = rng.integers(4, size // 2, size=2)
        color = rng.integers(0, 256, size=3, dtype=np.uint8)
        img[y0 : y0 + h, x0 : x0 + w] = color
    return img


def generate_blur_corpus(out_dir: str | Path, n: int = 200,
                         blur_fraction: float = 0.3, seed: int = 0,
                         size: int = 64) -> Path:
    """Write n frames (first one always sharp) and the label manifest."""
    if not 0.0 <= blur_fraction < 1.0:
        raise DataError(f"blur fraction {blur_fraction} outside [0, 1)")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)

    n_blur = int(round(n * blur_fraction))
    labels = np.zeros(n, dtype=int)
    if n_blur:
        # index 0 stays sharp so the gate has a clear frame from the start
        blur_at = rng.choice(np.arange(1, n), size=min(n_blur, n - 1),
                             replace=False)
        labels[blur_at] = 1

    lines = []
    for i in range(n):
        img = _texture(rng, size)
        if labels[i]:
            img = _gaussian_blur(img, sigma=float(rng.uniform(2.5, 4.0)))
        name = f"frame_{i:05d}.ppm"
        write_ppm(out_dir / name, RawFrame(size, size, img, timestamp=i / 15.0))
        lines.append(f"{name} {labels[i]}")
    (out_dir / MANIFEST).write_text("\n".join(lines) + "\n")
    return out_dir / MANIFEST


def load_manifest(corpus_dir: str | Path) -> list[tuple[str, int]]:
    path = Path(corpus_dir) / MANIFEST
    if not path.exists():
        raise DataError(f"no {MANIFEST} in {corpus_dir}")
    entries = []
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        name, _, label = line.rpartition(" ")
        entries.append((name, int(label)))
    return entries


@dataclass
class BlurBenchRow:
    threshold: float
    flagged_fraction: float
    precision: float
    recall: float
    qualified_raw: float
    qualified_gated: float
    mean_conf_raw: float
    mean_conf_gated: float

    def csv_row(self) -> str:
        return ("%.6g,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f" % (
            self.threshold, self.flagged_fraction, self.precision, self.recall,
            self.qualified_raw, self.qualified_gated,
            self.mean_conf_raw, self.mean_conf_gated))


BLUR_CSV_HEADER = ("threshold,flagged_fraction,precision,recall,"
                   "qualified_raw,qualified_gated,mean_conf_raw,mean_conf_gated")


def evaluate_blur_corpus(corpus_dir: str | Path, thresholds: list[float],
                         smoother_window: int = 5) -> list[BlurBenchRow]:
    """Sweep gate thresholds over a labeled corpus.

    qualified_raw is the fraction of corpus frames at or above the threshold;
    qualified_gated is the same fraction over what the gate emits. The
    confidence columns run a stand-in detector confidence (sharpness-driven)
    through the gate plus moving-average smoothing.
    """
    entries = load_manifest(corpus_dir)
    corpus_dir = Path(corpus_dir)
    frames = [read_ppm(corpus_dir / name) for name, _ in entries]
    var = np.array([frame_sharpness(f) for f in frames])
    lab = np.array([label for _, label in entries], dtype=bool)

    rows = []
    for t in sorted(thresholds):
        flagged = var < t
        tp = int((flagged & lab).sum())
        fp = int((flagged & ~lab).sum())
        fn = int((~flagged & lab).sum())
        precision = tp / (tp + fp) if (tp + fp) else 1.0
        recall = tp / (tp + fn) if (tp + fn) else 1.0

        gate = FrameGate(blur_threshold=t) if t > 0 else None
        smoother = DetectionSmoother(window=smoother_window)
        emitted_clear = 0
        conf_raw_sum = 0.0
        conf_gated_sum = 0.0
        for frame, v in zip(frames, var):
            conf_raw_sum += _stand_in_confidence(v, t)
            if gate is None:
                emitted_v = v
            else:
                out_frame, was_blur = gate.gate(frame)
                emitted_v = v if not was_blur else frame_sharpness(out_frame)
            smoothed = smoother.smooth(Detection(
                label="target", confidence=_stand_in_confidence(emitted_v, t),
                center=(0.5, 0.5), size=(0.2, 0.3)))
            conf_gated_sum += smoothed.confidence
            emitted_clear += emitted_v >= t
        rows.append(BlurBenchRow(
            threshold=t,
            flagged_fraction=float(flagged.mean()),
            precision=precision,
            recall=recall,
            qualified_raw=float((var >= t).mean()),
            qualified_gated=emitted_clear / len(entries),
            mean_conf_raw=conf_raw_sum / len(entries),
            mean_conf_gated=conf_gated_sum / len(entries),
        ))
    return rows


def _stand_in_confidence(variance: float, threshold: float) -> float:
    """Sharp frames detect confidently; blurred ones barely at all."""
    if threshold <= 0:
        return 0.9
    return 0.9 if variance >= threshold else 0.1
