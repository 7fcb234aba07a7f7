import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from objnav.errors import InvalidFrameError
from objnav.perception import (Detection, DetectionSmoother, FrameGate,
                               GrayFrame, RawFrame, laplacian_variance,
                               read_ppm, to_grayscale, write_ppm)


def frame_of(pixels, ts=0.0):
    arr = np.asarray(pixels, dtype=np.uint8)
    return RawFrame(width=arr.shape[1], height=arr.shape[0], pixels=arr,
                    timestamp=ts)


def solid(r, g, b, side=4):
    return frame_of(np.full((side, side, 3), (r, g, b), dtype=np.uint8))


# ------------------------------------------------------------------ grayscale

def test_grayscale_black_is_zero():
    assert (to_grayscale(solid(0, 0, 0)).values == 0).all()


def test_grayscale_white_saturates():
    assert (to_grayscale(solid(255, 255, 255)).values == 255).all()


def test_grayscale_pure_red_is_76():
    # round(0.299 * 255) under BT.601 weights
    assert (to_grayscale(solid(255, 0, 0)).values == 76).all()


def test_too_small_frame_rejected():
    with pytest.raises(InvalidFrameError):
        RawFrame(width=2, height=2, pixels=np.zeros((2, 2, 3), dtype=np.uint8))


def test_pixel_buffer_shape_checked():
    with pytest.raises(InvalidFrameError):
        RawFrame(width=4, height=4, pixels=np.zeros((4, 3, 3), dtype=np.uint8))


# ----------------------------------------------------------------- sharpness

def gray_of(values):
    arr = np.asarray(values, dtype=np.uint8)
    return GrayFrame(width=arr.shape[1], height=arr.shape[0], values=arr)


def brute_force_laplacian_variance(values) -> float:
    """Independent oracle: double-loop convolution + two-pass variance."""
    g = [[int(v) for v in row] for row in values]
    resp = []
    for y in range(1, len(g) - 1):
        for x in range(1, len(g[0]) - 1):
            resp.append(g[y - 1][x] + g[y + 1][x] + g[y][x - 1] + g[y][x + 1]
                        - 4 * g[y][x])
    mean = sum(resp) / len(resp)
    return sum((r - mean) ** 2 for r in resp) / len(resp)


FIXED_4X4 = [[12, 200, 31, 44],
             [99, 150, 7, 63],
             [5, 255, 88, 120],
             [61, 9, 170, 33]]


def test_constant_frame_has_zero_variance():
    assert laplacian_variance(gray_of(np.full((5, 5), 77))) == 0.0


def test_fixed_4x4_matches_brute_force_oracle():
    # value computed by the oracle above and frozen
    assert brute_force_laplacian_variance(FIXED_4X4) == 175202.1875
    assert laplacian_variance(gray_of(FIXED_4X4)) == pytest.approx(
        175202.1875, abs=1e-9)


@given(st.integers(min_value=0, max_value=100), st.integers(0, 2 ** 32 - 1))
@settings(max_examples=40, deadline=None)
def test_uniform_offset_invariance(offset, seed):
    base = np.random.default_rng(seed).integers(0, 150, size=(6, 7))
    v0 = laplacian_variance(gray_of(base))
    v1 = laplacian_variance(gray_of(base + offset))
    assert v1 == pytest.approx(v0, rel=1e-12, abs=1e-9)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=30, deadline=None)
def test_variance_nonnegative(seed):
    img = np.random.default_rng(seed).integers(0, 256, size=(5, 5))
    assert laplacian_variance(gray_of(img)) >= 0.0


# ---------------------------------------------------------------------- gate

def noisy_frame(seed, side=16):
    rng = np.random.default_rng(seed)
    return frame_of(rng.integers(0, 256, size=(side, side, 3), dtype=np.uint8))


def test_sharp_frame_passes_through():
    gate = FrameGate(blur_threshold=150.0)
    frame = noisy_frame(1)
    out, blurred = gate.gate(frame)
    assert out is frame and not blurred
    assert gate.stats.total == 1 and gate.stats.blurred == 0


def test_blurred_frame_replaced_by_last_clear():
    gate = FrameGate(blur_threshold=150.0)
    sharp = noisy_frame(2)
    gate.gate(sharp)
    blurry = solid(40, 40, 40, side=16)  # constant: variance 0 < 150
    out, blurred = gate.gate(blurry)
    assert blurred and out is sharp
    assert gate.stats.blurred == 1 and gate.stats.total == 2


def test_startup_blurred_passes_through_but_counts():
    gate = FrameGate(blur_threshold=150.0)
    blurry = solid(40, 40, 40, side=16)
    out, blurred = gate.gate(blurry)
    assert blurred and out is blurry
    assert gate.stats.blurred == 1


def test_clean_stream_never_substitutes():
    gate = FrameGate(blur_threshold=150.0)
    for i in range(10):
        _, blurred = gate.gate(noisy_frame(i))
        assert not blurred
    assert gate.stats.blurred == 0 and gate.stats.total == 10


def test_threshold_comparison_is_strict():
    frame = noisy_frame(3)
    from objnav.perception.blur import frame_sharpness

    v = frame_sharpness(frame)
    at = FrameGate(blur_threshold=v)       # variance == threshold: clear
    _, blurred = at.gate(frame)
    assert not blurred
    above = FrameGate(blur_threshold=v + 1e-9)
    _, blurred = above.gate(frame)
    assert blurred


def test_gate_requires_positive_threshold():
    with pytest.raises(ValueError):
        FrameGate(blur_threshold=0.0)


# ------------------------------------------------------------------ smoother

def det(conf, x=0.5, y=0.5, w=0.2, h=0.3, label="chair"):
    return Detection(label=label, confidence=conf, center=(x, y), size=(w, h))


def test_single_detection_unchanged():
    s = DetectionSmoother(window=5)
    d = det(0.7, x=0.3, y=0.6, w=0.1, h=0.2)
    assert s.smooth(d) == d


def test_two_point_mean():
    s = DetectionSmoother(window=2)
    s.smooth(det(0.6))
    out = s.smooth(det(0.8))
    assert out.confidence == pytest.approx(0.7)


def test_identical_detections_fixed_point():
    s = DetectionSmoother(window=5)
    d = det(0.5, x=0.4)
    for _ in range(5):
        out = s.smooth(d)
    assert out == d


def test_window_eviction():
    s = DetectionSmoother(window=2)
    for c in (0.2, 0.4, 0.9):
        out = s.smooth(det(c))
    assert out.confidence == pytest.approx((0.4 + 0.9) / 2)


def test_none_resets_buffer():
    s = DetectionSmoother(window=5)
    s.smooth(det(0.2))
    assert s.smooth(None) is None
    out = s.smooth(det(0.9))
    assert out.confidence == pytest.approx(0.9)


def test_label_change_resets_buffer():
    s = DetectionSmoother(window=5)
    s.smooth(det(0.2, label="chair"))
    out = s.smooth(det(0.9, label="person"))
    assert out.confidence == pytest.approx(0.9)
    assert all(d.label == "person" for d in s.buffer)


@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1,
                max_size=12))
@settings(max_examples=50, deadline=None)
def test_smoothed_values_stay_within_buffer_extremes(confs):
    s = DetectionSmoother(window=5)
    for c in confs:
        out = s.smooth(det(c))
    window = confs[-5:]
    assert min(window) - 1e-12 <= out.confidence <= max(window) + 1e-12


# ----------------------------------------------------------------------- ppm

def test_ppm_round_trip(tmp_path):
    frame = noisy_frame(9, side=8)
    path = tmp_path / "f.ppm"
    write_ppm(path, frame)
    back = read_ppm(path)
    assert back.width == 8 and back.height == 8
    assert np.array_equal(back.pixels, frame.pixels)


def test_ppm_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.ppm"
    path.write_bytes(b"P5\n4 4\n255\n" + bytes(16))
    with pytest.raises(InvalidFrameError):
        read_ppm(path)
