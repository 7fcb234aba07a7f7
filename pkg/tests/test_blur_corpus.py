import pytest

from objnav.errors import DataError
from objnav.perception import read_ppm
from objnav.perception.blur import frame_sharpness
from objnav.perception.corpus import (evaluate_blur_corpus,
                                      generate_blur_corpus, load_manifest)


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    d = tmp_path_factory.mktemp("blur") / "corpus"
    generate_blur_corpus(d, n=120, blur_fraction=0.3, seed=5)
    return d


def test_manifest_labels_and_count(corpus):
    entries = load_manifest(corpus)
    assert len(entries) == 120
    blurred = sum(label for _, label in entries)
    assert blurred == round(120 * 0.3)
    assert entries[0][1] == 0  # first frame stays sharp for the gate


def test_labels_match_sharpness_at_150(corpus):
    for name, label in load_manifest(corpus):
        v = frame_sharpness(read_ppm(corpus / name))
        assert (v < 150.0) == bool(label)


def test_generation_is_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    generate_blur_corpus(a, n=30, blur_fraction=0.4, seed=9)
    generate_blur_corpus(b, n=30, blur_fraction=0.4, seed=9)
    assert (a / "manifest.txt").read_text() == (b / "manifest.txt").read_text()
    for name, _ in load_manifest(a):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_sweep_rows_sorted_and_zero_threshold_passes_everything(corpus):
    rows = evaluate_blur_corpus(corpus, [250, 0, 150])
    assert [r.threshold for r in rows] == [0, 150, 250]
    assert rows[0].qualified_raw == 1.0          # nothing below zero variance
    assert rows[0].flagged_fraction == 0.0


def test_gating_restores_qualified_ratio(corpus):
    (row,) = evaluate_blur_corpus(corpus, [150.0])
    assert row.precision >= 0.99 and row.recall >= 0.99
    assert row.qualified_gated - row.qualified_raw >= 0.3 - 1e-9
    assert row.mean_conf_gated > row.mean_conf_raw


def test_gate_stats_match_benchmark_blur_ratio(corpus):
    """Gate stats and the manifest agree on the blurred fraction."""
    from objnav.perception import FrameGate

    gate = FrameGate(blur_threshold=150.0)
    entries = load_manifest(corpus)
    for name, _ in entries:
        gate.gate(read_ppm(corpus / name))
    truth = sum(label for _, label in entries) / len(entries)
    assert gate.stats.blurred_ratio == pytest.approx(truth)
    (row,) = evaluate_blur_corpus(corpus, [150.0])
    assert 1.0 - row.qualified_raw == pytest.approx(gate.stats.blurred_ratio)


def test_bad_fraction_rejected(tmp_path):
    with pytest.raises(DataError):
        generate_blur_corpus(tmp_path / "x", n=10, blur_fraction=1.0)


def test_missing_manifest_rejected(tmp_path):
    with pytest.raises(DataError):
        load_manifest(tmp_path)
