import numpy as np
import pytest

from objnav.errors import ConfigError, DataError
from objnav.model.config import ModelConfig, ioe_config
from objnav.model.data import load_training_arrays
from objnav.model.network import Model
from objnav.model.train import TrainSettings, evaluate, split_indices, train

SMOKE = ModelConfig(feature_dim=32, layers=1, heads=2, feedforward_dim=64,
                    dropout=0.1, max_seq_len=64)


@pytest.fixture(scope="module")
def arrays(small_corpus, vocab):
    return load_training_arrays(small_corpus, vocab, SMOKE, limit=2500)


def test_split_is_four_to_one():
    train_idx, val_idx = split_indices(1000, seed=3)
    assert len(val_idx) == 200 and len(train_idx) == 800
    assert set(train_idx) | set(val_idx) == set(range(1000))
    assert not set(train_idx) & set(val_idx)


def test_split_is_seeded():
    a = split_indices(500, seed=1)
    b = split_indices(500, seed=1)
    c = split_indices(500, seed=2)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
    assert not np.array_equal(a[1], c[1])


def test_training_beats_initialization(arrays, vocab):
    settings = TrainSettings(epochs=2, batch_size=256, seed=9)
    init_model = Model(SMOKE, len(vocab), seed=9)
    _, val_idx = split_indices(len(arrays["tokens"]), 9)
    init_loss, _, _ = evaluate(init_model, arrays, val_idx, beta=10.0)
    result = train(arrays, SMOKE, vocab, settings)
    assert result.best.val_loss < init_loss


def test_small_preset_three_epoch_smoke(vocab, tmp_path):
    """10k samples, small preset, 3 epochs: beats the initialized model."""
    from objnav.datagen import generate_dataset
    from objnav.model.config import preset

    corpus = tmp_path / "smoke10k.jsonl"
    generate_dataset(10_000, seed=23, out_path=corpus)
    config = preset("small")
    data = load_training_arrays(corpus, vocab, config)
    init_model = Model(config, len(vocab), seed=23)
    _, val_idx = split_indices(len(data["tokens"]), 23)
    init_loss, _, _ = evaluate(init_model, data, val_idx, beta=10.0)
    result = train(data, config, vocab, TrainSettings(epochs=3, seed=23))
    assert result.best.val_loss < init_loss
    assert all(np.isfinite(e.val_loss) for e in result.history)


def test_training_is_reproducible(arrays, vocab):
    settings = TrainSettings(epochs=1, batch_size=256, seed=17)
    a = train(arrays, SMOKE, vocab, settings)
    b = train(arrays, SMOKE, vocab, settings)
    assert a.history[-1].val_loss == b.history[-1].val_loss
    assert a.history[-1].train_loss == b.history[-1].train_loss
    for name, arr in a.checkpoint.params.items():
        assert np.array_equal(arr, b.checkpoint.params[name]), name


def test_training_log_format(arrays, vocab, tmp_path):
    log = tmp_path / "train.csv"
    settings = TrainSettings(epochs=1, batch_size=512, seed=2, log_path=log)
    train(arrays, SMOKE, vocab, settings)
    lines = log.read_text().splitlines()
    assert lines[0] == "# seed=2"
    assert lines[1] == "epoch,train_loss,val_loss,val_state_acc"
    assert len(lines) == 3
    epoch, tl, vl, acc = lines[2].split(",")
    assert int(epoch) == 1 and float(tl) > 0 and float(vl) > 0
    assert 0.0 <= float(acc) <= 1.0


def test_best_checkpoint_has_lowest_val_loss(arrays, vocab):
    settings = TrainSettings(epochs=3, batch_size=256, seed=5)
    result = train(arrays, SMOKE, vocab, settings)
    best = min(e.val_loss for e in result.history)
    assert result.checkpoint.metadata["best_val_loss"] == pytest.approx(best)
    assert result.best.val_loss == pytest.approx(best)


def test_beta_must_be_positive():
    with pytest.raises(ConfigError):
        TrainSettings(beta=0.0)
    with pytest.raises(ConfigError):
        TrainSettings(beta=-1.0)


def test_empty_dataset_rejected(vocab):
    with pytest.raises(DataError):
        train({"tokens": np.zeros((1, 64), dtype=np.int32),
               "motion": np.zeros((1, 3)), "mission": np.zeros(1, dtype=int),
               "search": np.zeros(1, dtype=int)}, SMOKE, vocab)


def test_ioe_head_trains_with_same_trainer(vocab, lexicon):
    """The extractor reuses the trainer with a single classification head."""
    from objnav.datagen.templates import InstructionTemplate, SPEED_GRID, \
        vary_instruction
    from objnav.model.vocab import tokenize_instruction

    cfg = ioe_config(len(lexicon.classes), feature_dim=32, layers=1, heads=2,
                     feedforward_dim=64)
    template = InstructionTemplate(lexicon=lexicon)
    rng = np.random.default_rng(0)
    n = 3000
    tokens = np.zeros((n, cfg.max_seq_len), dtype=np.int32)
    labels = np.zeros(n, dtype=np.int64)
    for i in range(n):
        cls_idx = i % len(lexicon.classes)
        speed = SPEED_GRID[int(rng.integers(len(SPEED_GRID)))]
        text = vary_instruction(template, lexicon.classes[cls_idx], speed, rng)
        tokens[i] = tokenize_instruction(text, vocab, cfg.max_seq_len)
        labels[i] = cls_idx
    data = {"tokens": tokens, "object": labels}
    init_model = Model(cfg, len(vocab), seed=1)
    _, val_idx = split_indices(n, 1)
    init_loss, _, _ = evaluate(init_model, data, val_idx, beta=1.0)
    result = train(data, cfg, vocab, TrainSettings(epochs=4, batch_size=128,
                                                   beta=1.0, seed=1))
    assert result.best.val_loss < init_loss
