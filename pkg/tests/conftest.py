import numpy as np
import pytest

from objnav.lexicon import default_lexicon
from objnav.model import build_vocab


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def vocab(lexicon):
    return build_vocab(lexicon)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A 6k-sample corpus shared by the cheaper integration tests."""
    from objnav.datagen import generate_dataset

    path = tmp_path_factory.mktemp("corpus") / "corpus6k.jsonl"
    generate_dataset(6000, seed=7, out_path=path)
    return path


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
