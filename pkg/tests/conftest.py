import numpy as np
import pytest

from diffad.demo import make_corpus
from diffad.manifest import load_manifest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A tiny rendered corpus (6 videos x 12 frames) for pipeline/CLI tests."""
    root = tmp_path_factory.mktemp("small_corpus")
    manifest_path = make_corpus(root, n_videos=6, n_frames=12, seed=7)
    return manifest_path


@pytest.fixture(scope="session")
def small_corpus_records(small_corpus):
    return load_manifest(small_corpus)
