"""Face-embedding extraction.

The pipeline treats extractors as pluggable producers of d-dimensional
vectors. Two kinds are supported:

* ``toy``: a deterministic, dependency-free extractor built from 8x8 grid
  statistics (below), dim 448, so the whole pipeline runs and is testable
  without any neural network.
* ``external``: embeddings computed by an outside tool and supplied as a
  binary embedding file; this module validates and loads them.

Toy embedding layout (fixed): the image is normalized per channel with
mean 0.5 / std 0.5, split into an 8x8 grid of 28x28 cells, and flattened
row-major. Components 0..383 hold, per cell, the 6-vector
[meanR, meanG, meanB, stdR, stdG, stdB]; components 384..447 hold, per
cell, the mean absolute 4-neighbor Laplacian of the grayscale (luma
0.299/0.587/0.114), edge-replicated at the image border.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_image
from .manifest import EmbeddingStore, VideoRecord, read_embeddings

TOY_DIM = 448
_GRID = 8
_CELL = 28
_LUMA = np.array([0.299, 0.587, 0.114])


def normalize_image(image: np.ndarray) -> np.ndarray:
    """Map uint8 [0, 255] pixels to float64 in [-1, 1] (mean 0.5, std 0.5)."""
    img = check_image(image)
    return (img.astype(np.float64) / 255.0 - 0.5) / 0.5


def toy_extract(image: np.ndarray) -> np.ndarray:
    """Deterministic 448-dim embedding of a 224x224 face crop."""
    img = check_image(image, size=_GRID * _CELL)

    # statistics over raw integer values, rescaled to normalized units
    # afterwards: constant cells then give exactly zero std
    raw = img.astype(np.float64)
    cells = raw.reshape(_GRID, _CELL, _GRID, _CELL, 3)
    means = cells.mean(axis=(1, 3)) * (2.0 / 255.0) - 1.0   # (8, 8, 3)
    stds = cells.std(axis=(1, 3)) * (2.0 / 255.0)           # (8, 8, 3), population std

    norm = normalize_image(img)
    gray = norm @ _LUMA
    padded = np.pad(gray, 1, mode="edge")
    lap = (
        padded[:-2, 1:-1]
        + padded[2:, 1:-1]
        + padded[1:-1, :-2]
        + padded[1:-1, 2:]
        - 4.0 * gray
    )
    lap_cells = np.abs(lap).reshape(_GRID, _CELL, _GRID, _CELL).mean(axis=(1, 3))

    stats = np.concatenate([means, stds], axis=-1).reshape(-1)   # per cell [m, m, m, s, s, s]
    return np.concatenate([stats, lap_cells.reshape(-1)])


class GridStatsExtractor(TransformerMixin, BaseEstimator):
    """Stateless sklearn transformer wrapping toy_extract.

    transform() maps an (n, 224, 224, 3) uint8 stack (or an iterable of
    images) to an (n, 448) float64 embedding matrix. A function of pixel
    values only; fit() is a no-op.
    """

    dim = TOY_DIM

    def fit(self, X, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        return np.stack([toy_extract(img) for img in X])


@dataclass
class ExtractorSpec:
    """Which extractor produces embeddings, and at what dimensionality."""

    kind: str = "toy"
    dim: int = TOY_DIM
    external_path: str | None = None

    def __post_init__(self):
        if self.kind not in ("toy", "external"):
            raise ValueError(f"extractor kind must be 'toy' or 'external', got {self.kind!r}")
        if self.kind == "toy" and self.dim != TOY_DIM:
            raise ValueError(f"toy extractor dim is fixed at {TOY_DIM}")
        if self.kind == "external" and not self.external_path:
            raise ValueError("external extractor requires external_path")
        if self.dim <= 0:
            raise ValueError("dim must be positive")


def read_frame(path) -> np.ndarray:
    """Load an image file as an (H, W, 3) uint8 RGB array."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def extract_all(records: list[VideoRecord], spec: ExtractorSpec) -> EmbeddingStore:
    """Produce one embedding per (video, frame) for every record.

    Toy extraction walks frames in sorted (video_id, frame_index) order so
    reruns are bit-identical. For external specs, the supplied embedding
    file is loaded and checked for full coverage and dimension.
    """
    if spec.kind == "external":
        store = read_embeddings(spec.external_path, expect_dim=spec.dim)
        for rec in records:
            for idx in range(rec.n_frames):
                if (rec.video_id, idx) not in store.entries:
                    raise KeyError(
                        f"external embeddings missing video '{rec.video_id}' frame {idx}"
                    )
        return store

    store = EmbeddingStore(dim=TOY_DIM)
    for rec in sorted(records, key=lambda r: r.video_id):
        for idx, frame_path in enumerate(rec.frame_paths):
            frame = read_frame(frame_path)
            store.put(rec.video_id, idx, toy_extract(frame).astype(np.float32))
    return store
