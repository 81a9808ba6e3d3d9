"""Input validation helpers shared across the toolkit."""

from __future__ import annotations

import numpy as np


def check_image(image, size: int | None = None) -> np.ndarray:
    """Validate an RGB image: uint8 array of shape (H, W, 3).

    Float inputs are rejected so that pre-normalized images can never be fed
    to code that expects raw [0, 255] pixel values.
    """
    arr = np.asarray(image)
    if arr.dtype != np.uint8:
        raise ValueError(
            f"expected a uint8 image with values in [0, 255], got dtype {arr.dtype}; "
            "pre-normalized float images are not accepted"
        )
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) image, got shape {arr.shape}")
    if size is not None and arr.shape[:2] != (size, size):
        raise ValueError(
            f"expected a {size}x{size} image, got {arr.shape[1]}x{arr.shape[0]}"
        )
    return arr


def check_landmarks(points) -> np.ndarray:
    """Validate a 68-point landmark set and return it as a float64 (68, 2) array."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape != (68, 2):
        raise ValueError(f"expected 68 (x, y) landmarks, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("landmark coordinates must be finite")
    return pts


def check_matrix(X, name: str = "X") -> np.ndarray:
    """Validate a 2-D finite float64 feature matrix."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_vector(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    """Validate a 1-D finite float64 vector, optionally of a fixed length."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-D vector, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} must have length {dim}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_rng(seed) -> np.random.Generator:
    """Turn an int, SeedSequence or Generator into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
