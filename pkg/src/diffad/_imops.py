"""Small deterministic raster primitives shared by mask and synthesis code.

Everything here is plain numpy so results are bit-reproducible across runs
and platforms: separable Gaussian filtering with edge replication, bilinear
sampling with edge clamping, and the resize/affine warps built on top of it.
"""

from __future__ import annotations

import numpy as np


def gaussian_kernel1d(sigma: float, truncate: float = 3.0) -> np.ndarray:
    """Normalized sampled Gaussian, truncated at ``truncate * sigma``."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    radius = int(truncate * sigma + 0.5)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (x / sigma) ** 2)
    return kernel / kernel.sum()


def _convolve_axis0(arr: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    radius = (len(kernel) - 1) // 2
    padded = np.pad(arr, ((radius, radius), (0, 0)), mode="edge")
    out = np.zeros_like(arr, dtype=np.float64)
    for k, w in enumerate(kernel):
        out += w * padded[k : k + arr.shape[0]]
    return out


def gaussian_filter2d(arr: np.ndarray, sigma: float, truncate: float = 3.0) -> np.ndarray:
    """Separable Gaussian filter of a 2-D array with edge-replicated borders."""
    kernel = gaussian_kernel1d(sigma, truncate)
    arr = np.asarray(arr, dtype=np.float64)
    out = _convolve_axis0(arr, kernel)
    out = _convolve_axis0(out.T, kernel).T
    return out


def bilinear_sample(arr: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Sample a (H, W) or (H, W, C) array at float coordinates.

    Coordinates outside the array are clamped to the border (edge
    replication). Returns float64.
    """
    src = np.asarray(arr, dtype=np.float64)
    h, w = src.shape[:2]
    ys = np.clip(ys, 0.0, h - 1.0)
    xs = np.clip(xs, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.intp)
    x0 = np.floor(xs).astype(np.intp)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = ys - y0
    wx = xs - x0
    if src.ndim == 3:
        wy = wy[..., None]
        wx = wx[..., None]
    top = src[y0, x0] * (1.0 - wx) + src[y0, x1] * wx
    bot = src[y1, x0] * (1.0 - wx) + src[y1, x1] * wx
    return top * (1.0 - wy) + bot * wy


def _to_uint8(arr: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(arr), 0, 255).astype(np.uint8)


def resize_bilinear(image: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Resize a uint8 image with bilinear interpolation (pixel-center aligned).

    A same-size resize is an exact identity.
    """
    h, w = image.shape[:2]
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (w / out_w) - 0.5
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    return _to_uint8(bilinear_sample(image, yy, xx))


def affine_sample(image: np.ndarray, dx: float, dy: float, scale: float) -> np.ndarray:
    """Warp a uint8 image: scale about the center, then translate by (dx, dy).

    Out-of-frame regions are filled by edge replication. With dx = dy = 0 and
    scale = 1 the warp is an exact identity.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    h, w = image.shape[:2]
    cy = (h - 1) / 2.0
    cx = (w - 1) / 2.0
    yo, xo = np.meshgrid(
        np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij"
    )
    ys = (yo - cy - dy) / scale + cy
    xs = (xo - cx - dx) / scale + cx
    return _to_uint8(bilinear_sample(image, ys, xs))
