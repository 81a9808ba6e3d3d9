"""Blending-mask construction from facial landmarks.

A mask is built as the convex hull of a landmark subset, rasterized to a
binary grid, shape-perturbed by elastic deformation, softened by Gaussian
smoothing and finally scaled by a blend ratio.

The four schemes select documented subsets of the standard 68-point
annotation (jaw 0-16, eyebrows 17-26, nose 27-35, eyes 36-47, mouth 48-67):

* FULL_FACE: all indices 0-67
* EYE_REGION: eyebrows 17-26 plus eyes 36-47 (22 points)
* MOUTH_NOSE_JAW: lower jaw 4-12, mouth 48-67 and nose apex 33 (30 points)
* JAWLINE_NOSE: full jawline 0-16 plus nose tip block 30-35 (23 points)

Masks are (H, W) float64 grids; ``mask[y, x]`` weights the source image at
that pixel. All operations are pure functions of their inputs (seeded
randomness is an explicit argument), so they are safe for parallel use.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from ._imops import bilinear_sample, gaussian_filter2d
from ._validation import as_rng, check_landmarks


class DegenerateGeometryError(ValueError):
    """Raised when a convex hull is requested for collinear or too few points."""


class MaskScheme(Enum):
    FULL_FACE = "full-face"
    EYE_REGION = "eye-region"
    MOUTH_NOSE_JAW = "mouth-nose-jaw"
    JAWLINE_NOSE = "jawline-nose"


SCHEME_LANDMARK_INDICES: dict[MaskScheme, tuple[int, ...]] = {
    MaskScheme.FULL_FACE: tuple(range(68)),
    MaskScheme.EYE_REGION: tuple(range(17, 27)) + tuple(range(36, 48)),
    MaskScheme.MOUTH_NOSE_JAW: tuple(range(4, 13)) + tuple(range(48, 68)) + (33,),
    MaskScheme.JAWLINE_NOSE: tuple(range(0, 17)) + tuple(range(30, 36)),
}

# Defaults for the deformation/smoothing stage at 224x224.
DEFAULT_DEFORM_ALPHA = 50.0
DEFAULT_DEFORM_SIGMA = 7.0
DEFAULT_SMOOTH_SIGMA = 5.0
BLEND_RATIOS = (0.25, 0.5, 0.75, 1.0)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> np.ndarray:
    """Convex hull of 2-D points, as a counter-clockwise (m, 2) vertex array.

    Counter-clockwise means positive shoelace area (x right, y up
    convention). Collinear boundary points are dropped, so the vertex list
    is minimal. Raises DegenerateGeometryError if all points are collinear.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected (n, 2) points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    unique = sorted(set(map(tuple, pts)))
    if len(unique) < 3:
        raise DegenerateGeometryError("need at least 3 distinct points")

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(unique)
    upper = half(reversed(unique))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateGeometryError("points are collinear")
    return np.asarray(hull, dtype=np.float64)


def scheme_landmarks(scheme: MaskScheme, landmarks) -> np.ndarray:
    """Coordinates of the scheme's landmark subset, in documented index order."""
    pts = check_landmarks(landmarks)
    return pts[list(SCHEME_LANDMARK_INDICES[scheme])]


def rasterize_hull(polygon, width: int, height: int) -> np.ndarray:
    """Rasterize a convex polygon to a {0, 1}-valued (height, width) grid.

    A pixel is inside when its center lies inside the polygon; centers
    exactly on the boundary follow a top/left-inclusive rule (even-odd
    crossing test with half-open spans). A polygon entirely outside the
    frame yields an all-zero mask.
    """
    if width <= 0 or height <= 0:
        raise ValueError("width and height must be positive")
    poly = np.asarray(polygon, dtype=np.float64)
    if poly.ndim != 2 or poly.shape[0] < 3 or poly.shape[1] != 2:
        raise ValueError(f"expected a polygon of >= 3 vertices, got shape {poly.shape}")
    xs = np.arange(width, dtype=np.float64) + 0.5
    ys = np.arange(height, dtype=np.float64) + 0.5
    px, py = np.meshgrid(xs, ys)
    inside = np.zeros((height, width), dtype=bool)
    n = poly.shape[0]
    for k in range(n):
        x1, y1 = poly[k]
        x2, y2 = poly[(k + 1) % n]
        if y1 == y2:
            continue
        spans = (y1 <= py) != (y2 <= py)
        with np.errstate(invalid="ignore"):
            xi = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= spans & (px < xi)
    return inside.astype(np.float64)


def elastic_deform(mask: np.ndarray, alpha: float, sigma: float, seed) -> np.ndarray:
    """Warp a mask by a smoothed random displacement field.

    Per-pixel displacements are uniform in [-1, 1] * alpha, smoothed with a
    Gaussian of scale sigma, then applied with bilinear resampling and
    clamping to [0, 1]. alpha = 0 returns the input unchanged.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    grid = np.asarray(mask, dtype=np.float64)
    if alpha == 0:
        return grid.copy()
    rng = as_rng(seed)
    h, w = grid.shape
    dx = gaussian_filter2d(rng.uniform(-1.0, 1.0, size=(h, w)), sigma) * alpha
    dy = gaussian_filter2d(rng.uniform(-1.0, 1.0, size=(h, w)), sigma) * alpha
    yy, xx = np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")
    warped = bilinear_sample(grid, yy + dy, xx + dx)
    return np.clip(warped, 0.0, 1.0)


def gaussian_smooth(mask: np.ndarray, kernel_sigma: float) -> np.ndarray:
    """Blur a mask with a normalized Gaussian kernel truncated at 3 sigma.

    Borders are edge-replicated, so a constant mask stays constant and any
    mask supported >= 3 sigma away from the border keeps its total mass.
    """
    if kernel_sigma <= 0:
        raise ValueError("kernel_sigma must be positive")
    out = gaussian_filter2d(np.asarray(mask, dtype=np.float64), kernel_sigma)
    return np.clip(out, 0.0, 1.0)


def apply_blend_ratio(mask: np.ndarray, r: float) -> np.ndarray:
    """Scale a mask elementwise by a blend ratio r in (0, 1]."""
    if not (0.0 < r <= 1.0):
        raise ValueError(f"blend ratio must be in (0, 1], got {r}")
    return np.asarray(mask, dtype=np.float64) * r


def build_mask(
    landmarks,
    scheme: MaskScheme,
    width: int,
    height: int,
    seed,
    *,
    deform_alpha: float = DEFAULT_DEFORM_ALPHA,
    deform_sigma: float = DEFAULT_DEFORM_SIGMA,
    smooth_sigma: float = DEFAULT_SMOOTH_SIGMA,
    blend_ratios=BLEND_RATIOS,
) -> tuple[np.ndarray, float]:
    """Full mask pipeline: subset -> hull -> rasterize -> deform -> smooth -> ratio.

    Returns the final mask and the blend ratio drawn from ``blend_ratios``.
    """
    rng = as_rng(seed)
    pts = scheme_landmarks(scheme, landmarks)
    hull = convex_hull(pts)
    mask = rasterize_hull(hull, width, height)
    mask = elastic_deform(mask, deform_alpha, deform_sigma, rng)
    mask = gaussian_smooth(mask, smooth_sigma)
    ratio = float(blend_ratios[rng.integers(len(blend_ratios))])
    return apply_blend_ratio(mask, ratio), ratio
