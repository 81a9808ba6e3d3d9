"""Pseudo-deepfake synthesis by self-blending.

A single real face image serves as both the source and the target of the
blend. Color/frequency transformations are applied to one image of the
pair (recipient drawn per transform), the source additionally gets a small
affine displacement so a boundary appears, and the two are composited
through a landmark-driven mask:

    blended = source * mask + target * (1 - mask)

The returned sample carries the blended image, the (possibly transformed)
target, which is the real counterpart of the pair for training purposes,
the mask, and full provenance so every sample is reproducible from its
seed. Wherever the mask is exactly zero, the blended image is bit-identical
to the target.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._imops import affine_sample, bilinear_sample, resize_bilinear
from ._validation import as_rng, check_image, check_landmarks
from .masks import (
    BLEND_RATIOS,
    DEFAULT_DEFORM_ALPHA,
    DEFAULT_DEFORM_SIGMA,
    DEFAULT_SMOOTH_SIGMA,
    MaskScheme,
    build_mask,
)

FACE_SIZE = 224

TRANSFORM_NAMES = ("rgb_shift", "hsv_shift", "brightness_contrast", "sharpen", "downscale")


@dataclass
class TransformConfig:
    """Ranges and firing probability for the source-target transformations."""

    rgb_shift_range: tuple[int, int] = (-20, 20)
    hsv_shift_range: tuple[float, float] = (-0.3, 0.3)
    brightness_contrast_limit: tuple[float, float] = (-0.3, 0.3)
    sharpen_intensity: tuple[float, float] = (0.2, 0.5)
    downscale_factors: tuple[int, ...] = (2, 4)
    probability: float = 0.3
    affine_translate_frac: float = 0.03
    affine_resize_frac: float = 0.05

    def __post_init__(self):
        if not (0.0 <= self.probability <= 1.0):
            raise ValueError("probability must be in [0, 1]")
        if self.affine_translate_frac < 0 or self.affine_resize_frac < 0:
            raise ValueError("affine fractions must be non-negative")


@dataclass
class TransformStep:
    name: str
    params: dict
    recipient: str = "source"


@dataclass
class PseudoDeepfake:
    """A synthesized fake, its paired real counterpart and its provenance."""

    image: np.ndarray
    target_image: np.ndarray
    mask: np.ndarray
    scheme: MaskScheme
    provenance: dict = field(default_factory=dict)


def _to_uint8(arr: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(arr), 0, 255).astype(np.uint8)


def _rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Vectorized RGB -> HSV, all channels in [0, 1]."""
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.max(rgb, axis=-1)
    minc = np.min(rgb, axis=-1)
    v = maxc
    delta = maxc - minc
    s = np.where(maxc > 0, delta / np.where(maxc > 0, maxc, 1.0), 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        rc = (maxc - r) / delta
        gc = (maxc - g) / delta
        bc = (maxc - b) / delta
    h = np.where(r == maxc, bc - gc, np.where(g == maxc, 2.0 + rc - bc, 4.0 + gc - rc))
    h = np.where(delta == 0, 0.0, h / 6.0 % 1.0)
    return np.stack([h, s, v], axis=-1)


def _hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    """Vectorized HSV -> RGB, inverse of _rgb_to_hsv."""
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    i = np.floor(h * 6.0)
    f = h * 6.0 - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    i = i.astype(np.int64) % 6
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def shift_rgb(image: np.ndarray, shifts) -> np.ndarray:
    """Add a per-channel integer offset, clamped to [0, 255]."""
    img = check_image(image).astype(np.int64)
    out = img + np.asarray(shifts, dtype=np.int64).reshape(1, 1, 3)
    return np.clip(out, 0, 255).astype(np.uint8)


def shift_hsv(image: np.ndarray, dh: float, ds: float, dv: float) -> np.ndarray:
    """Shift hue (with wraparound), saturation and value in [0, 1] units."""
    img = check_image(image).astype(np.float64) / 255.0
    hsv = _rgb_to_hsv(img)
    hsv[..., 0] = (hsv[..., 0] + dh) % 1.0
    hsv[..., 1] = np.clip(hsv[..., 1] + ds, 0.0, 1.0)
    hsv[..., 2] = np.clip(hsv[..., 2] + dv, 0.0, 1.0)
    return _to_uint8(_hsv_to_rgb(hsv) * 255.0)


def adjust_brightness_contrast(image: np.ndarray, brightness: float, contrast: float) -> np.ndarray:
    """Scale contrast about mid-gray by (1 + contrast), add brightness * 255."""
    img = check_image(image).astype(np.float64)
    out = (img - 127.5) * (1.0 + contrast) + 127.5 + brightness * 255.0
    return _to_uint8(out)


def sharpen(image: np.ndarray, intensity: float) -> np.ndarray:
    """Unsharp masking: image + intensity * (image - 3x3 box blur)."""
    img = check_image(image).astype(np.float64)
    padded = np.pad(img, ((1, 1), (1, 1), (0, 0)), mode="edge")
    blur = np.zeros_like(img)
    for dy in range(3):
        for dx in range(3):
            blur += padded[dy : dy + img.shape[0], dx : dx + img.shape[1]]
    blur /= 9.0
    return _to_uint8(img + intensity * (img - blur))


def downscale_upscale(image: np.ndarray, factor: int) -> np.ndarray:
    """Downscale by an integer factor, then resize back (lowpass artifact)."""
    img = check_image(image)
    if factor < 1:
        raise ValueError("factor must be >= 1")
    h, w = img.shape[:2]
    small = resize_bilinear(img, max(1, h // factor), max(1, w // factor))
    return resize_bilinear(small, h, w)


def _draw_step_params(name: str, cfg: TransformConfig, rng: np.random.Generator) -> dict:
    if name == "rgb_shift":
        lo, hi = cfg.rgb_shift_range
        return {"shifts": [int(rng.integers(lo, hi + 1)) for _ in range(3)]}
    if name == "hsv_shift":
        lo, hi = cfg.hsv_shift_range
        return {"dh": rng.uniform(lo, hi), "ds": rng.uniform(lo, hi), "dv": rng.uniform(lo, hi)}
    if name == "brightness_contrast":
        lo, hi = cfg.brightness_contrast_limit
        return {"brightness": rng.uniform(lo, hi), "contrast": rng.uniform(lo, hi)}
    if name == "sharpen":
        lo, hi = cfg.sharpen_intensity
        return {"intensity": rng.uniform(lo, hi)}
    if name == "downscale":
        return {"factor": int(cfg.downscale_factors[rng.integers(len(cfg.downscale_factors))])}
    raise ValueError(f"unknown transform '{name}'")


def draw_transform_plan(cfg: TransformConfig, seed, force_one: bool = False) -> list[TransformStep]:
    """Decide which transforms fire (independently, per cfg.probability) and
    draw their parameters.

    With ``force_one`` and a non-zero probability, at least one transform is
    guaranteed to fire; an all-zero probability always yields an empty plan.
    """
    rng = as_rng(seed)
    fires = rng.random(len(TRANSFORM_NAMES)) < cfg.probability
    if force_one and cfg.probability > 0 and not fires.any():
        fires[rng.integers(len(TRANSFORM_NAMES))] = True
    return [
        TransformStep(name, _draw_step_params(name, cfg, rng))
        for name, fired in zip(TRANSFORM_NAMES, fires)
        if fired
    ]


def _apply_step(image: np.ndarray, step: TransformStep) -> np.ndarray:
    if step.name == "rgb_shift":
        return shift_rgb(image, step.params["shifts"])
    if step.name == "hsv_shift":
        return shift_hsv(image, step.params["dh"], step.params["ds"], step.params["dv"])
    if step.name == "brightness_contrast":
        return adjust_brightness_contrast(
            image, step.params["brightness"], step.params["contrast"]
        )
    if step.name == "sharpen":
        return sharpen(image, step.params["intensity"])
    if step.name == "downscale":
        return downscale_upscale(image, step.params["factor"])
    raise ValueError(f"unknown transform '{step.name}'")


def apply_st_transforms(image: np.ndarray, cfg: TransformConfig, seed) -> np.ndarray:
    """Apply the source-target transformations that fire for this draw."""
    img = check_image(image)
    out = img.copy()
    for step in draw_transform_plan(cfg, seed):
        out = _apply_step(out, step)
    return out


def affine_source(image: np.ndarray, seed, *, translate_frac: float = 0.03, resize_frac: float = 0.05):
    """Displace the source image: translate within +/- translate_frac of the
    frame and rescale within +/- resize_frac, edge-replicated fill.

    Returns the warped image and the drawn (dx, dy, scale).
    """
    img = check_image(image)
    rng = as_rng(seed)
    h, w = img.shape[:2]
    dx = rng.uniform(-1.0, 1.0) * translate_frac * w
    dy = rng.uniform(-1.0, 1.0) * translate_frac * h
    scale = 1.0 + rng.uniform(-1.0, 1.0) * resize_frac
    return affine_sample(img, dx, dy, scale), (dx, dy, scale)


def blend(source: np.ndarray, target: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Composite source over target through a [0, 1] mask, per channel.

    Computed in float64 and rounded back to uint8; pixels with mask exactly
    0 (or 1) reproduce the target (or source) bit-exactly.
    """
    src = check_image(source)
    tgt = check_image(target)
    if src.shape != tgt.shape:
        raise ValueError(f"source/target shape mismatch: {src.shape} vs {tgt.shape}")
    m = np.asarray(mask, dtype=np.float64)
    if m.shape != src.shape[:2]:
        raise ValueError(f"mask shape {m.shape} does not match image {src.shape[:2]}")
    if m.min() < 0.0 or m.max() > 1.0:
        raise ValueError("mask values must lie in [0, 1]")
    m3 = m[..., None]
    out = src.astype(np.float64) * m3 + tgt.astype(np.float64) * (1.0 - m3)
    return _to_uint8(out)


def make_pseudo_deepfake(
    real: np.ndarray,
    landmarks,
    scheme: MaskScheme | None,
    cfg: TransformConfig | None = None,
    seed=0,
    *,
    deform_alpha: float = DEFAULT_DEFORM_ALPHA,
    deform_sigma: float = DEFAULT_DEFORM_SIGMA,
    smooth_sigma: float = DEFAULT_SMOOTH_SIGMA,
) -> PseudoDeepfake:
    """Synthesize one pseudo-deepfake from a single real face and its landmarks.

    ``scheme=None`` draws one of the four mask schemes at random. Each fired
    transform is applied to either the source or the target copy (recipient
    drawn per transform); the affine displacement always hits the source.
    Fully deterministic given the seed.
    """
    img = check_image(real, size=FACE_SIZE)
    lms = check_landmarks(landmarks)
    cfg = cfg if cfg is not None else TransformConfig()
    rng = as_rng(seed)

    chosen = scheme
    if chosen is None:
        schemes = list(MaskScheme)
        chosen = schemes[rng.integers(len(schemes))]

    steps = draw_transform_plan(cfg, rng, force_one=True)
    for step in steps:
        step.recipient = "source" if rng.random() < 0.5 else "target"

    source = img.copy()
    target = img.copy()
    for step in steps:
        if step.recipient == "source":
            source = _apply_step(source, step)
        else:
            target = _apply_step(target, step)

    source, (dx, dy, scale) = affine_source(
        source, rng, translate_frac=cfg.affine_translate_frac, resize_frac=cfg.affine_resize_frac
    )

    mask, ratio = build_mask(
        lms,
        chosen,
        img.shape[1],
        img.shape[0],
        rng,
        deform_alpha=deform_alpha,
        deform_sigma=deform_sigma,
        smooth_sigma=smooth_sigma,
    )
    blended = blend(source, target, mask)
    provenance = {
        "seed": seed if isinstance(seed, int) else None,
        "scheme": chosen.value,
        "blend_ratio": ratio,
        "affine": {"dx": dx, "dy": dy, "scale": scale},
        "transforms": [
            {"name": s.name, "recipient": s.recipient, "params": s.params} for s in steps
        ],
    }
    return PseudoDeepfake(
        image=blended, target_image=target, mask=mask, scheme=chosen, provenance=provenance
    )


def enlarge_bbox(bbox, factor: float, frame_w: int, frame_h: int) -> tuple[float, float, float, float]:
    """Scale a (x0, y0, x1, y1) box about its center, clamped to the frame."""
    x0, y0, x1, y1 = (float(v) for v in bbox)
    if x1 <= x0 or y1 <= y0:
        raise ValueError(f"degenerate bbox {bbox}")
    cx = (x0 + x1) / 2.0
    cy = (y0 + y1) / 2.0
    hw = (x1 - x0) * factor / 2.0
    hh = (y1 - y0) * factor / 2.0
    return (
        max(0.0, cx - hw),
        max(0.0, cy - hh),
        min(float(frame_w), cx + hw),
        min(float(frame_h), cy + hh),
    )


def preprocess(
    raw_image: np.ndarray,
    bbox,
    landmarks,
    *,
    enlarge: float = 1.3,
    out_size: int = FACE_SIZE,
) -> tuple[np.ndarray, np.ndarray]:
    """Crop the enlarged face box and resize it to the working resolution.

    The box is scaled by ``enlarge`` about its center, clamped to the frame,
    cropped with bilinear sampling and resized to out_size x out_size.
    Landmarks are remapped into crop coordinates with a corner-aligned
    linear map, so points inside the original box land in [0, out_size).
    Pixel values stay in [0, 255]; extractor-side normalization happens at
    extraction, not here.
    """
    img = check_image(raw_image)
    lms = check_landmarks(landmarks)
    h, w = img.shape[:2]
    bx0, by0, bx1, by1 = enlarge_bbox(bbox, enlarge, w, h)
    bw = bx1 - bx0
    bh = by1 - by0
    if bw <= 0 or bh <= 0:
        raise ValueError("bbox does not intersect the frame")
    ys = by0 + (np.arange(out_size, dtype=np.float64) + 0.5) * (bh / out_size) - 0.5
    xs = bx0 + (np.arange(out_size, dtype=np.float64) + 0.5) * (bw / out_size) - 0.5
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    crop = _to_uint8(bilinear_sample(img, yy, xx))
    remapped = np.empty_like(lms)
    remapped[:, 0] = (lms[:, 0] - bx0) * (out_size / bw)
    remapped[:, 1] = (lms[:, 1] - by0) * (out_size / bh)
    return crop, remapped
