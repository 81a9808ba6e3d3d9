"""Procedural demo corpus: parametric cartoon faces with exact landmarks.

Each "video" is a sequence of drawings of one synthetic subject whose head
position, scale, gaze, eye openness and mouth shape drift smoothly from
frame to frame, plus seeded camera noise. Because the 68 landmarks are
computed from the same parameters that drive the drawing, they are exact,
which makes the corpus a faithful desk-scale stand-in for detector-supplied
face crops.

``make_corpus`` writes frames, landmark files and a manifest; the second
half of the videos additionally get a fake twin whose frames are
pseudo-deepfakes synthesized from the real frames.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from .manifest import VideoRecord, write_landmarks, write_manifest
from .synth import FACE_SIZE, TransformConfig, make_pseudo_deepfake

_SIZE = FACE_SIZE


def _subject_params(rng: np.random.Generator) -> dict:
    skin = np.clip(np.array([205, 165, 135]) + rng.integers(-25, 26, size=3), 60, 250)
    return {
        "ax": rng.uniform(58, 70),
        "ay": rng.uniform(72, 86),
        "cx0": rng.uniform(104, 120),
        "cy0": rng.uniform(106, 118),
        "skin": tuple(int(v) for v in skin),
        "hair": tuple(int(v) for v in rng.integers(20, 110, size=3)),
        "iris": tuple(int(v) for v in rng.integers(30, 140, size=3)),
        "lip": (int(rng.integers(140, 200)), int(rng.integers(40, 90)), int(rng.integers(50, 100))),
        "bg_top": tuple(int(v) for v in rng.integers(90, 200, size=3)),
        "bg_bot": tuple(int(v) for v in rng.integers(40, 150, size=3)),
        "amp_x": rng.uniform(3, 7),
        "amp_y": rng.uniform(2, 5),
        "amp_s": rng.uniform(0.02, 0.04),
        "freq": rng.uniform(0.6, 1.4),
        "phase": rng.uniform(0, 2 * np.pi, size=6),
    }


def _frame_pose(subject: dict, t: float) -> dict:
    ph = subject["phase"]
    w = 2 * np.pi * subject["freq"] * t
    scale = 1.0 + subject["amp_s"] * np.sin(w + ph[2])
    return {
        "cx": subject["cx0"] + subject["amp_x"] * np.sin(w + ph[0]),
        "cy": subject["cy0"] + subject["amp_y"] * np.sin(w + ph[1]),
        "ax": subject["ax"] * scale,
        "ay": subject["ay"] * scale,
        "eye_open": 0.75 + 0.25 * np.sin(w * 1.7 + ph[3]),
        "mouth_open": 0.5 + 0.5 * np.sin(w * 1.3 + ph[4]),
        "gaze": 0.8 * np.sin(w + ph[5]),
        "light": 1.0 + 0.06 * np.sin(w + ph[2] + 1.1),
    }


def face_landmarks(pose: dict) -> np.ndarray:
    """Exact 68-point layout for a drawn face (jaw, brows, nose, eyes, mouth)."""
    cx, cy, ax, ay = pose["cx"], pose["cy"], pose["ax"], pose["ay"]
    pts = np.zeros((68, 2))

    phi = np.pi + np.pi * np.arange(17) / 16.0
    pts[0:17, 0] = cx + ax * np.cos(phi)
    pts[0:17, 1] = cy - ay * np.sin(phi)

    ey = cy - 0.18 * ay
    edx = 0.40 * ax
    ew = 0.16 * ax
    eh = 0.07 * ay * max(pose["eye_open"], 0.15)
    for side, ex in ((0, cx - edx), (1, cx + edx)):
        base = 36 + 6 * side
        pts[base + 0] = (ex - ew, ey)
        pts[base + 1] = (ex - ew / 3, ey - eh)
        pts[base + 2] = (ex + ew / 3, ey - eh)
        pts[base + 3] = (ex + ew, ey)
        pts[base + 4] = (ex + ew / 3, ey + eh)
        pts[base + 5] = (ex - ew / 3, ey + eh)

    by = ey - 0.17 * ay
    arch = 0.035 * ay
    for side, ex in ((0, cx - edx), (1, cx + edx)):
        base = 17 + 5 * side
        xs = ex + np.linspace(-1.3 * ew, 1.3 * ew, 5)
        ys = by - arch * np.array([0.0, 0.7, 1.0, 0.7, 0.0])
        pts[base : base + 5, 0] = xs
        pts[base : base + 5, 1] = ys

    nose_top = ey + 0.02 * ay
    nose_tip_y = cy + 0.16 * ay
    pts[27:31, 0] = cx
    pts[27:31, 1] = np.linspace(nose_top, nose_tip_y, 4)
    nostril_y = nose_tip_y + 0.05 * ay
    pts[31:36, 0] = cx + 0.05 * ax * np.array([-2, -1, 0, 1, 2])
    pts[31:36, 1] = nostril_y + 0.01 * ay * np.array([0.0, 0.5, 1.0, 0.5, 0.0])

    mx, my = cx, cy + 0.52 * ay
    mw = 0.30 * ax
    mh = 0.05 * ay * (1.0 + 0.8 * pose["mouth_open"])
    outer = np.deg2rad([180, 150, 120, 90, 60, 30, 0, -30, -60, -90, -120, -150])
    pts[48:60, 0] = mx + mw * np.cos(outer)
    pts[48:60, 1] = my - mh * np.sin(outer)
    inner = np.deg2rad([180, 135, 90, 45, 0, -45, -90, -135])
    pts[60:68, 0] = mx + 0.6 * mw * np.cos(inner)
    pts[60:68, 1] = my - 0.55 * mh * np.sin(inner)

    return pts


def draw_face(pose: dict, subject: dict, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Render one frame and its landmarks."""
    cx, cy, ax, ay = pose["cx"], pose["cy"], pose["ax"], pose["ay"]
    lms = face_landmarks(pose)

    grad = np.linspace(0.0, 1.0, _SIZE)[:, None]
    top = np.array(subject["bg_top"], dtype=np.float64)
    bot = np.array(subject["bg_bot"], dtype=np.float64)
    bg = (1 - grad) * top + grad * bot
    img = Image.fromarray(np.clip(np.rint(np.broadcast_to(bg[:, None, :], (_SIZE, _SIZE, 3))), 0, 255).astype(np.uint8))
    draw = ImageDraw.Draw(img)

    skin = subject["skin"]
    dark = tuple(max(0, c - 70) for c in skin)
    draw.ellipse([cx - ax, cy - ay, cx + ax, cy + ay], fill=skin, outline=dark, width=2)
    draw.chord([cx - ax * 1.02, cy - ay * 1.04, cx + ax * 1.02, cy + ay * 0.1], 180, 360, fill=subject["hair"])

    for base in (17, 22):
        draw.line([tuple(p) for p in lms[base : base + 5]], fill=(40, 25, 20), width=3)

    eh = max(lms[39, 1] - lms[38, 1], 1.2)
    for base, ex in ((36, lms[36:42, 0].mean()), (42, lms[42:48, 0].mean())):
        ey0 = lms[base + 1, 1]
        ey1 = lms[base + 4, 1]
        x0 = lms[base + 0, 0]
        x1 = lms[base + 3, 0]
        draw.ellipse([x0, ey0, x1, ey1], fill=(245, 245, 245), outline=(60, 50, 45), width=1)
        ir = max((ey1 - ey0) * 0.45, 1.0)
        ix = ex + pose["gaze"] * (x1 - x0) * 0.18
        iy = (ey0 + ey1) / 2
        draw.ellipse([ix - ir, iy - ir, ix + ir, iy + ir], fill=subject["iris"])

    draw.line([tuple(p) for p in lms[27:31]], fill=dark, width=2)
    draw.line([tuple(p) for p in lms[31:36]], fill=dark, width=2)

    mouth_box = [lms[48, 0], lms[48:60, 1].min(), lms[54, 0], lms[48:60, 1].max()]
    draw.ellipse(mouth_box, fill=subject["lip"], outline=tuple(max(0, c - 60) for c in subject["lip"]))
    if pose["mouth_open"] > 0.35:
        inner_box = [lms[60, 0], lms[60:68, 1].min(), lms[64, 0], lms[60:68, 1].max()]
        draw.ellipse(inner_box, fill=(70, 20, 25))

    arr = np.asarray(img, dtype=np.float64) * pose["light"]
    arr += rng.normal(0.0, 2.0, size=arr.shape)
    return np.clip(np.rint(arr), 0, 255).astype(np.uint8), lms


def make_video(seed, n_frames: int = 40) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Render one subject's video: (frames, landmark sets)."""
    rng = np.random.default_rng(seed)
    subject = _subject_params(rng)
    frames, landmarks = [], []
    for j in range(n_frames):
        pose = _frame_pose(subject, j / n_frames)
        frame, lms = draw_face(pose, subject, rng)
        frames.append(frame)
        landmarks.append(lms)
    return frames, landmarks


def make_corpus(
    out_dir,
    n_videos: int = 20,
    n_frames: int = 40,
    seed: int = 0,
    transform_config: TransformConfig | None = None,
) -> Path:
    """Write a demo corpus and return the manifest path.

    The first half of the videos become real training records; the second
    half become real test records, each with a fake test twin whose frames
    are pseudo-deepfakes synthesized from the real frames (random mask
    scheme per frame). Fully deterministic given the seed.
    """
    out = Path(out_dir)
    (out / "frames").mkdir(parents=True, exist_ok=True)
    (out / "landmarks").mkdir(parents=True, exist_ok=True)
    cfg = transform_config if transform_config is not None else TransformConfig()

    records = []
    n_train = n_videos // 2
    for i in range(n_videos):
        video_id = f"vid_{i:03d}"
        frames, landmarks = make_video(np.random.SeedSequence((seed, i)), n_frames)
        frame_paths = _write_video(out, video_id, frames, landmarks)
        records.append(
            VideoRecord(
                video_id=video_id,
                subject_id=f"subj_{i:03d}",
                label="real",
                frame_paths=frame_paths,
                landmark_path=str(out / "landmarks" / f"{video_id}.txt"),
                split="train" if i < n_train else "test",
            )
        )
        if i >= n_train:
            fake_id = f"{video_id}_fake"
            fake_frames = []
            for j, (frame, lms) in enumerate(zip(frames, landmarks)):
                sample = make_pseudo_deepfake(
                    frame, lms, scheme=None, cfg=cfg,
                    seed=np.random.default_rng(np.random.SeedSequence((seed, i, j, 7))),
                )
                fake_frames.append(sample.image)
            fake_paths = _write_video(out, fake_id, fake_frames, landmarks)
            records.append(
                VideoRecord(
                    video_id=fake_id,
                    subject_id=f"subj_{i:03d}",
                    label="fake",
                    frame_paths=fake_paths,
                    landmark_path=str(out / "landmarks" / f"{fake_id}.txt"),
                    split="test",
                )
            )

    manifest_path = out / "manifest.jsonl"
    write_manifest(records, manifest_path)
    return manifest_path


def _write_video(out: Path, video_id: str, frames, landmarks) -> list[str]:
    frame_dir = out / "frames" / video_id
    frame_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for j, frame in enumerate(frames):
        p = frame_dir / f"f{j:03d}.png"
        Image.fromarray(frame).save(p)
        paths.append(str(p))
    write_landmarks(landmarks, out / "landmarks" / f"{video_id}.txt")
    return paths


def main(argv=None) -> None:
    import argparse

    parser = argparse.ArgumentParser(description="Write a procedural demo corpus.")
    parser.add_argument("--out", required=True)
    parser.add_argument("--videos", type=int, default=20)
    parser.add_argument("--frames", type=int, default=40)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    manifest = make_corpus(args.out, n_videos=args.videos, n_frames=args.frames, seed=args.seed)
    print(manifest)


if __name__ == "__main__":
    main()
