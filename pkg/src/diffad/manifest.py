"""Dataset manifests, landmark files and embedding stores.

Three file formats form the data backbone of the toolkit:

* Manifest: line-delimited JSON, one video record per line with keys
  ``video_id``, ``subject_id``, ``label`` (``real``/``fake``), ``frames``
  (ordered list of image paths), ``landmarks`` (path to the landmark file)
  and ``split`` (``train``/``val``/``test``).
* Landmarks: plain text, one frame per block of 68 ``x y`` rows, blocks
  separated by a blank line. Trivially producible by any external landmark
  tool.
* Embeddings: binary, little-endian. Header ``{magic b"DEMB", u32 version,
  u32 dim, u32 count}`` followed by one entry per stored vector:
  ``u32 video-id length, utf-8 video id, u32 frame index, dim float32``.
  Entries are written sorted by (video_id, frame_index).

Readers are pure and safe to call from many threads; writers require
exclusive access to the output path.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

EMBEDDING_MAGIC = b"DEMB"
EMBEDDING_VERSION = 1

VALID_LABELS = ("real", "fake")
VALID_SPLITS = ("train", "val", "test")

_MANIFEST_FIELDS = ("video_id", "subject_id", "label", "frames", "landmarks", "split")


class ManifestError(ValueError):
    """Raised for malformed manifest files."""


class LandmarkError(ValueError):
    """Raised for malformed landmark files."""


class EmbeddingFormatError(ValueError):
    """Raised for malformed embedding files."""


@dataclass
class VideoRecord:
    """One video of one subject: its frames, landmark file, label and split."""

    video_id: str
    subject_id: str
    label: str
    frame_paths: list[str]
    landmark_path: str
    split: str

    @property
    def n_frames(self) -> int:
        return len(self.frame_paths)


def _parse_record(obj: dict, line_no: int) -> VideoRecord:
    for key in _MANIFEST_FIELDS:
        if key not in obj:
            raise ManifestError(f"line {line_no}: missing field '{key}'")
    label = obj["label"]
    if label not in VALID_LABELS:
        raise ManifestError(f"line {line_no}: label must be one of {VALID_LABELS}, got {label!r}")
    split = obj["split"]
    if split not in VALID_SPLITS:
        raise ManifestError(f"line {line_no}: split must be one of {VALID_SPLITS}, got {split!r}")
    frames = obj["frames"]
    if not isinstance(frames, list) or not frames:
        raise ManifestError(f"line {line_no}: 'frames' must be a non-empty list")
    if len(set(frames)) != len(frames):
        raise ManifestError(f"line {line_no}: duplicate frame paths")
    return VideoRecord(
        video_id=str(obj["video_id"]),
        subject_id=str(obj["subject_id"]),
        label=label,
        frame_paths=[str(p) for p in frames],
        landmark_path=str(obj["landmarks"]),
        split=split,
    )


def load_manifest(path) -> list[VideoRecord]:
    """Parse a manifest file into records, preserving file order.

    Rejects unparsable lines (with line number), missing fields and
    duplicate video ids. Blank lines are ignored.
    """
    records: list[VideoRecord] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"line {line_no}: unparsable record: {exc}") from exc
            if not isinstance(obj, dict):
                raise ManifestError(f"line {line_no}: record must be a JSON object")
            record = _parse_record(obj, line_no)
            if record.video_id in seen:
                raise ManifestError(f"line {line_no}: duplicate video_id '{record.video_id}'")
            seen.add(record.video_id)
            records.append(record)
    return records


def write_manifest(records, path) -> None:
    """Write records as line-delimited JSON (inverse of load_manifest)."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "video_id": rec.video_id,
                        "subject_id": rec.subject_id,
                        "label": rec.label,
                        "frames": list(rec.frame_paths),
                        "landmarks": rec.landmark_path,
                        "split": rec.split,
                    }
                )
                + "\n"
            )


def load_landmarks(path, n_frames: int | None = None) -> list[np.ndarray]:
    """Parse a landmark file into one (68, 2) float64 array per frame.

    When ``n_frames`` is given, the file must contain exactly that many
    frames. Malformed blocks and non-finite coordinates are rejected with
    the offending frame index.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    blocks = [b for b in text.split("\n\n") if b.strip()]
    frames: list[np.ndarray] = []
    for idx, block in enumerate(blocks):
        rows = [r for r in block.splitlines() if r.strip()]
        if len(rows) != 68:
            raise LandmarkError(f"frame {idx}: expected 68 landmark rows, got {len(rows)}")
        pts = np.empty((68, 2), dtype=np.float64)
        for i, row in enumerate(rows):
            parts = row.split()
            if len(parts) != 2:
                raise LandmarkError(f"frame {idx}: row {i} is not an 'x y' pair: {row!r}")
            try:
                pts[i, 0] = float(parts[0])
                pts[i, 1] = float(parts[1])
            except ValueError as exc:
                raise LandmarkError(f"frame {idx}: row {i}: {exc}") from exc
        if not np.all(np.isfinite(pts)):
            raise LandmarkError(f"frame {idx}: non-finite landmark coordinate")
        frames.append(pts)
    if n_frames is not None and len(frames) != n_frames:
        raise LandmarkError(f"expected {n_frames} landmark frames, file has {len(frames)}")
    return frames


def write_landmarks(frames, path) -> None:
    """Write landmark frames in the block text format (inverse of load_landmarks).

    Coordinates are written with shortest round-tripping repr, so
    write -> read is bit-identical.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for idx, pts in enumerate(frames):
            arr = np.asarray(pts, dtype=np.float64)
            if arr.shape != (68, 2):
                raise LandmarkError(f"frame {idx}: expected shape (68, 2), got {arr.shape}")
            if idx:
                fh.write("\n")
            for x, y in arr:
                fh.write(f"{float(x)!r} {float(y)!r}\n")


def load_record_landmarks(record: VideoRecord) -> list[np.ndarray]:
    """Load a record's landmark file, requiring one frame per listed frame path."""
    return load_landmarks(record.landmark_path, n_frames=record.n_frames)


@dataclass
class EmbeddingStore:
    """In-memory map from (video_id, frame_index) to a float32 feature vector."""

    dim: int
    entries: dict[tuple[str, int], np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("embedding dim must be positive")

    def __len__(self) -> int:
        return len(self.entries)

    def put(self, video_id: str, frame_index: int, vector) -> None:
        vec = np.asarray(vector, dtype=np.float32)
        if vec.shape != (self.dim,):
            raise ValueError(
                f"embedding for ('{video_id}', {frame_index}) has length "
                f"{vec.shape}, store dim is {self.dim}"
            )
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"embedding for ('{video_id}', {frame_index}) is non-finite")
        self.entries[(video_id, int(frame_index))] = vec

    def get(self, video_id: str, frame_index: int) -> np.ndarray:
        try:
            return self.entries[(video_id, int(frame_index))]
        except KeyError:
            raise KeyError(
                f"no embedding stored for video '{video_id}' frame {frame_index}"
            ) from None

    def sorted_keys(self) -> list[tuple[str, int]]:
        return sorted(self.entries)


def write_embeddings(store: EmbeddingStore, path) -> None:
    """Serialize a store to the binary embedding format."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sIII", EMBEDDING_MAGIC, EMBEDDING_VERSION, store.dim, len(store)))
        for video_id, frame_index in store.sorted_keys():
            vec = store.entries[(video_id, frame_index)]
            vid_bytes = video_id.encode("utf-8")
            fh.write(struct.pack("<I", len(vid_bytes)))
            fh.write(vid_bytes)
            fh.write(struct.pack("<I", frame_index))
            fh.write(vec.astype("<f4", copy=False).tobytes())


def _read_exact(fh, n: int, what: str) -> bytes:
    data = fh.read(n)
    if len(data) != n:
        raise EmbeddingFormatError(f"truncated embedding file while reading {what}")
    return data


def read_embeddings(path, expect_dim: int | None = None) -> EmbeddingStore:
    """Read a binary embedding file back into a store (bit-exact payloads)."""
    with open(path, "rb") as fh:
        magic, version, dim, count = struct.unpack("<4sIII", _read_exact(fh, 16, "header"))
        if magic != EMBEDDING_MAGIC:
            raise EmbeddingFormatError(f"magic number mismatch: {magic!r}")
        if version != EMBEDDING_VERSION:
            raise EmbeddingFormatError(f"unsupported embedding file version {version}")
        if dim <= 0:
            raise EmbeddingFormatError(f"invalid dim {dim} in header")
        if expect_dim is not None and dim != expect_dim:
            raise EmbeddingFormatError(f"dim mismatch: file has {dim}, expected {expect_dim}")
        store = EmbeddingStore(dim=dim)
        for _ in range(count):
            (vid_len,) = struct.unpack("<I", _read_exact(fh, 4, "entry key"))
            video_id = _read_exact(fh, vid_len, "video id").decode("utf-8")
            (frame_index,) = struct.unpack("<I", _read_exact(fh, 4, "frame index"))
            payload = _read_exact(fh, 4 * dim, "vector payload")
            vec = np.frombuffer(payload, dtype="<f4").astype(np.float32, copy=True)
            if not np.all(np.isfinite(vec)):
                raise EmbeddingFormatError(
                    f"non-finite embedding for ('{video_id}', {frame_index})"
                )
            store.entries[(video_id, frame_index)] = vec
        if fh.read(1):
            raise EmbeddingFormatError("trailing data after last entry")
    return store
