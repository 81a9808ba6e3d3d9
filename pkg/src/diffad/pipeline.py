"""End-to-end orchestration: pair sampling, video scoring, train and infer.

Training pairs come from real videos only, both frames from the same video
(hence the same subject), separated by at least ``min_gap`` frames so pose
and expression have drifted. At inference every video gets a fixed number
of sampled pairs; the video score is the arithmetic mean of its pairs'
anomaly scores.

All sampling is seeded. Per-video generators are derived from
(base seed, position in the filtered manifest) so results do not depend on
scoring order and are bit-reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_rng
from .anomaly import GaussianMixtureAnomalyModel
from .combine import CombinationMode, DEFAULT_MODE, combine
from .features import ExtractorSpec, extract_all
from .manifest import EmbeddingStore, VideoRecord, load_manifest

DEFAULT_MIN_GAP = 5
DEFAULT_TRAIN_PAIRS = 60
DEFAULT_INFER_PAIRS = 30


@dataclass(frozen=True)
class PairSample:
    """Two frame indices of one video, i < j, at least min_gap apart."""

    video_id: str
    frame_i: int
    frame_j: int

    def __post_init__(self):
        if not self.frame_i < self.frame_j:
            raise ValueError("pair frames must satisfy frame_i < frame_j")

    @property
    def gap(self) -> int:
        return self.frame_j - self.frame_i


@dataclass
class VideoScore:
    video_id: str
    score: float
    n_pairs: int
    label: str | None = None


def eligible_pairs(n_frames: int, min_gap: int) -> list[tuple[int, int]]:
    """All (i, j) with j - i >= min_gap, in lexicographic order."""
    if min_gap < 1:
        raise ValueError("min_gap must be >= 1")
    return [(i, j) for i in range(n_frames) for j in range(i + min_gap, n_frames)]


def sample_training_pairs(
    record: VideoRecord,
    k_pairs: int = DEFAULT_TRAIN_PAIRS,
    min_gap: int = DEFAULT_MIN_GAP,
    seed=0,
) -> list[PairSample]:
    """Up to k_pairs distinct pairs, uniform over the eligible set.

    Rejects fake-labeled records: the anomaly model trains on real pairs
    only.
    """
    if record.label != "real":
        raise ValueError(
            f"ADM training pairs require a real-labeled record, got label "
            f"'{record.label}' for video '{record.video_id}'"
        )
    pool = eligible_pairs(record.n_frames, min_gap)
    if not pool:
        raise ValueError(
            f"video '{record.video_id}' has no frame pair with gap >= {min_gap}"
        )
    rng = as_rng(seed)
    take = min(k_pairs, len(pool))
    idx = rng.choice(len(pool), size=take, replace=False)
    return [PairSample(record.video_id, *pool[i]) for i in idx]


def sample_inference_pairs(
    record: VideoRecord,
    seed=0,
    n_pairs: int = DEFAULT_INFER_PAIRS,
    min_gap: int = DEFAULT_MIN_GAP,
) -> list[PairSample]:
    """Exactly n_pairs pairs for scoring one video.

    Distinct pairs when the eligible set is large enough, otherwise drawn
    with replacement from it.
    """
    pool = eligible_pairs(record.n_frames, min_gap)
    if not pool:
        raise ValueError(
            f"video '{record.video_id}' has no frame pair with gap >= {min_gap}"
        )
    rng = as_rng(seed)
    if len(pool) >= n_pairs:
        idx = rng.choice(len(pool), size=n_pairs, replace=False)
    else:
        idx = rng.integers(len(pool), size=n_pairs)
    return [PairSample(record.video_id, *pool[i]) for i in idx]


def score_video(
    record: VideoRecord,
    store: EmbeddingStore,
    model: GaussianMixtureAnomalyModel,
    mode: CombinationMode = DEFAULT_MODE,
    seed=0,
    n_pairs: int = DEFAULT_INFER_PAIRS,
    min_gap: int = DEFAULT_MIN_GAP,
) -> VideoScore:
    """Mean pair anomaly score over sampled pairs of one video."""
    pairs = sample_inference_pairs(record, seed=seed, n_pairs=n_pairs, min_gap=min_gap)
    features = np.stack(
        [
            combine(
                store.get(record.video_id, p.frame_i),
                store.get(record.video_id, p.frame_j),
                mode,
            ).values
            for p in pairs
        ]
    )
    scores = model.anomaly_scores(features)
    return VideoScore(
        video_id=record.video_id,
        score=float(scores.mean()),
        n_pairs=len(pairs),
        label=record.label,
    )


def _video_seed(base_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((int(base_seed), int(index))))


@dataclass
class TrainReport:
    n_videos: int
    n_pairs: int
    dim: int
    n_components: int
    mode: str
    seed: int
    n_iter: int
    final_log_likelihood: float
    converged: bool

    def to_text(self) -> str:
        lines = [
            f"videos: {self.n_videos}",
            f"training_pairs: {self.n_pairs}",
            f"dim: {self.dim}",
            f"components: {self.n_components}",
            f"combine: {self.mode}",
            f"seed: {self.seed}",
            f"em_iterations: {self.n_iter}",
            f"final_log_likelihood: {self.final_log_likelihood!r}",
            f"converged: {self.converged}",
        ]
        return "\n".join(lines) + "\n"


def _assert_real_provenance(features, records_by_id: dict[str, VideoRecord]) -> None:
    """Invariant guard: every feature entering fit() comes from a real video."""
    for feat in features:
        video_id = feat.pair[0]
        rec = records_by_id.get(video_id)
        if rec is None or rec.label != "real":
            raise ValueError(
                f"training feature with non-real provenance: video '{video_id}'"
            )


def run_train(
    manifest_path,
    *,
    store: EmbeddingStore | None = None,
    extractor: ExtractorSpec | None = None,
    out_model=None,
    n_components: int = 3,
    mode: CombinationMode = DEFAULT_MODE,
    k_pairs: int = DEFAULT_TRAIN_PAIRS,
    min_gap: int = DEFAULT_MIN_GAP,
    seed: int = 0,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> tuple[GaussianMixtureAnomalyModel, TrainReport]:
    """Fit the anomaly model on real training videos of a manifest.

    Embeddings come from ``store`` when given, otherwise they are extracted
    per ``extractor`` (toy by default). Writes the model file when
    ``out_model`` is set and returns (model, report).
    """
    records = load_manifest(manifest_path)
    train_reals = [r for r in records if r.split == "train" and r.label == "real"]
    if not train_reals:
        raise ValueError("manifest has no real-labeled training videos")
    if store is None:
        store = extract_all(train_reals, extractor or ExtractorSpec())

    features = []
    for index, rec in enumerate(train_reals):
        rng = _video_seed(seed, index)
        for pair in sample_training_pairs(rec, k_pairs=k_pairs, min_gap=min_gap, seed=rng):
            features.append(
                combine(
                    store.get(rec.video_id, pair.frame_i),
                    store.get(rec.video_id, pair.frame_j),
                    mode,
                    pair=(pair.video_id, pair.frame_i, pair.frame_j),
                )
            )
    _assert_real_provenance(features, {r.video_id: r for r in records})

    X = np.stack([f.values for f in features])
    model = GaussianMixtureAnomalyModel(
        n_components=n_components,
        tol=tol,
        max_iter=max_iter,
        random_state=seed,
    ).fit(X)
    if out_model is not None:
        model.save(out_model)
    report = TrainReport(
        n_videos=len(train_reals),
        n_pairs=len(features),
        dim=X.shape[1],
        n_components=n_components,
        mode=mode.value,
        seed=seed,
        n_iter=model.n_iter_,
        final_log_likelihood=model.lower_bound_,
        converged=model.converged_,
    )
    return model, report


def run_infer(
    manifest_path,
    store: EmbeddingStore,
    model: GaussianMixtureAnomalyModel,
    *,
    mode: CombinationMode = DEFAULT_MODE,
    seed: int = 0,
    n_pairs: int = DEFAULT_INFER_PAIRS,
    min_gap: int = DEFAULT_MIN_GAP,
    split: str = "test",
) -> list[VideoScore]:
    """Score every video of the chosen split, in manifest order."""
    records = [r for r in load_manifest(manifest_path) if r.split == split]
    scores = []
    for index, rec in enumerate(records):
        rng = _video_seed(seed, index)
        scores.append(
            score_video(
                rec, store, model, mode=mode, seed=rng, n_pairs=n_pairs, min_gap=min_gap
            )
        )
    return scores


SCORE_TABLE_HEADER = ("video_id", "label", "score", "n_pairs")


def write_score_table(scores: list[VideoScore], path) -> None:
    """Write scores as a tab-separated table (header + one row per video)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(SCORE_TABLE_HEADER) + "\n")
        for s in scores:
            fh.write(f"{s.video_id}\t{s.label or ''}\t{float(s.score)!r}\t{s.n_pairs}\n")


def read_score_table(path) -> list[VideoScore]:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != SCORE_TABLE_HEADER:
            raise ValueError(f"unexpected score table header: {header}")
        out = []
        for line in fh:
            if not line.strip():
                continue
            video_id, label, score, n_pairs = line.rstrip("\n").split("\t")
            out.append(
                VideoScore(
                    video_id=video_id,
                    score=float(score),
                    n_pairs=int(n_pairs),
                    label=label or None,
                )
            )
    return out
