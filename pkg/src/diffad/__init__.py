"""diffad: differential anomaly detection for face-video forgery screening.

The toolkit synthesizes pseudo-deepfakes from real faces via landmark-driven
self-blending, extracts face embeddings through a pluggable interface, fuses
same-subject embedding pairs into differential features, fits a Gaussian
mixture on real pairs only, and scores videos by mean pair anomaly score.
"""

from .anomaly import GaussianMixtureAnomalyModel
from .combine import CombinationMode, CombinedFeature, PairCombiner, combine, combine_matrix
from .features import ExtractorSpec, GridStatsExtractor, extract_all, toy_extract
from .manifest import (
    EmbeddingStore,
    VideoRecord,
    load_landmarks,
    load_manifest,
    load_record_landmarks,
    read_embeddings,
    write_embeddings,
    write_landmarks,
    write_manifest,
)
from .masks import (
    BLEND_RATIOS,
    MaskScheme,
    SCHEME_LANDMARK_INDICES,
    apply_blend_ratio,
    build_mask,
    convex_hull,
    elastic_deform,
    gaussian_smooth,
    rasterize_hull,
    scheme_landmarks,
)
from .metrics import EvalReport, ScoredSample, auc, auc_bruteforce, render_report, validate_backbone_protocol
from .pipeline import (
    PairSample,
    VideoScore,
    run_infer,
    run_train,
    sample_inference_pairs,
    sample_training_pairs,
    score_video,
    read_score_table,
    write_score_table,
)
from .synth import (
    PseudoDeepfake,
    TransformConfig,
    blend,
    make_pseudo_deepfake,
    preprocess,
)

__version__ = "0.1.0"

__all__ = [
    "BLEND_RATIOS",
    "CombinationMode",
    "CombinedFeature",
    "EmbeddingStore",
    "EvalReport",
    "ExtractorSpec",
    "GaussianMixtureAnomalyModel",
    "GridStatsExtractor",
    "MaskScheme",
    "PairCombiner",
    "PairSample",
    "PseudoDeepfake",
    "SCHEME_LANDMARK_INDICES",
    "ScoredSample",
    "TransformConfig",
    "VideoRecord",
    "VideoScore",
    "apply_blend_ratio",
    "auc",
    "auc_bruteforce",
    "blend",
    "build_mask",
    "combine",
    "combine_matrix",
    "convex_hull",
    "elastic_deform",
    "extract_all",
    "gaussian_smooth",
    "load_landmarks",
    "load_manifest",
    "load_record_landmarks",
    "make_pseudo_deepfake",
    "preprocess",
    "rasterize_hull",
    "read_embeddings",
    "read_score_table",
    "render_report",
    "run_infer",
    "run_train",
    "sample_inference_pairs",
    "sample_training_pairs",
    "scheme_landmarks",
    "score_video",
    "toy_extract",
    "validate_backbone_protocol",
    "write_embeddings",
    "write_landmarks",
    "write_manifest",
    "write_score_table",
]
