"""Evaluation: AUC with exact tie handling and report tables.

AUC follows the Mann-Whitney formulation: over all positive/negative
pairs, the fraction where the positive outscores the negative, ties
counted half. It is computed from midrank sums in O(n log n); a direct
O(n^2) pair-counting implementation is kept for cross-checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class ScoredSample:
    id: str
    score: float
    label: int  # 0 = real/negative, 1 = fake/positive


@dataclass
class EvalReport:
    dataset: str
    n_pos: int
    n_neg: int
    auc: float
    config: dict = field(default_factory=dict)


def _scores_labels(samples) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray([s.score for s in samples], dtype=np.float64)
    labels = np.asarray([s.label for s in samples], dtype=np.int64)
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    if not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must be 0 or 1")
    return scores, labels


def _midranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the average rank of their group."""
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auc(samples) -> float:
    """Probability a random positive outscores a random negative (ties half)."""
    scores, labels = _scores_labels(samples)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative sample")
    ranks = _midranks(scores)
    rank_sum = ranks[labels == 1].sum()
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auc_bruteforce(samples) -> float:
    """O(n^2) pair-counting AUC, used by the --oracle-check flag."""
    scores, labels = _scores_labels(samples)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    if len(pos) == 0 or len(neg) == 0:
        raise ValueError("AUC needs at least one positive and one negative sample")
    wins = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return (wins + 0.5 * ties) / (len(pos) * len(neg))


def validate_backbone_protocol(
    real_scores, pseudo_scores, dataset: str = "validation", config: dict | None = None
) -> EvalReport:
    """AUC of real vs pseudo-deepfake scores (pseudo-deepfakes positive).

    This is the fake-free model-selection signal: checkpoints are ranked by
    this AUC without touching any actual fake media.
    """
    real_scores = list(real_scores)
    pseudo_scores = list(pseudo_scores)
    if not real_scores or not pseudo_scores:
        raise ValueError("both score lists must be non-empty")
    samples = [ScoredSample(f"real_{i}", s, 0) for i, s in enumerate(real_scores)]
    samples += [ScoredSample(f"pseudo_{i}", s, 1) for i, s in enumerate(pseudo_scores)]
    return EvalReport(
        dataset=dataset,
        n_pos=len(pseudo_scores),
        n_neg=len(real_scores),
        auc=auc(samples),
        config=dict(config or {}),
    )


def render_report(reports: list[EvalReport], row_header: str = "Method") -> str:
    """Aligned text table: one row per configuration, one column per dataset
    plus an Avg. column, AUC as percentages with one decimal."""
    if not reports:
        raise ValueError("no reports to render")
    datasets: list[str] = []
    rows: dict[str, dict[str, float]] = {}
    for rep in reports:
        row = rep.config.get("row") or rep.config.get("mode") or "result"
        if rep.dataset not in datasets:
            datasets.append(rep.dataset)
        rows.setdefault(str(row), {})[rep.dataset] = rep.auc

    header = [row_header, *datasets, "Avg."]
    body = []
    for row_label, cells in rows.items():
        values = [cells.get(ds) for ds in datasets]
        present = [v for v in values if v is not None]
        avg = sum(present) / len(present)
        body.append(
            [row_label]
            + [("-" if v is None else f"{100.0 * v:.1f}") for v in values]
            + [f"{100.0 * avg:.1f}"]
        )

    widths = [max(len(r[c]) for r in [header, *body]) for c in range(len(header))]
    lines = []
    for row in [header, *body]:
        lines.append("  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"
