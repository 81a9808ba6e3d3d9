"""Command-line interface: synth, extract, fit-adm, score, eval."""

from __future__ import annotations

import json
from pathlib import Path

import click
import numpy as np
from PIL import Image

from .combine import CombinationMode
from .anomaly import GaussianMixtureAnomalyModel
from .features import ExtractorSpec, extract_all
from .manifest import (
    load_manifest,
    load_record_landmarks,
    read_embeddings,
    write_embeddings,
)
from .masks import MaskScheme
from .metrics import EvalReport, ScoredSample, auc, auc_bruteforce, render_report
from .pipeline import run_infer, run_train, read_score_table, write_score_table
from .features import read_frame
from .synth import TransformConfig, make_pseudo_deepfake

_SCHEME_CHOICES = ["all"] + [s.value for s in MaskScheme]
_MODE_CHOICES = [m.value for m in CombinationMode]


@click.group()
def main():
    """Differential anomaly-detection toolkit for face-video forgery screening."""


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--scheme", type=click.Choice(_SCHEME_CHOICES), default="all", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, default=4, show_default=True, help="Pseudo-deepfakes per video.")
@click.option("--dump-masks", is_flag=True, help="Also write each mask as an 8-bit grayscale PNG.")
def synth(manifest_path, out_dir, scheme, seed, count, dump_masks):
    """Synthesize pseudo-deepfakes from real videos of a manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    chosen = None if scheme == "all" else MaskScheme(scheme)
    cfg = TransformConfig()
    records = [r for r in load_manifest(manifest_path) if r.label == "real"]
    if not records:
        raise click.ClickException("manifest has no real videos to synthesize from")
    written = 0
    for idx, rec in enumerate(records):
        landmarks = load_record_landmarks(rec)
        rng = np.random.default_rng(np.random.SeedSequence((seed, idx)))
        take = min(count, rec.n_frames)
        frame_ids = sorted(rng.choice(rec.n_frames, size=take, replace=False))
        for frame_id in frame_ids:
            frame = read_frame(rec.frame_paths[frame_id])
            sample = make_pseudo_deepfake(frame, landmarks[frame_id], chosen, cfg, seed=rng)
            stem = f"{rec.video_id}_f{frame_id:03d}"
            Image.fromarray(sample.image).save(out / f"{stem}.png")
            sidecar = {
                "video_id": rec.video_id,
                "frame_index": int(frame_id),
                "frame_path": rec.frame_paths[frame_id],
                "base_seed": seed,
                **sample.provenance,
            }
            (out / f"{stem}.json").write_text(json.dumps(sidecar, indent=2) + "\n")
            if dump_masks:
                mask_u8 = np.clip(np.rint(sample.mask * 255.0), 0, 255).astype(np.uint8)
                Image.fromarray(mask_u8, mode="L").save(out / f"{stem}_mask.png")
            written += 1
    click.echo(f"wrote {written} pseudo-deepfakes to {out}")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--extractor", type=click.Choice(["toy", "external"]), default="toy", show_default=True)
@click.option("--external-file", type=click.Path(exists=True), default=None)
@click.option("--external-dim", type=int, default=1792, show_default=True,
              help="Expected dimension of the external embedding file.")
def extract(manifest_path, out_path, extractor, external_file, external_dim):
    """Extract embeddings for every (video, frame) of a manifest."""
    records = load_manifest(manifest_path)
    if extractor == "external":
        if external_file is None:
            raise click.ClickException("--external-file is required with --extractor external")
        spec = ExtractorSpec(kind="external", dim=external_dim, external_path=external_file)
    else:
        spec = ExtractorSpec()
    store = extract_all(records, spec)
    write_embeddings(store, out_path)
    click.echo(f"wrote {len(store)} embeddings (dim {store.dim}) to {out_path}")


@main.command("fit-adm")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--embeddings", "embeddings_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--components", type=int, default=3, show_default=True)
@click.option("--combine", "mode", type=click.Choice(_MODE_CHOICES), default="sub2", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-6, show_default=True)
@click.option("--max-iter", type=int, default=200, show_default=True)
@click.option("--k-pairs", type=int, default=60, show_default=True)
@click.option("--min-gap", type=int, default=5, show_default=True)
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
def fit_adm(manifest_path, embeddings_path, out_path, components, mode, seed, tol,
            max_iter, k_pairs, min_gap, report_path):
    """Fit the Gaussian-mixture anomaly model on real training pairs."""
    store = read_embeddings(embeddings_path)
    _, report = run_train(
        manifest_path,
        store=store,
        out_model=out_path,
        n_components=components,
        mode=CombinationMode(mode),
        k_pairs=k_pairs,
        min_gap=min_gap,
        seed=seed,
        tol=tol,
        max_iter=max_iter,
    )
    text = report.to_text()
    if report_path:
        Path(report_path).write_text(text)
    click.echo(text.rstrip("\n"))
    click.echo(f"wrote model to {out_path}")


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--embeddings", "embeddings_path", required=True, type=click.Path(exists=True))
@click.option("--model", "model_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@click.option("--combine", "mode", type=click.Choice(_MODE_CHOICES), default="sub2", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--pairs", type=int, default=30, show_default=True)
@click.option("--min-gap", type=int, default=5, show_default=True)
@click.option("--split", type=click.Choice(["train", "val", "test"]), default="test", show_default=True)
def score(manifest_path, embeddings_path, model_path, out_path, mode, seed, pairs, min_gap, split):
    """Score videos of a manifest split; writes a tab-separated table."""
    store = read_embeddings(embeddings_path)
    model = GaussianMixtureAnomalyModel.load(model_path)
    scores = run_infer(
        manifest_path,
        store,
        model,
        mode=CombinationMode(mode),
        seed=seed,
        n_pairs=pairs,
        min_gap=min_gap,
        split=split,
    )
    write_score_table(scores, out_path)
    click.echo(f"wrote {len(scores)} video scores to {out_path}")


@main.command("eval")
@click.option("--scores", "score_paths", required=True, multiple=True, type=click.Path(exists=True))
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
@click.option("--row-label", default=None, help="Row label for the report (defaults to 'result').")
@click.option("--oracle-check", is_flag=True,
              help="Cross-check AUC against the O(n^2) pair-counting oracle (inputs < 10^4 rows).")
def eval_cmd(score_paths, out_path, row_label, oracle_check):
    """Compute AUC per score table and render a report."""
    reports = []
    checked = 0
    for path in score_paths:
        rows = read_score_table(path)
        samples = [
            ScoredSample(r.video_id, r.score, 1 if r.label == "fake" else 0) for r in rows
        ]
        value = auc(samples)
        if oracle_check:
            if len(samples) >= 10_000:
                click.echo(f"oracle check skipped for {path}: {len(samples)} samples (limit 10^4)")
            else:
                reference = auc_bruteforce(samples)
                if abs(value - reference) > 1e-12:
                    raise click.ClickException(
                        f"AUC mismatch vs pair-counting oracle: {value!r} vs {reference!r}"
                    )
                checked += 1
        n_pos = sum(s.label for s in samples)
        reports.append(
            EvalReport(
                dataset=Path(path).stem,
                n_pos=n_pos,
                n_neg=len(samples) - n_pos,
                auc=value,
                config={"row": row_label} if row_label else {},
            )
        )
    table = render_report(reports)
    if oracle_check and checked:
        click.echo("oracle check passed")
    click.echo(table.rstrip("\n"))
    if out_path:
        Path(out_path).write_text(table)


if __name__ == "__main__":
    main()
