from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from adfcm.clustering.ambiguity import classify, compute_p_matrix, export_ambiguous
from adfcm.clustering.fcm import run_fcm
from adfcm.errors import InvalidConfig, LabelsRequired
from adfcm.evaluation.privacy import privacy_experiment
from adfcm.evaluation.sampling import undersample_minority
from adfcm.evaluation.sweep import fdr_grid, sweep, sweep_frame
from adfcm.features.selection import select_features
from adfcm.ingest.csv_loader import load_csv
from adfcm.ingest.image import encode_pgm, image_to_dataset, load_pgm, render_segmentation
from adfcm.ingest.synthetic import make_blobs
from adfcm.schema.models import Dataset, FcmModel, OutcomeSet, PMatrix
from adfcm.utils.config import DEFAULT_SWEEP_THRESHOLDS, RunConfig
from adfcm.utils.io import frame_records, render_csv, render_json, sidecar_path, write_outputs

LOGGER = logging.getLogger("adfcm_orchestrator")

DEFAULT_PRIVACY_THRESHOLDS = (0.4, 0.5, 0.6)

Artifacts = Dict[Path, bytes]


# -----------------------------
# Shared steps
# -----------------------------
def _require(value: Optional[str], flag: str) -> str:
    if not value:
        raise InvalidConfig(f"{flag} is required for this command")
    return value


def _load_tabular(cfg: RunConfig, need_labels: bool) -> Dataset:
    ds = load_csv(_require(cfg.input, "--input"), cfg.csv_schema(), normalize=cfg.normalize)
    if need_labels and not ds.has_labels:
        raise LabelsRequired("this command needs class labels; pass --label-column NAME")

    if cfg.minority_label is not None and cfg.minority_fraction is not None:
        ds = undersample_minority(ds, cfg.minority_label, cfg.minority_fraction, seed=cfg.seed)

    if cfg.select_top is not None:
        if not ds.has_labels:
            raise LabelsRequired("--select-top ranks features against labels; pass --label-column NAME")
        ranking = select_features(ds, k=cfg.select_top, bins=cfg.bins)
        ds = ds.select_columns(ranking.selected)
        LOGGER.info("Clustering on top-%d features: %s", cfg.select_top, list(ds.feature_names))
    return ds


def _fit(ds: Dataset, cfg: RunConfig) -> Tuple[FcmModel, PMatrix]:
    LOGGER.info("Fitting FCM: c=%d m=%.3g on %d records", cfg.clusters, cfg.fuzzifier, ds.n_records)
    model = run_fcm(ds, cfg.fcm_config())
    return model, compute_p_matrix(model.memberships)


def _model_summary(model: FcmModel, p: PMatrix, ds: Dataset) -> Dict[str, Any]:
    summary: Dict[str, Any] = {
        "n_clusters": model.n_clusters,
        "fuzzifier": model.m,
        "iterations": model.iterations_run,
        "converged": model.converged,
        "objective": model.objective,
        "features": list(ds.feature_names),
        "centroids": model.centroids.tolist(),
        "p_matrix": p.p.tolist(),
    }
    if ds.normalization is not None:
        summary["centroids_original_units"] = ds.denormalize(model.centroids).tolist()
    return summary


def _outcome_summary(outcomes: OutcomeSet) -> Dict[str, Any]:
    n = len(outcomes)
    return {
        "threshold": outcomes.threshold,
        "n": n,
        "nar": outcomes.n_ambiguous,
        "par": 100.0 * outcomes.n_ambiguous / n,
        "clusters": {str(k): v for k, v in outcomes.cluster_counts().items()},
    }


def _output_path(cfg: RunConfig) -> Path:
    return Path(_require(cfg.output, "--output"))


# -----------------------------
# Commands
# -----------------------------
def run_cluster(cfg: RunConfig) -> Artifacts:
    ds = _load_tabular(cfg, need_labels=False)
    model, p = _fit(ds, cfg)
    outcomes = classify(model.memberships, p, cfg.threshold, record_index=ds.index)

    summary: Dict[str, Any] = {"command": "cluster", **_outcome_summary(outcomes), **_model_summary(model, p, ds)}
    if ds.has_labels:
        row = sweep(model, ds.labels, [cfg.threshold], p=p)[0]
        summary.update({k: v for k, v in row.to_dict().items() if k not in summary})

    out = _output_path(cfg)
    table = outcomes.to_frame()
    artifacts: Artifacts = {}
    if cfg.format == "csv":
        artifacts[out] = render_csv(table)
        artifacts[sidecar_path(out, ".summary.json")] = render_json(summary)
    else:
        artifacts[out] = render_json({**summary, "outcomes": frame_records(table)})

    if cfg.export_ambiguous:
        exported = export_ambiguous(outcomes, ds)
        LOGGER.info("Exporting %d ambiguous records for second-stage review", len(exported))
        artifacts[Path(cfg.export_ambiguous)] = render_csv(exported.to_frame())

    write_outputs(artifacts)
    return artifacts


def run_sweep(cfg: RunConfig) -> Artifacts:
    ds = _load_tabular(cfg, need_labels=True)
    model, p = _fit(ds, cfg)
    thresholds = cfg.threshold_list(DEFAULT_SWEEP_THRESHOLDS)
    rows = sweep(model, ds.labels, thresholds, p=p)
    for r in rows:
        LOGGER.info(
            "t=%.2f NAR=%d NFR=%d NFRA=%d accuracy=%s", r.threshold, r.nar, r.nfr, r.nfra,
            "n/a" if r.accuracy is None else f"{r.accuracy:.2f}",
        )

    out = _output_path(cfg)
    if cfg.format == "csv":
        artifacts = {out: render_csv(sweep_frame(rows))}
    else:
        payload = {"command": "sweep", **_model_summary(model, p, ds), "rows": [r.to_dict() for r in rows]}
        artifacts = {out: render_json(payload)}
    write_outputs(artifacts)
    return artifacts


def _series_path(out: Path, threshold: float) -> Path:
    return out.with_name(f"{out.stem}_t{threshold:.2f}{out.suffix}")


def run_segment(cfg: RunConfig) -> Artifacts:
    img = load_pgm(_require(cfg.input, "--input"))
    ds = image_to_dataset(img)
    model, p = _fit(ds, cfg)

    out = _output_path(cfg)
    thresholds = cfg.threshold_list((cfg.threshold,))
    series = len(thresholds) > 1
    artifacts: Artifacts = {}
    per_threshold: List[Dict[str, Any]] = []
    for t in thresholds:
        outcomes = classify(model.memberships, p, t)
        segmented = render_segmentation(img, outcomes, model.centroids)
        path = _series_path(out, t) if series else out
        artifacts[path] = encode_pgm(segmented)
        per_threshold.append({"path": path.name, **_outcome_summary(outcomes)})

    summary = {"command": "segment", **_model_summary(model, p, ds), "images": per_threshold}
    artifacts[sidecar_path(out, ".summary.json")] = render_json(summary)
    write_outputs(artifacts)
    return artifacts


def run_select_features(cfg: RunConfig) -> Artifacts:
    ds = load_csv(_require(cfg.input, "--input"), cfg.csv_schema(), normalize=cfg.normalize)
    if not ds.has_labels:
        raise LabelsRequired("select-features needs class labels; pass --label-column NAME")
    ranking = select_features(ds, k=cfg.select_top, bins=cfg.bins)

    out = _output_path(cfg)
    table = ranking.to_frame()
    if cfg.format == "csv":
        artifacts = {out: render_csv(table)}
    else:
        payload = {"command": "select-features", "bins": cfg.bins, "selected": list(ranking.selected),
                   "scores": frame_records(table)}
        artifacts = {out: render_json(payload)}
    write_outputs(artifacts)
    return artifacts


def run_privacy(cfg: RunConfig) -> Artifacts:
    if cfg.input:
        clean = load_csv(cfg.input, cfg.csv_schema(), normalize=cfg.normalize)
        source = {"input": Path(cfg.input).name}
    else:
        clean, centers = make_blobs(
            c=cfg.clusters,
            per_cluster=cfg.per_cluster,
            spread=cfg.spread,
            bounds=(0.0, 1.0),
            seed=cfg.seed,
            n_features=cfg.n_features,
        )
        source = {"blobs": {"per_cluster": cfg.per_cluster, "spread": cfg.spread, "centers": centers.tolist()}}

    report = privacy_experiment(
        clean,
        noise_fraction=cfg.noise,
        c=cfg.clusters,
        thresholds=cfg.threshold_list(DEFAULT_PRIVACY_THRESHOLDS),
        seed=cfg.seed,
        m=cfg.fuzzifier,
        repeats=cfg.repeats,
        max_iter=cfg.max_iter,
        tol=cfg.tol,
    )

    out = _output_path(cfg)
    if cfg.format == "csv":
        table = pd.DataFrame(
            [{k: v for k, v in r.to_dict().items() if k not in {"errors", "ambiguous"}} for r in report.rows]
        )
        artifacts = {out: render_csv(table)}
    else:
        artifacts = {out: render_json({"command": "privacy", "source": source, **report.to_dict()})}
    write_outputs(artifacts)
    return artifacts


def run_grid(cfg: RunConfig) -> Artifacts:
    ds = _load_tabular(cfg, need_labels=True)
    table = fdr_grid(
        ds,
        clusters=cfg.grid_clusters,
        fuzzifiers=cfg.grid_fuzzifiers,
        threshold=cfg.threshold,
        max_iter=cfg.max_iter,
        tol=cfg.tol,
        seed=cfg.seed,
    )
    out = _output_path(cfg)
    if cfg.format == "csv":
        artifacts = {out: render_csv(table)}
    else:
        artifacts = {out: render_json({"command": "grid", "rows": frame_records(table)})}
    write_outputs(artifacts)
    return artifacts


COMMANDS = {
    "cluster": run_cluster,
    "sweep": run_sweep,
    "segment": run_segment,
    "select-features": run_select_features,
    "privacy": run_privacy,
    "grid": run_grid,
}
