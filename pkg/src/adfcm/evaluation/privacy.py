from __future__ import annotations

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from adfcm.clustering.ambiguity import certainty_floor, classify, compute_p_matrix
from adfcm.clustering.fcm import run_fcm
from adfcm.errors import DegenerateData, InvalidClusterCount, InvalidConfig, NumericError, ShapeMismatch
from adfcm.evaluation.metrics import center_error
from adfcm.schema.models import Dataset, FcmConfig, FcmModel, PrivacyReport, PrivacyRow
from adfcm.schema.validate import validate_thresholds

LOGGER = logging.getLogger("adfcm_eval")

NOISE_LABEL = "noise"

BoundsLike = Union[Tuple[float, float], Sequence[Tuple[float, float]]]


def _resolve_bounds(dataset: Dataset, bounds: Optional[BoundsLike]) -> Tuple[np.ndarray, np.ndarray]:
    if bounds is None:
        return dataset.records.min(axis=0), dataset.records.max(axis=0)
    arr = np.asarray(bounds, dtype=float)
    if arr.shape == (2,):
        arr = np.tile(arr, (dataset.n_features, 1))
    if arr.shape != (dataset.n_features, 2):
        raise ShapeMismatch(f"bounds need one (low, high) pair per feature, got shape {arr.shape}")
    if np.any(arr[:, 1] < arr[:, 0]):
        raise InvalidConfig("noise bounds must have low <= high")
    return arr[:, 0], arr[:, 1]


def add_noise_queries(
    dataset: Dataset,
    fraction: float,
    bounds: Optional[BoundsLike] = None,
    seed: int = 0,
) -> Dataset:
    """
    Append floor(fraction * N) uniform-random records inside `bounds`
    (per-feature data range by default). Noise records are flagged in
    `Dataset.synthetic` and labelled NOISE_LABEL when the dataset has labels.
    """
    if fraction < 0:
        raise InvalidConfig(f"noise fraction must be >= 0, got {fraction}")
    n_noise = int(math.floor(fraction * dataset.n_records))
    if n_noise == 0:
        return dataset

    lo, hi = _resolve_bounds(dataset, bounds)
    rng = np.random.default_rng(seed)
    noise = rng.uniform(lo, hi, size=(n_noise, dataset.n_features))

    labels = None
    if dataset.labels is not None:
        labels = np.concatenate([dataset.labels.astype(object), np.full(n_noise, NOISE_LABEL, dtype=object)])
    start = int(dataset.index.max()) + 1
    LOGGER.info("Added %d noise records to %d originals", n_noise, dataset.n_records)
    return Dataset(
        records=np.vstack([dataset.records, noise]),
        feature_names=dataset.feature_names,
        labels=labels,
        normalization=dataset.normalization,
        index=np.concatenate([dataset.index, np.arange(start, start + n_noise)]),
        synthetic=np.concatenate([dataset.synthetic, np.ones(n_noise, dtype=bool)]),
    )


def _ad_fcm_centers(
    noisy: Dataset, model: FcmModel, threshold: float, config: FcmConfig
) -> Tuple[Optional[np.ndarray], int]:
    """
    Centers re-fitted on the non-ambiguous records, warm-started from `model`,
    and the number of records set aside.
    """
    u = model.memberships
    outcomes = classify(u, compute_p_matrix(u), threshold)
    n_ambiguous = outcomes.n_ambiguous
    keep = np.flatnonzero(~outcomes.ambiguous)
    if n_ambiguous == 0:
        return model.centroids, 0
    if keep.size < config.c:
        LOGGER.warning("Threshold %.3f keeps %d records; row flagged", threshold, keep.size)
        return None, n_ambiguous
    try:
        return run_fcm(noisy.subset(keep), config, init=model.centroids).centroids, n_ambiguous
    except (NumericError, InvalidClusterCount, DegenerateData) as e:
        LOGGER.warning("Re-fit at threshold %.3f failed: %s", threshold, e)
        return None, n_ambiguous


def privacy_experiment(
    clean: Dataset,
    noise_fraction: float,
    c: int,
    thresholds: Sequence[float],
    seed: int = 0,
    m: float = 2.0,
    repeats: int = 1,
    bounds: Optional[BoundsLike] = None,
    max_iter: int = 300,
    tol: float = 1e-6,
    reference_centers: Optional[np.ndarray] = None,
) -> PrivacyReport:
    """
    Center error of plain FCM and of AD-FCM after noisy records are added.

    The reference centers are FCM centers of the clean data unless given.
    Each repeat r draws noise and seeds FCM with `seed + r`. A threshold that
    leaves too few decided records yields None for that run. Each row also
    records how many records were set aside per run.
    """
    thresholds = [float(t) for t in thresholds]
    validate_thresholds(thresholds)
    if repeats < 1:
        raise InvalidConfig(f"repeats must be >= 1, got {repeats}")
    if clean.n_records < c:
        raise InvalidClusterCount(f"clean data has {clean.n_records} records for {c} clusters")

    if reference_centers is None:
        reference = run_fcm(clean, FcmConfig(c=c, m=m, max_iter=max_iter, tol=tol, seed=seed)).centroids
    else:
        reference = np.asarray(reference_centers, dtype=float)

    floor = certainty_floor(c)
    for t in thresholds:
        if 0.0 < t <= floor:
            LOGGER.warning(
                "Threshold %.3f is at or below the balanced certainty floor %.3f for c=%d; "
                "expect few or no ambiguous records",
                t,
                floor,
                c,
            )

    seeds = tuple(seed + r for r in range(repeats))
    plain_errors: List[Optional[float]] = []
    ad_errors: Dict[float, List[Optional[float]]] = {t: [] for t in thresholds}
    ad_counts: Dict[float, List[int]] = {t: [] for t in thresholds}

    for s in seeds:
        LOGGER.info("Privacy run seed=%d", s)
        cfg = FcmConfig(c=c, m=m, max_iter=max_iter, tol=tol, seed=s)
        noisy = add_noise_queries(clean, noise_fraction, bounds=bounds, seed=s)
        model = run_fcm(noisy, cfg)
        plain_errors.append(center_error(reference, model.centroids))
        for t in thresholds:
            centers, n_ambiguous = _ad_fcm_centers(noisy, model, t, cfg)
            ad_errors[t].append(None if centers is None else center_error(reference, centers))
            ad_counts[t].append(n_ambiguous)

    rows = [PrivacyRow(method="fcm", threshold=None, errors=tuple(plain_errors), ambiguous=(0,) * repeats)]
    rows += [
        PrivacyRow(method="ad-fcm", threshold=t, errors=tuple(ad_errors[t]), ambiguous=tuple(ad_counts[t]))
        for t in thresholds
    ]
    return PrivacyReport(noise_fraction=noise_fraction, n_clusters=c, seeds=seeds, rows=tuple(rows))
