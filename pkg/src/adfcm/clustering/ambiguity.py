from __future__ import annotations

import logging
from typing import Optional, Sequence, Union

import numpy as np

from adfcm.errors import InvalidClusterCount, ShapeMismatch
from adfcm.schema.models import (
    AmbiguousExport,
    CertaintyThreshold,
    Dataset,
    MembershipMatrix,
    OutcomeSet,
    PMatrix,
)

LOGGER = logging.getLogger("adfcm_ambiguity")

ThresholdLike = Union[float, CertaintyThreshold]


def compute_p_matrix(u: MembershipMatrix) -> PMatrix:
    """
    Prior table from average memberships.

    Column k is fixed by cluster k's average membership a[k]: the diagonal
    holds a[k], every other row holds its complement 1 - a[k].
    """
    avgs = u.u.mean(axis=1)
    c = avgs.shape[0]
    p = np.tile(1.0 - avgs, (c, 1))
    np.fill_diagonal(p, avgs)
    p.setflags(write=False)
    avgs.setflags(write=False)
    return PMatrix(p=p, cluster_avgs=avgs)


def certainty_factors(u: Union[MembershipMatrix, np.ndarray], p: PMatrix) -> np.ndarray:
    """
    Certainty factor of every record (column of `u`).

    With C' the dominant cluster of a record, the score is u_k for k = C' and
    1 - u_k otherwise; CF is the mean over clusters of score_k * p[C'][k].
    """
    arr = u.u if isinstance(u, MembershipMatrix) else np.asarray(u, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    c = arr.shape[0]
    if p.n_clusters != c:
        raise ShapeMismatch(f"P-matrix is {p.n_clusters}x{p.n_clusters} but memberships have {c} clusters")

    cols = np.arange(arr.shape[1])
    dominant = np.argmax(arr, axis=0)
    scores = 1.0 - arr
    scores[dominant, cols] = arr[dominant, cols]
    rows = p.p[dominant].T  # c x N: row C' of P for each record
    cf = np.sum(scores * rows, axis=0) / c
    return np.clip(cf, 0.0, 1.0)


def certainty_floor(c: int) -> float:
    """
    Lowest certainty factor reachable when every cluster's average membership
    is 1/c: a record with all memberships equal scores (1 + (c-1)(c-2)) / c^2.
    That is 1/4 for c=2, 1/3 for c=3 and 0.52 for c=5, so thresholds at or
    below it mark (almost) nothing ambiguous.
    """
    if c < 1:
        raise InvalidClusterCount(f"need at least 1 cluster, got {c}")
    return (1 + (c - 1) * (c - 2)) / c**2


def certainty_factor(record_column: Sequence[float], p: PMatrix) -> float:
    return float(certainty_factors(np.asarray(record_column, dtype=float).reshape(-1, 1), p)[0])


def classify(
    u: MembershipMatrix,
    p: PMatrix,
    threshold: ThresholdLike,
    record_index: Optional[np.ndarray] = None,
) -> OutcomeSet:
    """A record is ambiguous when its certainty factor is strictly below the threshold."""
    t = CertaintyThreshold.coerce(threshold)
    cf = certainty_factors(u, p)
    idx = np.arange(u.n_records) if record_index is None else np.asarray(record_index)
    outcomes = OutcomeSet(
        record_index=idx,
        dominant=u.dominant(),
        certainty=cf,
        threshold=t.value,
        n_clusters=u.n_clusters,
    )
    LOGGER.info(
        "Threshold %.3f: %d of %d records ambiguous", t.value, outcomes.n_ambiguous, len(outcomes)
    )
    return outcomes


def export_ambiguous(outcomes: OutcomeSet, dataset: Dataset) -> AmbiguousExport:
    """The ambiguous records in original order, with their certainty factors."""
    if len(outcomes) != dataset.n_records:
        raise ShapeMismatch(f"{len(outcomes)} outcomes for {dataset.n_records} records")
    pos = np.flatnonzero(outcomes.ambiguous)
    return AmbiguousExport(
        index=dataset.index[pos],
        records=dataset.records[pos],
        feature_names=dataset.feature_names,
        labels=None if dataset.labels is None else dataset.labels[pos],
        certainty=outcomes.certainty[pos],
        dominant=outcomes.dominant[pos],
    )
