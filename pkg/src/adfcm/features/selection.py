from __future__ import annotations

import logging
import math
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.stats import entropy as shannon_entropy

from adfcm.errors import InvalidConfig, LabelsRequired, ShapeMismatch, UnknownClass
from adfcm.schema.models import Dataset, DiscreteColumn, FeatureRanking, FeatureScore

LOGGER = logging.getLogger("adfcm_features")

DEFAULT_BINS = 10


# -----------------------------
# Discretization
# -----------------------------
def discretize(column: Sequence[float], bins: int = DEFAULT_BINS) -> DiscreteColumn:
    """
    Equal-frequency (quantile) binning. Bin indices are renumbered over the
    bins that actually received records, so `bin_count` is the number of
    realized values.

    A column with no more distinct values than `bins` gets one bin per value
    (quantile cuts cannot split ties); `bin_edges` then holds those values.
    """
    if bins < 2:
        raise InvalidConfig(f"bins must be >= 2, got {bins}")
    values = np.asarray(column, dtype=float)
    if values.size == 0:
        raise ShapeMismatch("cannot discretize an empty column")

    distinct, inverse = np.unique(values, return_inverse=True)
    if distinct.size <= bins:
        return DiscreteColumn(
            values=inverse.reshape(-1).astype(np.int64),
            bin_count=int(distinct.size),
            bin_edges=tuple(float(v) for v in distinct),
        )

    codes, edges = pd.qcut(values, q=bins, labels=False, retbins=True, duplicates="drop")
    _, dense = np.unique(codes, return_inverse=True)
    return DiscreteColumn(
        values=dense.astype(np.int64),
        bin_count=int(dense.max()) + 1,
        bin_edges=tuple(float(e) for e in edges),
    )


def encode_labels(labels: Sequence[Any]) -> DiscreteColumn:
    """Class labels as a discrete column (codes in order of first appearance)."""
    codes, uniques = pd.factorize(pd.Series(list(labels)), sort=False)
    return DiscreteColumn(values=codes.astype(np.int64), bin_count=len(uniques), bin_edges=())


# -----------------------------
# Information measures
# -----------------------------
def _entropy_of(codes: np.ndarray) -> float:
    counts = np.bincount(codes)
    counts = counts[counts > 0]
    if counts.size <= 1:
        return 0.0
    return float(shannon_entropy(counts, base=2))


def entropy(d: DiscreteColumn) -> float:
    """Shannon entropy in bits over realized bins."""
    return _entropy_of(d.values)


def relative_uncertainty(d: DiscreteColumn, m_samples: Optional[int] = None) -> float:
    """H(X) / log2(min(N_X, m)); m defaults to the number of samples."""
    m = d.n_records if m_samples is None else int(m_samples)
    denom_arg = min(d.bin_count, m)
    if denom_arg <= 1:
        return 0.0
    return float(min(1.0, entropy(d) / math.log2(denom_arg)))


def _class_mask(labels: np.ndarray, class_j: Any) -> np.ndarray:
    mask = labels == class_j
    if not np.any(mask):
        raise UnknownClass(f"class {class_j!r} does not occur in the labels")
    return mask


def conditional_ru(feature: DiscreteColumn, labels: Sequence[Any], class_j: Any) -> float:
    """
    Entropy of the feature within class_j, normalized by
    log2(min(N_Cj, N_A)) where N_A is the feature's number of values.
    """
    lab = np.asarray(labels, dtype=object)
    if lab.shape[0] != feature.n_records:
        raise ShapeMismatch(f"{lab.shape[0]} labels for {feature.n_records} records")
    mask = _class_mask(lab, class_j)
    n_class = int(np.count_nonzero(mask))
    denom_arg = min(n_class, feature.bin_count)
    if denom_arg <= 1:
        return 0.0
    h = _entropy_of(feature.values[mask])
    return float(min(1.0, h / math.log2(denom_arg)))


def bias_coefficient(feature: DiscreteColumn, labels: Sequence[Any], class_j: Any) -> float:
    return 1.0 - conditional_ru(feature, labels, class_j)


def symmetric_uncertainty(feature: DiscreteColumn, labels: Sequence[Any]) -> float:
    """SU = 2 * IG / (H(A) + H(C)) with IG = H(A) - H(A|C); 0 when both entropies vanish."""
    classes = encode_labels(labels)
    if classes.n_records != feature.n_records:
        raise ShapeMismatch(f"{classes.n_records} labels for {feature.n_records} records")

    h_a = entropy(feature)
    h_c = entropy(classes)
    if h_a + h_c == 0.0:
        return 0.0

    table = pd.crosstab(classes.values, feature.values).to_numpy()
    n = table.sum()
    h_a_given_c = 0.0
    for row in table:
        n_c = row.sum()
        nz = row[row > 0]
        if nz.size > 1:
            h_a_given_c += (n_c / n) * float(shannon_entropy(nz, base=2))

    ig = h_a - h_a_given_c
    return float(min(1.0, max(0.0, 2.0 * ig / (h_a + h_c))))


# -----------------------------
# Ranking
# -----------------------------
def score_feature(
    feature: DiscreteColumn,
    labels: Sequence[Any],
    feature_index: int,
    name: str,
    classes: Sequence[Any],
) -> FeatureScore:
    ru_per_class = {cls: conditional_ru(feature, labels, cls) for cls in classes}
    return FeatureScore(
        feature_index=feature_index,
        name=name,
        su=symmetric_uncertainty(feature, labels),
        ru=relative_uncertainty(feature),
        ru_per_class=ru_per_class,
        bias_per_class={cls: 1.0 - ru for cls, ru in ru_per_class.items()},
    )


def select_features(
    dataset: Dataset,
    labels: Optional[Sequence[Any]] = None,
    k: Optional[int] = None,
    bins: int = DEFAULT_BINS,
) -> FeatureRanking:
    """
    Rank features by symmetric uncertainty with the class (descending, ties
    to the lower index) and keep the top k. `labels` defaults to the dataset's.
    """
    lab = dataset.labels if labels is None else np.asarray(labels, dtype=object)
    if lab is None:
        raise LabelsRequired("feature selection needs class labels")
    lab = np.asarray(lab, dtype=object)
    k = dataset.n_features if k is None else int(k)
    if not 1 <= k <= dataset.n_features:
        raise InvalidConfig(f"k must be in [1, {dataset.n_features}], got {k}")

    classes = sorted(pd.unique(pd.Series(lab)), key=str)
    scores = []
    for j in range(dataset.n_features):
        col = discretize(dataset.records[:, j], bins=bins)
        scores.append(score_feature(col, lab, j, dataset.feature_names[j], classes))
        LOGGER.debug("feature %s: SU=%.4f", dataset.feature_names[j], scores[-1].su)

    ranked = sorted(scores, key=lambda s: (-s.su, s.feature_index))
    selected = tuple(s.feature_index for s in ranked[:k])
    LOGGER.info("Selected features: %s", [dataset.feature_names[j] for j in selected])
    return FeatureRanking(selected=selected, scores=tuple(ranked))
