from __future__ import annotations

import logging
from collections import Counter
from typing import Any, Dict, List, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from sklearn.metrics import confusion_matrix

from adfcm.errors import DegenerateGMean, LabelsRequired, NoDecidedRecords, ShapeMismatch
from adfcm.schema.models import ClusterLabelMap, GMeanResult, OutcomeSet

LOGGER = logging.getLogger("adfcm_eval")


def as_label_array(labels: Sequence[Any], n: int) -> np.ndarray:
    if labels is None:
        raise LabelsRequired("evaluation needs ground-truth labels")
    lab = np.asarray(labels, dtype=object)
    if lab.shape[0] != n:
        raise ShapeMismatch(f"{lab.shape[0]} labels for {n} outcomes")
    return lab


def class_order(labels: Sequence[Any]) -> List[Any]:
    """Classes by global frequency (descending), ties broken by their string form."""
    counts = Counter(labels)
    return sorted(counts, key=lambda cls: (-counts[cls], str(cls)))


def map_clusters_to_labels(outcomes: OutcomeSet, labels: Sequence[Any]) -> ClusterLabelMap:
    """
    Majority label of each cluster's decided records. Ties go to the globally
    more frequent class; a cluster with no decided records maps to the
    global majority class.
    """
    lab = as_label_array(labels, len(outcomes))
    order = class_order(lab)
    rank = {cls: i for i, cls in enumerate(order)}
    decided = ~outcomes.ambiguous

    mapping: Dict[int, Any] = {}
    for k in range(outcomes.n_clusters):
        members = lab[decided & (outcomes.dominant == k)]
        if members.size == 0:
            mapping[k] = order[0]
            LOGGER.debug("cluster %d has no decided records; mapped to %r", k, order[0])
            continue
        votes = Counter(members)
        mapping[k] = min(votes, key=lambda cls: (-votes[cls], rank[cls]))
    return ClusterLabelMap(mapping)


def accuracy(n_true: int, n_false: int) -> float:
    """Percent of decided records clustered correctly; ambiguous records are not counted."""
    total = n_true + n_false
    if total <= 0:
        raise NoDecidedRecords("every record is ambiguous; accuracy is undefined")
    return 100.0 * n_true / total


def g_mean(outcomes: OutcomeSet, labels: Sequence[Any], mapping: ClusterLabelMap) -> GMeanResult:
    """
    Geometric mean of per-class recall over decided records. Classes with no
    decided members are excluded and reported in `excluded_classes`.
    """
    lab = as_label_array(labels, len(outcomes))
    classes = class_order(lab)
    decided = ~outcomes.ambiguous
    y_true = lab[decided]
    y_pred = mapping.predict(outcomes.dominant[decided])

    present = [cls for cls in classes if np.any(y_true == cls)]
    excluded = tuple(cls for cls in classes if cls not in present)
    if len(present) < 2:
        raise DegenerateGMean(f"G-mean needs >= 2 classes among decided records, found {len(present)}")

    # predictions may name classes absent from the decided truth; keep them as columns
    all_labels = present + [cls for cls in classes if cls not in present]
    cm = confusion_matrix(list(y_true), list(y_pred), labels=all_labels)
    recalls = {cls: float(cm[i, i] / cm[i].sum()) for i, cls in enumerate(present)}
    value = float(np.prod(list(recalls.values())) ** (1.0 / len(recalls)))
    if excluded:
        LOGGER.warning("G-mean excludes classes with no decided records: %s", list(excluded))
    return GMeanResult(value=value, recalls=recalls, excluded_classes=excluded)


def center_error(true_centers: np.ndarray, estimated_centers: np.ndarray) -> float:
    """Summed Euclidean distance under the optimal one-to-one matching of centers."""
    a = np.asarray(true_centers, dtype=float)
    b = np.asarray(estimated_centers, dtype=float)
    if a.ndim != 2 or a.shape != b.shape:
        raise ShapeMismatch(f"center sets have shapes {a.shape} and {b.shape}")
    cost = cdist(a, b)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())
