from __future__ import annotations

import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from adfcm.clustering.ambiguity import classify, compute_p_matrix
from adfcm.clustering.fcm import run_fcm
from adfcm.errors import DegenerateGMean, NoDecidedRecords
from adfcm.evaluation.metrics import accuracy, as_label_array, g_mean, map_clusters_to_labels
from adfcm.schema.models import Dataset, FcmConfig, FcmModel, PMatrix, SweepRow
from adfcm.schema.validate import validate_thresholds

LOGGER = logging.getLogger("adfcm_eval")


def sweep(
    model: FcmModel,
    labels: Sequence[Any],
    thresholds: Sequence[float],
    p: Optional[PMatrix] = None,
) -> List[SweepRow]:
    """
    One row per threshold from a single fitted model; U and P stay fixed.

    Falsity is judged against plain argmax defuzzification with the
    cluster->label mapping of the threshold-0 outcomes, so the false set is
    the same at every threshold and only the ambiguous set grows.
    """
    thresholds = [float(t) for t in thresholds]
    validate_thresholds(thresholds)
    u = model.memberships
    lab = as_label_array(labels, u.n_records)
    p = compute_p_matrix(u) if p is None else p

    plain = classify(u, p, 0.0)
    mapping = map_clusters_to_labels(plain, lab)
    falsely_clustered = mapping.predict(plain.dominant) != lab
    n = u.n_records

    rows: List[SweepRow] = []
    for t in thresholds:
        outcomes = classify(u, p, t)
        amb = outcomes.ambiguous
        nar = int(np.count_nonzero(amb))
        nfr = int(np.count_nonzero(~amb & falsely_clustered))
        ntr = int(np.count_nonzero(~amb & ~falsely_clustered))
        nfra = int(np.count_nonzero(amb & falsely_clustered))

        try:
            acc: Optional[float] = accuracy(ntr, nfr)
        except NoDecidedRecords:
            LOGGER.warning("Threshold %.3f leaves no decided records", t)
            acc = None
        try:
            gm: Optional[float] = g_mean(outcomes, lab, mapping).value
        except DegenerateGMean:
            gm = None

        rows.append(
            SweepRow(
                threshold=t,
                n=n,
                nar=nar,
                ntr=ntr,
                nfr=nfr,
                nfra=nfra,
                par=100.0 * nar / n,
                pbfra=100.0 * nfra / nar if nar else 0.0,
                accuracy=acc,
                g_mean=gm,
            )
        )
    return rows


def sweep_frame(rows: Sequence[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([r.to_dict() for r in rows])


def fdr_grid(
    dataset: Dataset,
    clusters: Sequence[int],
    fuzzifiers: Sequence[float],
    threshold: float,
    max_iter: int = 300,
    tol: float = 1e-6,
    seed: int = 0,
) -> pd.DataFrame:
    """False detection rate of AD-FCM for every (cluster count, fuzzifier) pair."""
    lab = as_label_array(dataset.labels, dataset.n_records)
    rows: List[Dict[str, Any]] = []
    for c in clusters:
        for m in fuzzifiers:
            cfg = FcmConfig(c=int(c), m=float(m), max_iter=max_iter, tol=tol, seed=seed)
            LOGGER.info("Grid point c=%d m=%.3g", cfg.c, cfg.m)
            model = run_fcm(dataset, cfg)
            row = sweep(model, lab, [threshold])[0]
            rows.append(
                {
                    "clusters": cfg.c,
                    "fuzzifier": cfg.m,
                    "threshold": threshold,
                    "nar": row.nar,
                    "par": row.par,
                    "accuracy": row.accuracy,
                    "fdr": row.fdr,
                    "converged": model.converged,
                }
            )
    return pd.DataFrame(rows)
