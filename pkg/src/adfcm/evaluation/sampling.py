from __future__ import annotations

import logging
from typing import Any

import numpy as np
from imblearn.under_sampling import RandomUnderSampler

from adfcm.errors import DegenerateData, InvalidConfig, LabelsRequired, UnknownClass
from adfcm.schema.models import Dataset

LOGGER = logging.getLogger("adfcm_eval")


def undersample_minority(dataset: Dataset, minority_label: Any, fraction: float, seed: int = 0) -> Dataset:
    """
    Randomly drop minority-class records until they make up `fraction` of the
    result. Record order and original indices are preserved.
    """
    if dataset.labels is None:
        raise LabelsRequired("undersampling needs class labels")
    if not 0.0 < fraction < 1.0:
        raise InvalidConfig(f"minority fraction must be in (0, 1), got {fraction}")

    labels = dataset.labels.astype(object)
    is_minor = np.array([lab == minority_label or str(lab) == str(minority_label) for lab in labels])
    minor = np.flatnonzero(is_minor)
    if minor.size == 0:
        raise UnknownClass(f"class {minority_label!r} does not occur in the labels")
    n_major = dataset.n_records - minor.size
    if n_major == 0:
        raise DegenerateData(f"class {minority_label!r} is the only class present")

    target = int(round(fraction * n_major / (1.0 - fraction)))
    if target >= minor.size:
        LOGGER.warning(
            "Minority class already at %.1f%% (<= %.1f%% requested); nothing dropped",
            100.0 * minor.size / dataset.n_records,
            100.0 * fraction,
        )
        return dataset

    # sampler sees row positions and a minority/rest split
    positions = np.arange(dataset.n_records).reshape(-1, 1)
    sampler = RandomUnderSampler(sampling_strategy={1: target}, random_state=seed)
    sampler.fit_resample(positions, is_minor.astype(np.int64))
    keep = np.sort(sampler.sample_indices_)
    LOGGER.info("Undersampled class %r from %d to %d records", minority_label, minor.size, target)
    return dataset.subset(keep)
