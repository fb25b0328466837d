from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from adfcm.ingest.synthetic import make_blobs, make_ramp_image
from adfcm.schema.models import Dataset, GrayImage, MembershipMatrix


@pytest.fixture
def worked_memberships() -> MembershipMatrix:
    # 3 clusters x 4 records; record k is column k
    return MembershipMatrix(
        np.array(
            [
                [0.1, 0.8, 0.0, 0.1],
                [0.6, 0.1, 0.2, 0.9],
                [0.3, 0.1, 0.8, 0.0],
            ]
        )
    )


@pytest.fixture
def separated_blobs() -> Dataset:
    ds, _ = make_blobs(c=2, per_cluster=50, spread=0.02, centers=[[0.2, 0.2], [0.8, 0.8]], seed=3)
    return ds


@pytest.fixture
def overlapping_classes() -> Dataset:
    """Two balanced 1-D Gaussian classes whose tails overlap around 0."""
    rng = np.random.default_rng(11)
    per_class = 500
    x = np.concatenate([rng.normal(-1.0, 0.7, per_class), rng.normal(1.0, 0.7, per_class)])
    labels = np.array(["neg"] * per_class + ["pos"] * per_class, dtype=object)
    return Dataset(records=x.reshape(-1, 1), feature_names=("x",), labels=labels)


@pytest.fixture
def ramp_image() -> GrayImage:
    return make_ramp_image(width=40, height=4, low=60, high=200, ramp_start=15, ramp_width=10)


@pytest.fixture
def labelled_csv(tmp_path: Path, overlapping_classes: Dataset) -> Path:
    """CSV with two numeric features and a string label column."""
    rng = np.random.default_rng(5)
    x = overlapping_classes.records[:, 0]
    df = pd.DataFrame(
        {
            "signal": x * 10.0 + 50.0,
            "jitter": rng.uniform(0.0, 1.0, x.shape[0]),
            "outcome": overlapping_classes.labels,
        }
    )
    path = tmp_path / "labelled.csv"
    df.to_csv(path, index=False)
    return path
