from __future__ import annotations

from typing import Optional, Sequence, Tuple

import numpy as np

from adfcm.errors import InvalidConfig, ShapeMismatch
from adfcm.schema.models import Dataset, GrayImage


def make_blobs(
    c: int,
    per_cluster: int,
    spread: float,
    bounds: Tuple[float, float] = (0.0, 1.0),
    seed: int = 0,
    n_features: int = 2,
    centers: Optional[Sequence[Sequence[float]]] = None,
) -> Tuple[Dataset, np.ndarray]:
    """
    Isotropic Gaussian blobs. Centers are drawn uniformly inside `bounds`
    unless given; labels are the blob index. Returns (dataset, true centers).
    """
    if c < 1 or per_cluster < 1:
        raise InvalidConfig(f"need c >= 1 and per_cluster >= 1, got {c}, {per_cluster}")
    if spread < 0:
        raise InvalidConfig(f"spread must be >= 0, got {spread}")

    rng = np.random.default_rng(seed)
    if centers is None:
        true_centers = rng.uniform(bounds[0], bounds[1], size=(c, n_features))
    else:
        true_centers = np.asarray(centers, dtype=float)
        if true_centers.shape[0] != c or true_centers.ndim != 2:
            raise ShapeMismatch(f"expected {c} centers, got shape {true_centers.shape}")
        n_features = true_centers.shape[1]

    noise = rng.normal(0.0, 1.0, size=(c, per_cluster, n_features)) * spread
    points = (true_centers[:, None, :] + noise).reshape(c * per_cluster, n_features)
    labels = np.repeat(np.arange(c), per_cluster)
    ds = Dataset(
        records=points,
        feature_names=tuple(f"x{j}" for j in range(n_features)),
        labels=labels,
    )
    return ds, true_centers


def make_ramp_image(
    width: int,
    height: int,
    low: int,
    high: int,
    ramp_start: int,
    ramp_width: int,
) -> GrayImage:
    """
    Two-tone image: `low` left of the ramp, `high` right of it, and a linear
    intensity ramp across columns [ramp_start, ramp_start + ramp_width).
    """
    if ramp_start < 0 or ramp_width < 0 or ramp_start + ramp_width > width:
        raise InvalidConfig("ramp must lie inside the image")
    row = np.full(width, float(low))
    row[ramp_start + ramp_width:] = high
    if ramp_width > 0:
        steps = (np.arange(ramp_width) + 1) / (ramp_width + 1)
        row[ramp_start:ramp_start + ramp_width] = low + steps * (high - low)
    pixels = np.tile(np.floor(row + 0.5), (height, 1)).astype(np.uint8)
    return GrayImage(width=width, height=height, pixels=pixels)
