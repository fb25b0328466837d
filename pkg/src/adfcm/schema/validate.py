from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

import numpy as np

from adfcm.errors import DataError, InvalidConfig, ShapeMismatch

if TYPE_CHECKING:
    from adfcm.schema.models import Dataset

COLUMN_SUM_TOL = 1e-9


def validate_dataset(ds: "Dataset") -> None:
    """
    Structural checks run on every Dataset construction.
    Loaders reject malformed input before it gets here; this is the last line.
    """
    rec = ds.records
    if rec.ndim != 2:
        raise ShapeMismatch(f"records must be 2-D, got {rec.ndim}-D")
    n_records, n_features = rec.shape
    if n_records < 1 or n_features < 1:
        raise DataError(f"dataset needs N >= 1 and n >= 1, got {n_records}x{n_features}")
    if not np.all(np.isfinite(rec)):
        raise DataError("dataset contains NaN or infinite feature values")
    if len(ds.feature_names) != n_features:
        raise ShapeMismatch(f"{len(ds.feature_names)} feature names for {n_features} features")
    for name in ("labels", "index", "synthetic", "coords"):
        arr = getattr(ds, name)
        if arr is not None and arr.shape[0] != n_records:
            raise ShapeMismatch(f"{name} has length {arr.shape[0]}, expected {n_records}")
    if ds.normalization is not None and len(ds.normalization) != n_features:
        raise ShapeMismatch("normalization needs one (min, max) pair per feature")


def validate_fcm_config(c: int, m: float, max_iter: int, tol: float, seed: int) -> None:
    if int(c) != c or c < 1:
        raise InvalidConfig(f"cluster count must be an integer >= 1, got {c}")
    if not m > 1.0:
        raise InvalidConfig(f"fuzzifier m must be > 1, got {m}")
    if int(max_iter) != max_iter or max_iter < 1:
        raise InvalidConfig(f"max_iter must be an integer >= 1, got {max_iter}")
    if not tol > 0.0:
        raise InvalidConfig(f"tol must be > 0, got {tol}")
    if int(seed) != seed or seed < 0:
        raise InvalidConfig(f"seed must be an unsigned integer, got {seed}")


def validate_memberships(u: np.ndarray) -> None:
    if u.ndim != 2 or u.shape[0] < 1 or u.shape[1] < 1:
        raise ShapeMismatch(f"membership matrix must be c x N, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise DataError("membership matrix contains NaN or infinite values")
    if np.any(u < 0.0) or np.any(u > 1.0):
        raise DataError("memberships must lie in [0, 1]")
    sums = u.sum(axis=0)
    bad = np.flatnonzero(np.abs(sums - 1.0) > COLUMN_SUM_TOL)
    if bad.size:
        raise DataError(f"membership column {int(bad[0])} sums to {sums[bad[0]]!r}, expected 1")


def validate_threshold(value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvalidConfig(f"certainty threshold must be in [0, 1], got {value}")


def validate_thresholds(values: Sequence[float]) -> None:
    for v in values:
        validate_threshold(v)
    if any(b < a for a, b in zip(values, values[1:])):
        raise InvalidConfig("thresholds must be sorted ascending")


def validate_image(width: int, height: int, pixels: np.ndarray) -> None:
    if width < 1 or height < 1:
        raise ShapeMismatch(f"image size must be positive, got {width}x{height}")
    arr = np.asarray(pixels)
    if arr.size != width * height:
        raise ShapeMismatch(f"{arr.size} pixels for a {width}x{height} image")
    if arr.size and (arr.min() < 0 or arr.max() > 255):
        raise DataError("pixel intensities must lie in [0, 255]")
