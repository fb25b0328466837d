from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from adfcm.schema.validate import (
    validate_dataset,
    validate_fcm_config,
    validate_image,
    validate_memberships,
    validate_threshold,
)

AMBIGUOUS = "ambiguous"
ASSIGNED = "assigned"

Label = Any
Bounds = Tuple[float, float]


def _frozen_array(values: Any, dtype: Any = None) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


# -----------------------------
# Data
# -----------------------------
@dataclass(frozen=True, eq=False)
class Dataset:
    """
    N records x n numeric features plus optional labels.

    `index` keeps each record's position in the original input so subsets
    (ambiguous exports, resamples) can be traced back. `synthetic` marks
    injected noise records. `coords` and `image_shape` are set for datasets
    built from an image, one record per pixel in row-major order.
    """
    records: np.ndarray
    feature_names: Tuple[str, ...]
    labels: Optional[np.ndarray] = None
    normalization: Optional[Tuple[Bounds, ...]] = None
    index: Optional[np.ndarray] = None
    synthetic: Optional[np.ndarray] = None
    coords: Optional[np.ndarray] = None
    image_shape: Optional[Tuple[int, int]] = None

    def __post_init__(self) -> None:
        records = np.array(self.records, dtype=float, copy=True)
        if records.ndim == 1:
            records = records.reshape(-1, 1)
        records.setflags(write=False)
        object.__setattr__(self, "records", records)
        object.__setattr__(self, "feature_names", tuple(str(n) for n in self.feature_names))

        n_records = records.shape[0] if records.ndim == 2 else 0
        if self.labels is not None:
            object.__setattr__(self, "labels", _frozen_array(self.labels))
        if self.index is None:
            object.__setattr__(self, "index", _frozen_array(np.arange(n_records), dtype=np.int64))
        else:
            object.__setattr__(self, "index", _frozen_array(self.index, dtype=np.int64))
        if self.synthetic is None:
            object.__setattr__(self, "synthetic", _frozen_array(np.zeros(n_records, dtype=bool)))
        else:
            object.__setattr__(self, "synthetic", _frozen_array(self.synthetic, dtype=bool))
        if self.coords is not None:
            object.__setattr__(self, "coords", _frozen_array(self.coords, dtype=np.int64))
        if self.normalization is not None:
            object.__setattr__(
                self, "normalization", tuple((float(lo), float(hi)) for lo, hi in self.normalization)
            )

        validate_dataset(self)

    @property
    def n_records(self) -> int:
        return int(self.records.shape[0])

    @property
    def n_features(self) -> int:
        return int(self.records.shape[1])

    @property
    def has_labels(self) -> bool:
        return self.labels is not None

    @property
    def constant_features(self) -> List[int]:
        """Features that were constant when normalized (they map to 0)."""
        if self.normalization is None:
            return []
        return [j for j, (lo, hi) in enumerate(self.normalization) if hi == lo]

    def denormalize(self, values: Optional[np.ndarray] = None) -> np.ndarray:
        """Map normalized values (records by default) back to original units."""
        data = self.records if values is None else np.asarray(values, dtype=float)
        if self.normalization is None:
            return np.array(data, dtype=float)
        lo = np.array([b[0] for b in self.normalization])
        hi = np.array([b[1] for b in self.normalization])
        return data * (hi - lo) + lo

    def subset(self, positions: Sequence[int]) -> "Dataset":
        """Rows at `positions` (0-based into this dataset), metadata preserved."""
        pos = np.asarray(positions, dtype=np.int64)
        return Dataset(
            records=self.records[pos],
            feature_names=self.feature_names,
            labels=None if self.labels is None else self.labels[pos],
            normalization=self.normalization,
            index=self.index[pos],
            synthetic=self.synthetic[pos],
            coords=None if self.coords is None else self.coords[pos],
            image_shape=None,
        )

    def select_columns(self, columns: Sequence[int]) -> "Dataset":
        cols = [int(c) for c in columns]
        return Dataset(
            records=self.records[:, cols],
            feature_names=tuple(self.feature_names[c] for c in cols),
            labels=self.labels,
            normalization=None if self.normalization is None else tuple(self.normalization[c] for c in cols),
            index=self.index,
            synthetic=self.synthetic,
            coords=self.coords,
            image_shape=self.image_shape,
        )

    def to_frame(self, label_name: str = "label") -> pd.DataFrame:
        df = pd.DataFrame(self.records, columns=list(self.feature_names))
        if self.labels is not None:
            df[label_name] = self.labels
        return df


@dataclass(frozen=True)
class CsvSchema:
    has_header: bool = True
    label_column: Optional[Union[str, int]] = None
    delimiter: str = ","


@dataclass(frozen=True, eq=False)
class GrayImage:
    """8-bit grayscale raster; `pixels` has shape (height, width)."""
    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self) -> None:
        validate_image(self.width, self.height, self.pixels)
        pixels = np.array(self.pixels, dtype=np.uint8, copy=True).reshape(self.height, self.width)
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)


# -----------------------------
# Clustering
# -----------------------------
@dataclass(frozen=True)
class FcmConfig:
    c: int
    m: float = 2.0
    max_iter: int = 300
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        validate_fcm_config(self.c, self.m, self.max_iter, self.tol, self.seed)


@dataclass(frozen=True, eq=False)
class MembershipMatrix:
    """c x N degrees of membership; every column sums to 1."""
    u: np.ndarray

    def __post_init__(self) -> None:
        u = np.array(self.u, dtype=float, copy=True)
        validate_memberships(u)
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    @property
    def n_clusters(self) -> int:
        return int(self.u.shape[0])

    @property
    def n_records(self) -> int:
        return int(self.u.shape[1])

    def column(self, k: int) -> np.ndarray:
        return self.u[:, k]

    def dominant(self) -> np.ndarray:
        # np.argmax returns the first maximum: ties go to the lowest cluster index
        return np.argmax(self.u, axis=0)


@dataclass(frozen=True, eq=False)
class FcmModel:
    centroids: np.ndarray
    memberships: MembershipMatrix
    objective_trace: Tuple[float, ...]
    iterations_run: int
    converged: bool
    m: float = 2.0

    @property
    def n_clusters(self) -> int:
        return int(self.centroids.shape[0])

    @property
    def objective(self) -> float:
        return self.objective_trace[-1] if self.objective_trace else float("nan")


# -----------------------------
# Ambiguity detection
# -----------------------------
@dataclass(frozen=True, eq=False)
class PMatrix:
    p: np.ndarray
    cluster_avgs: np.ndarray

    @property
    def n_clusters(self) -> int:
        return int(self.p.shape[0])


@dataclass(frozen=True)
class CertaintyThreshold:
    value: float

    def __post_init__(self) -> None:
        validate_threshold(self.value)

    @staticmethod
    def coerce(threshold: Union[float, "CertaintyThreshold"]) -> "CertaintyThreshold":
        if isinstance(threshold, CertaintyThreshold):
            return threshold
        return CertaintyThreshold(float(threshold))


@dataclass(frozen=True)
class RecordOutcome:
    record_index: int
    dominant_cluster: int
    certainty: float
    ambiguous: bool

    @property
    def status(self) -> str:
        return AMBIGUOUS if self.ambiguous else ASSIGNED

    @property
    def assigned_cluster(self) -> Optional[int]:
        return None if self.ambiguous else self.dominant_cluster


@dataclass(frozen=True, eq=False)
class OutcomeSet:
    """Per-record outcomes of one classification pass, stored column-wise."""
    record_index: np.ndarray
    dominant: np.ndarray
    certainty: np.ndarray
    threshold: float
    n_clusters: int

    def __post_init__(self) -> None:
        for name, dtype in (("record_index", np.int64), ("dominant", np.int64), ("certainty", float)):
            object.__setattr__(self, name, _frozen_array(getattr(self, name), dtype=dtype))

    @property
    def ambiguous(self) -> np.ndarray:
        return self.certainty < self.threshold

    @property
    def n_ambiguous(self) -> int:
        return int(np.count_nonzero(self.ambiguous))

    def __len__(self) -> int:
        return int(self.certainty.shape[0])

    def __getitem__(self, i: int) -> RecordOutcome:
        return RecordOutcome(
            record_index=int(self.record_index[i]),
            dominant_cluster=int(self.dominant[i]),
            certainty=float(self.certainty[i]),
            ambiguous=bool(self.certainty[i] < self.threshold),
        )

    def __iter__(self) -> Iterator[RecordOutcome]:
        for i in range(len(self)):
            yield self[i]

    def assigned_clusters(self) -> np.ndarray:
        """Dominant cluster per record, -1 where the record is ambiguous."""
        return np.where(self.ambiguous, -1, self.dominant)

    def cluster_counts(self) -> Dict[int, Dict[str, int]]:
        amb = self.ambiguous
        out: Dict[int, Dict[str, int]] = {}
        for k in range(self.n_clusters):
            in_k = self.dominant == k
            out[k] = {
                ASSIGNED: int(np.count_nonzero(in_k & ~amb)),
                AMBIGUOUS: int(np.count_nonzero(in_k & amb)),
            }
        return out

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "record_index": self.record_index,
                "dominant_cluster": self.dominant,
                "certainty": self.certainty,
                "status": np.where(self.ambiguous, AMBIGUOUS, ASSIGNED),
            }
        )


@dataclass(frozen=True, eq=False)
class AmbiguousExport:
    """
    Ambiguous records handed to a second-stage method.
    May be empty, so it holds plain columns rather than a Dataset.
    """
    index: np.ndarray
    records: np.ndarray
    feature_names: Tuple[str, ...]
    labels: Optional[np.ndarray]
    certainty: np.ndarray
    dominant: np.ndarray

    def __len__(self) -> int:
        return int(self.index.shape[0])

    def as_dataset(self) -> Optional[Dataset]:
        if len(self) == 0:
            return None
        return Dataset(
            records=self.records,
            feature_names=self.feature_names,
            labels=self.labels,
            index=self.index,
        )

    def to_frame(self, label_name: str = "label") -> pd.DataFrame:
        df = pd.DataFrame(self.records.reshape(len(self), len(self.feature_names)), columns=list(self.feature_names))
        df.insert(0, "record_index", self.index)
        if self.labels is not None:
            df[label_name] = self.labels
        df["dominant_cluster"] = self.dominant
        df["certainty"] = self.certainty
        return df


# -----------------------------
# Feature selection
# -----------------------------
@dataclass(frozen=True, eq=False)
class DiscreteColumn:
    values: np.ndarray
    bin_count: int
    bin_edges: Tuple[float, ...]

    @property
    def n_records(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class FeatureScore:
    feature_index: int
    name: str
    su: float
    ru: float
    ru_per_class: Dict[Any, float] = field(default_factory=dict)
    bias_per_class: Dict[Any, float] = field(default_factory=dict)


@dataclass(frozen=True)
class FeatureRanking:
    selected: Tuple[int, ...]
    scores: Tuple[FeatureScore, ...]  # every feature, best first

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for rank, s in enumerate(self.scores, start=1):
            row: Dict[str, Any] = {
                "rank": rank,
                "feature_index": s.feature_index,
                "feature": s.name,
                "su": s.su,
                "ru": s.ru,
                "selected": s.feature_index in self.selected,
            }
            for cls, ru in s.ru_per_class.items():
                row[f"ru[{cls}]"] = ru
            for cls, b in s.bias_per_class.items():
                row[f"bias[{cls}]"] = b
            rows.append(row)
        return pd.DataFrame(rows)


# -----------------------------
# Evaluation
# -----------------------------
@dataclass(frozen=True)
class ClusterLabelMap:
    mapping: Dict[int, Label]

    def __getitem__(self, cluster: int) -> Label:
        return self.mapping[cluster]

    def predict(self, clusters: np.ndarray) -> np.ndarray:
        return np.array([self.mapping[int(k)] for k in clusters], dtype=object)


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    n: int
    nar: int
    ntr: int
    nfr: int
    nfra: int
    par: float
    pbfra: float
    accuracy: Optional[float]
    g_mean: Optional[float] = None

    @property
    def fdr(self) -> Optional[float]:
        """False detection rate over decided records, in percent."""
        return None if self.accuracy is None else 100.0 - self.accuracy

    def to_dict(self) -> Dict[str, Any]:
        return {
            "threshold": self.threshold,
            "n": self.n,
            "nar": self.nar,
            "ntr": self.ntr,
            "nfr": self.nfr,
            "nfra": self.nfra,
            "par": self.par,
            "pbfra": self.pbfra,
            "accuracy": self.accuracy,
            "fdr": self.fdr,
            "g_mean": self.g_mean,
        }


@dataclass(frozen=True)
class GMeanResult:
    value: float
    recalls: Dict[Label, float]
    excluded_classes: Tuple[Label, ...] = ()

    @property
    def flagged(self) -> bool:
        return bool(self.excluded_classes)


@dataclass(frozen=True)
class PrivacyRow:
    """
    Center errors of one method over the seeded runs. `ambiguous` holds the
    number of records set aside in each run (always 0 for plain FCM).
    """

    method: str
    threshold: Optional[float]
    errors: Tuple[Optional[float], ...]
    ambiguous: Tuple[int, ...] = ()

    @property
    def valid_errors(self) -> List[float]:
        return [e for e in self.errors if e is not None]

    @property
    def flagged_runs(self) -> int:
        return sum(1 for e in self.errors if e is None)

    @property
    def unfiltered_runs(self) -> int:
        """Runs in which no record fell below the threshold."""
        return sum(1 for n in self.ambiguous if n == 0)

    @property
    def mean_ambiguous(self) -> Optional[float]:
        return float(np.mean(self.ambiguous)) if self.ambiguous else None

    @property
    def mean_error(self) -> Optional[float]:
        vals = self.valid_errors
        return float(np.mean(vals)) if vals else None

    @property
    def variance(self) -> Optional[float]:
        vals = self.valid_errors
        return float(np.var(vals)) if vals else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "threshold": self.threshold,
            "errors": list(self.errors),
            "mean_error": self.mean_error,
            "variance": self.variance,
            "flagged_runs": self.flagged_runs,
            "ambiguous": list(self.ambiguous),
            "mean_ambiguous": self.mean_ambiguous,
            "unfiltered_runs": self.unfiltered_runs,
        }


@dataclass(frozen=True)
class PrivacyReport:
    noise_fraction: float
    n_clusters: int
    seeds: Tuple[int, ...]
    rows: Tuple[PrivacyRow, ...]

    def row(self, method: str, threshold: Optional[float] = None) -> PrivacyRow:
        for r in self.rows:
            if r.method == method and r.threshold == threshold:
                return r
        raise KeyError((method, threshold))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "noise_fraction": self.noise_fraction,
            "n_clusters": self.n_clusters,
            "seeds": list(self.seeds),
            "rows": [r.to_dict() for r in self.rows],
        }
