from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from adfcm.errors import InvalidConfig
from adfcm.schema.models import CsvSchema, FcmConfig
from adfcm.schema.validate import validate_threshold, validate_thresholds

PathLike = Union[str, Path]

DEFAULT_SWEEP_THRESHOLDS = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45)
FORMATS = ("csv", "json")


def load_json(path: PathLike) -> Dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidConfig(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise InvalidConfig(f"config file {path} must hold a JSON object")
    return data


@dataclass(frozen=True)
class RunConfig:
    """
    Parameters shared by all commands. Values come from explicit CLI flags,
    then a JSON config file, then these defaults.
    """
    input: Optional[str] = None
    output: Optional[str] = None
    clusters: int = 2
    fuzzifier: float = 2.0
    threshold: float = 0.4
    thresholds: Optional[Tuple[float, ...]] = None
    max_iter: int = 300
    tol: float = 1e-6
    seed: int = 0
    bins: int = 10
    label_column: Optional[str] = None
    normalize: bool = True
    format: str = "csv"
    delimiter: str = ","
    no_header: bool = False
    select_top: Optional[int] = None
    export_ambiguous: Optional[str] = None
    minority_label: Optional[str] = None
    minority_fraction: Optional[float] = None
    noise: float = 0.3
    repeats: int = 5
    per_cluster: int = 100
    spread: float = 0.05
    n_features: int = 2
    grid_clusters: Tuple[int, ...] = (3, 4, 5)
    grid_fuzzifiers: Tuple[float, ...] = (2.0, 3.2)

    @classmethod
    def from_sources(cls, cli_values: Dict[str, Any], file_values: Optional[Dict[str, Any]] = None) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        file_values = dict(file_values or {})
        unknown = sorted(set(file_values) - known)
        if unknown:
            raise InvalidConfig(f"unknown config keys: {unknown}")

        merged: Dict[str, Any] = {}
        for name in known:
            if cli_values.get(name) is not None:
                merged[name] = cli_values[name]
            elif name in file_values:
                merged[name] = file_values[name]
        for name in ("thresholds", "grid_clusters", "grid_fuzzifiers"):
            if merged.get(name) is not None:
                merged[name] = tuple(merged[name])
        try:
            return cls(**merged)
        except TypeError as e:
            raise InvalidConfig(str(e)) from e

    def with_overrides(self, **changes: Any) -> "RunConfig":
        return replace(self, **changes)

    def validate(self) -> "RunConfig":
        self.fcm_config()
        validate_threshold(self.threshold)
        if self.thresholds is not None:
            if not self.thresholds:
                raise InvalidConfig("threshold list is empty")
            validate_thresholds(self.thresholds)
        if self.bins < 2:
            raise InvalidConfig(f"bins must be >= 2, got {self.bins}")
        if self.format not in FORMATS:
            raise InvalidConfig(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.select_top is not None and self.select_top < 1:
            raise InvalidConfig(f"select_top must be >= 1, got {self.select_top}")
        if self.noise < 0:
            raise InvalidConfig(f"noise fraction must be >= 0, got {self.noise}")
        if self.repeats < 1:
            raise InvalidConfig(f"repeats must be >= 1, got {self.repeats}")
        if (self.minority_label is None) != (self.minority_fraction is None):
            raise InvalidConfig("minority label and minority fraction must be given together")
        return self

    def fcm_config(self) -> FcmConfig:
        return FcmConfig(c=self.clusters, m=self.fuzzifier, max_iter=self.max_iter, tol=self.tol, seed=self.seed)

    def csv_schema(self) -> CsvSchema:
        return CsvSchema(has_header=not self.no_header, label_column=self.label_column, delimiter=self.delimiter)

    def threshold_list(self, default: Tuple[float, ...]) -> Tuple[float, ...]:
        return self.thresholds if self.thresholds is not None else default
