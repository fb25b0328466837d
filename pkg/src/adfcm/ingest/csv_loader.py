from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from sklearn.preprocessing import MinMaxScaler

from adfcm.errors import ParseError, SchemaError
from adfcm.schema.models import CsvSchema, Dataset
from adfcm.utils.io import render_csv, write_outputs

LOGGER = logging.getLogger("adfcm_ingest")

PathLike = Union[str, Path]


def _resolve_label_column(df: pd.DataFrame, schema: CsvSchema) -> Optional[object]:
    wanted = schema.label_column
    if wanted is None:
        return None
    if isinstance(wanted, int) or (isinstance(wanted, str) and wanted.isdigit() and wanted not in df.columns):
        pos = int(wanted)
        if not 0 <= pos < len(df.columns):
            raise SchemaError(f"label column index {pos} out of range for {len(df.columns)} columns")
        return df.columns[pos]
    if wanted not in df.columns:
        raise SchemaError(f"label column {wanted!r} not found; columns are {list(map(str, df.columns))}")
    return wanted


def _numeric_column(raw: pd.Series, name: str, row_offset: int) -> np.ndarray:
    values = pd.to_numeric(raw.str.strip(), errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        i = int(bad[0])
        raise ParseError(f"non-numeric or non-finite value {raw.iloc[i]!r}", row=i + row_offset, column=name)
    return values


def normalize_records(records: np.ndarray) -> Tuple[np.ndarray, Tuple[Tuple[float, float], ...]]:
    """Min-max scale each feature to [0, 1]; constant features map to 0."""
    scaler = MinMaxScaler()
    scaled = scaler.fit_transform(records)
    bounds = tuple((float(lo), float(hi)) for lo, hi in zip(scaler.data_min_, scaler.data_max_))
    return scaled, bounds


def load_csv(path: PathLike, schema: Optional[CsvSchema] = None, normalize: bool = True) -> Dataset:
    """
    Load a tabular CSV: every column except the label column must be numeric.
    Row numbers in errors are 1-based data rows (header excluded).
    """
    schema = schema or CsvSchema()
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(str(p))

    try:
        df = pd.read_csv(
            p,
            sep=schema.delimiter,
            header=0 if schema.has_header else None,
            dtype=str,
            keep_default_na=False,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError as e:
        raise ParseError(f"{p} is empty") from e
    except (pd.errors.ParserError, UnicodeDecodeError) as e:
        raise ParseError(f"cannot parse {p}: {e}") from e
    if df.shape[0] == 0:
        raise ParseError(f"{p} has no data rows")

    label_col = _resolve_label_column(df, schema)
    feature_cols = [c for c in df.columns if c != label_col]
    if not feature_cols:
        raise SchemaError(f"{p} has no feature columns")

    names: List[str] = [str(c) if schema.has_header else f"f{c}" for c in feature_cols]
    records = np.column_stack([_numeric_column(df[c], n, 1) for c, n in zip(feature_cols, names)])

    labels = None
    if label_col is not None:
        raw = df[label_col].fillna("").str.strip()
        empty = np.flatnonzero(raw.to_numpy() == "")
        if empty.size:
            raise ParseError("missing label", row=int(empty[0]) + 1, column=str(label_col))
        labels = raw.to_numpy(dtype=object)

    normalization = None
    if normalize:
        records, normalization = normalize_records(records)

    ds = Dataset(records=records, feature_names=tuple(names), labels=labels, normalization=normalization)
    LOGGER.info("Loaded %s: N=%d n=%d labels=%s", p.name, ds.n_records, ds.n_features, ds.has_labels)
    if ds.constant_features:
        LOGGER.warning("Constant features mapped to 0: %s", [names[j] for j in ds.constant_features])
    return ds


def dataset_frame(dataset: Dataset, label_name: str = "label", denormalize: bool = False) -> pd.DataFrame:
    df = dataset.to_frame(label_name=label_name)
    if denormalize and dataset.normalization is not None:
        df[list(dataset.feature_names)] = dataset.denormalize()
    return df


def write_csv(dataset: Dataset, path: PathLike, label_name: str = "label", denormalize: bool = False) -> None:
    write_outputs({Path(path): render_csv(dataset_frame(dataset, label_name, denormalize))})
