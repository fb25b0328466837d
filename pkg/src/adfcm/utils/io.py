from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Tuple, Union

import numpy as np
import pandas as pd

LOGGER = logging.getLogger("adfcm_io")

PathLike = Union[str, Path]

SCHEMA_VERSION = 1


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return _finite_or_none(float(obj))
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _finite_or_none(x: float) -> Any:
    return x if np.isfinite(x) else None


def _clean(obj: Any) -> Any:
    # NaN/inf are not valid JSON; they become null
    if isinstance(obj, float):
        return _finite_or_none(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def render_json(payload: Mapping[str, Any]) -> bytes:
    doc = {"schema_version": SCHEMA_VERSION, **payload}
    return (json.dumps(_clean(doc), indent=2, default=_json_default) + "\n").encode("utf-8")


def render_csv(df: pd.DataFrame) -> bytes:
    return df.to_csv(index=False, lineterminator="\n").encode("utf-8")


def _discard(paths: Iterable[PathLike]) -> None:
    for p in paths:
        Path(p).unlink(missing_ok=True)


def write_outputs(outputs: Mapping[PathLike, bytes]) -> List[Path]:
    """
    Write every artifact or none of them: each file is staged next to its
    target and only renamed into place once all staged writes succeeded.
    If a rename fails, the remaining staged files and the targets this call
    created are removed again.
    """
    for target in outputs:
        if Path(target).is_dir():
            raise IsADirectoryError(f"output path {target} is a directory")

    staged: List[Tuple[str, Path]] = []
    try:
        for target, data in outputs.items():
            out = Path(target)
            out.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=f".{out.name}.", dir=str(out.parent))
            staged.append((tmp, out))
            with os.fdopen(fd, "wb") as f:
                f.write(data)
    except BaseException:
        _discard(tmp for tmp, _ in staged)
        raise

    written: List[Path] = []
    created: List[Path] = []
    try:
        for tmp, out in staged:
            existed = out.exists()
            os.replace(tmp, out)
            written.append(out)
            if not existed:
                created.append(out)
    except BaseException:
        _discard(tmp for tmp, _ in staged[len(written):])
        _discard(created)
        raise

    for out in written:
        LOGGER.info("Wrote %s", out)
    return written


def sidecar_path(path: PathLike, suffix: str) -> Path:
    """`out/outcomes.csv` + `.summary.json` -> `out/outcomes.summary.json`."""
    p = Path(path)
    return p.with_name(p.stem + suffix)


def frame_records(df: pd.DataFrame) -> List[Dict[str, Any]]:
    return df.to_dict(orient="records")
