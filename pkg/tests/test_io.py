from __future__ import annotations

import json
from pathlib import Path

import pandas as pd
import pytest

import adfcm.utils.io as io_module
from adfcm.utils.io import SCHEMA_VERSION, render_csv, render_json, sidecar_path, write_outputs


def test_render_json_stamps_version_and_nulls_nan():
    doc = json.loads(render_json({"accuracy": float("nan"), "rows": [1.5, float("inf")]}))
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["accuracy"] is None
    assert doc["rows"] == [1.5, None]


def test_render_csv_uses_unix_newlines():
    data = render_csv(pd.DataFrame({"a": [1, 2], "b": ["x", "y"]}))
    assert data == b"a,b\n1,x\n2,y\n"


def test_sidecar_path(tmp_path):
    assert sidecar_path(tmp_path / "out.csv", ".summary.json") == tmp_path / "out.summary.json"


def test_writes_every_artifact(tmp_path):
    targets = {tmp_path / "a.csv": b"a\n", tmp_path / "sub" / "b.json": b"{}\n"}
    written = write_outputs(targets)
    assert written == list(targets)
    assert (tmp_path / "a.csv").read_bytes() == b"a\n"
    assert (tmp_path / "sub" / "b.json").read_bytes() == b"{}\n"


def test_failure_leaves_nothing_behind(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory", encoding="utf-8")
    with pytest.raises(OSError):
        write_outputs({tmp_path / "first.csv": b"1\n", blocker / "second.csv": b"2\n"})
    assert sorted(p.name for p in tmp_path.iterdir()) == ["blocker"]


def test_directory_target_is_rejected_before_staging(tmp_path):
    (tmp_path / "outdir").mkdir()
    with pytest.raises(IsADirectoryError):
        write_outputs({tmp_path / "first.csv": b"1\n", tmp_path / "outdir": b"2\n"})
    assert sorted(p.name for p in tmp_path.iterdir()) == ["outdir"]
    assert list((tmp_path / "outdir").iterdir()) == []


def test_failed_rename_rolls_back(tmp_path, monkeypatch):
    real_replace = io_module.os.replace
    calls = []

    def flaky_replace(src, dst):
        calls.append(dst)
        if len(calls) == 2:
            raise PermissionError("read-only target")
        real_replace(src, dst)

    monkeypatch.setattr(io_module.os, "replace", flaky_replace)
    with pytest.raises(PermissionError):
        write_outputs({tmp_path / "a.csv": b"a\n", tmp_path / "b.csv": b"b\n", tmp_path / "c.csv": b"c\n"})
    assert list(tmp_path.iterdir()) == []


def test_failed_rename_keeps_files_it_did_not_create(tmp_path, monkeypatch):
    old = tmp_path / "a.csv"
    old.write_bytes(b"old\n")
    real_replace = io_module.os.replace

    def failing_second(src, dst):
        if Path(dst).name == "b.csv":
            raise PermissionError("read-only target")
        real_replace(src, dst)

    monkeypatch.setattr(io_module.os, "replace", failing_second)
    with pytest.raises(PermissionError):
        write_outputs({old: b"new\n", tmp_path / "b.csv": b"b\n"})
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.csv"]
