from __future__ import annotations

import json

import pytest

from adfcm.errors import InvalidConfig
from adfcm.utils.config import DEFAULT_SWEEP_THRESHOLDS, RunConfig, load_json


def test_defaults():
    cfg = RunConfig()
    assert (cfg.fuzzifier, cfg.tol, cfg.max_iter, cfg.bins, cfg.seed) == (2.0, 1e-6, 300, 10, 0)
    assert cfg.normalize is True
    assert cfg.threshold_list(DEFAULT_SWEEP_THRESHOLDS) == DEFAULT_SWEEP_THRESHOLDS


def test_cli_beats_file_beats_default():
    cfg = RunConfig.from_sources(
        {"clusters": 4, "fuzzifier": None, "seed": None},
        {"clusters": 3, "fuzzifier": 2.5},
    )
    assert cfg.clusters == 4
    assert cfg.fuzzifier == 2.5
    assert cfg.seed == 0


def test_lists_become_tuples():
    cfg = RunConfig.from_sources({"thresholds": [0.1, 0.2]}, {"grid_clusters": [2, 3]})
    assert cfg.thresholds == (0.1, 0.2)
    assert cfg.grid_clusters == (2, 3)


def test_unknown_file_key():
    with pytest.raises(InvalidConfig):
        RunConfig.from_sources({}, {"clusterz": 3})


@pytest.mark.parametrize(
    "changes",
    [
        {"fuzzifier": 1.0},
        {"tol": -1.0},
        {"threshold": 1.2},
        {"thresholds": (0.3, 0.1)},
        {"thresholds": ()},
        {"bins": 1},
        {"format": "xml"},
        {"select_top": 0},
        {"repeats": 0},
        {"noise": -0.5},
        {"minority_label": "1"},
    ],
)
def test_validation_rejects(changes):
    with pytest.raises(InvalidConfig):
        RunConfig().with_overrides(**changes).validate()


def test_derived_configs():
    cfg = RunConfig(clusters=3, fuzzifier=2.5, seed=9, no_header=True, label_column="y", delimiter=";")
    fcm = cfg.fcm_config()
    assert (fcm.c, fcm.m, fcm.seed) == (3, 2.5, 9)
    schema = cfg.csv_schema()
    assert (schema.has_header, schema.label_column, schema.delimiter) == (False, "y", ";")


def test_load_json(tmp_path):
    good = tmp_path / "cfg.json"
    good.write_text(json.dumps({"clusters": 3}), encoding="utf-8")
    assert load_json(good) == {"clusters": 3}

    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    with pytest.raises(InvalidConfig):
        load_json(bad)

    array = tmp_path / "array.json"
    array.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(InvalidConfig):
        load_json(array)
