from __future__ import annotations

import numpy as np
import pytest

from adfcm.clustering.ambiguity import classify, compute_p_matrix
from adfcm.clustering.fcm import run_fcm
from adfcm.errors import ParseError, ShapeMismatch
from adfcm.ingest.image import (
    dataset_to_image,
    decode_pgm,
    encode_pgm,
    encode_plain_pgm,
    image_to_dataset,
    load_pgm,
    render_segmentation,
    write_pgm,
)
from adfcm.schema.models import FcmConfig, GrayImage


def _image(rows) -> GrayImage:
    arr = np.asarray(rows, dtype=np.uint8)
    return GrayImage(width=arr.shape[1], height=arr.shape[0], pixels=arr)


# -----------------------------
# PGM codec
# -----------------------------
def test_binary_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    img = _image(rng.integers(0, 256, size=(5, 7)))
    path = tmp_path / "img.pgm"
    write_pgm(img, path)
    back = load_pgm(path)
    assert (back.width, back.height) == (7, 5)
    np.testing.assert_array_equal(back.pixels, img.pixels)
    assert path.read_bytes().startswith(b"P5")


def test_plain_and_binary_decode_identically():
    img = _image([[0, 128, 255], [1, 2, 3]])
    plain = encode_plain_pgm(img)
    assert plain.startswith(b"P2")
    np.testing.assert_array_equal(decode_pgm(plain).pixels, decode_pgm(encode_pgm(img)).pixels)


def test_single_white_pixel():
    img = _image([[255]])
    assert decode_pgm(encode_pgm(img)).pixels.tolist() == [[255]]


def test_header_comments_are_skipped():
    data = b"P2\n# made by hand\n2 1 # size\n255\n10 20\n"
    assert decode_pgm(data).pixels.tolist() == [[10, 20]]


@pytest.mark.parametrize(
    "data",
    [
        b"P6\n1 1\n255\n\x00\x00\x00",
        b"P5\n2 2\n255\n\x00",
        b"P5\n1 1\n65535\n\x00\x00",
        b"P2\n2 x\n255\n1 2\n",
        b"P2\n2 1\n255\n1\n",
        b"P5\n1",
        b"\x89PNG\r\n\x1a\n",
        b"",
    ],
)
def test_malformed_pgm(data):
    with pytest.raises(ParseError):
        decode_pgm(data)


# -----------------------------
# image <-> dataset
# -----------------------------
def test_image_to_dataset():
    img = _image([[0, 255], [51, 102]])
    ds = image_to_dataset(img)
    assert ds.n_records == 4 and ds.n_features == 1
    np.testing.assert_allclose(ds.records[:, 0], [0.0, 1.0, 0.2, 0.4])
    assert ds.coords.tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]
    assert ds.image_shape == (2, 2)


def test_constant_image_gives_identical_records():
    ds = image_to_dataset(_image(np.full((3, 3), 77)))
    assert np.unique(ds.records).size == 1


def test_dataset_to_image_inverts_image_to_dataset():
    rng = np.random.default_rng(2)
    img = _image(rng.integers(0, 256, size=(4, 6)))
    ds = image_to_dataset(img)
    np.testing.assert_array_equal(dataset_to_image(ds, ds.records[:, 0]).pixels, img.pixels)


def test_dataset_to_image_needs_coordinates(separated_blobs):
    with pytest.raises(ShapeMismatch):
        dataset_to_image(separated_blobs, np.zeros(separated_blobs.n_records))


# -----------------------------
# segmentation
# -----------------------------
def _segment(img: GrayImage, thresholds, c: int = 2):
    ds = image_to_dataset(img)
    model = run_fcm(ds, FcmConfig(c=c))
    p = compute_p_matrix(model.memberships)
    return model, [render_segmentation(img, classify(model.memberships, p, t), model.centroids) for t in thresholds]


def test_threshold_zero_is_quantization(ramp_image):
    model, (seg,) = _segment(ramp_image, [0.0])
    levels = np.floor(model.centroids[:, 0] * 255 + 0.5).astype(int)
    assert set(np.unique(seg.pixels).tolist()) <= set(levels.tolist())
    assert np.count_nonzero(seg.pixels == 0) == 0

    quantized = dataset_to_image(image_to_dataset(ramp_image), model.centroids[model.memberships.dominant(), 0])
    np.testing.assert_array_equal(seg.pixels, quantized.pixels)


def test_ambiguous_band_at_the_ramp(ramp_image):
    _, (plain, banded) = _segment(ramp_image, [0.0, 0.4])
    assert np.count_nonzero(plain.pixels == 0) == 0

    black = banded.pixels == 0
    assert black.any()
    # same band in every row
    assert np.all(black == black[0])
    cols = np.flatnonzero(black[0])
    assert cols.min() >= 15 and cols.max() < 25
    np.testing.assert_array_equal(cols, np.arange(cols.min(), cols.max() + 1))


def test_black_area_grows_with_threshold(ramp_image):
    thresholds = [round(0.05 * i, 2) for i in range(12)]
    _, images = _segment(ramp_image, thresholds)
    counts = [int(np.count_nonzero(img.pixels == 0)) for img in images]
    assert counts == sorted(counts)


def test_high_threshold_blacks_out_everything(ramp_image):
    _, (seg,) = _segment(ramp_image, [1.0])
    assert np.count_nonzero(seg.pixels) == 0


def test_segmentation_length_mismatch(ramp_image, worked_memberships):
    outcomes = classify(worked_memberships, compute_p_matrix(worked_memberships), 0.5)
    with pytest.raises(ShapeMismatch):
        render_segmentation(ramp_image, outcomes, np.array([[0.1], [0.5], [0.9]]))
