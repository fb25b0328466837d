from __future__ import annotations

import numpy as np
import pytest

from adfcm.clustering.fcm import (
    defuzzify,
    init_centroids,
    objective,
    predict_memberships,
    run_fcm,
    squared_distances,
    update_centroids,
    update_memberships,
)
from adfcm.errors import DegenerateData, EmptyCluster, InvalidClusterCount, InvalidConfig, ShapeMismatch
from adfcm.schema.models import Dataset, FcmConfig, MembershipMatrix


def _instances(n_instances: int, seed: int):
    rng = np.random.default_rng(seed)
    for _ in range(n_instances):
        c = int(rng.integers(1, 4))
        n_records = int(rng.integers(3, 21))
        n_features = int(rng.integers(1, 4))
        m = float(rng.uniform(1.5, 3.0))
        yield rng, rng.uniform(-5.0, 5.0, size=(n_records, n_features)), c, m


# -----------------------------
# init_centroids
# -----------------------------
def test_farthest_point_seeding_takes_both_extremes():
    X = np.array([[0.0], [10.0]])
    for seed in range(5):
        V = init_centroids(X, 2, seed)
        assert sorted(V[:, 0].tolist()) == [0.0, 10.0]


def test_seeding_single_repeated_record():
    X = np.full((6, 2), 3.5)
    V = init_centroids(X, 1, seed=7)
    np.testing.assert_array_equal(V, [[3.5, 3.5]])


def test_seeding_is_deterministic(separated_blobs):
    a = init_centroids(separated_blobs, 2, seed=1)
    b = init_centroids(separated_blobs, 2, seed=1)
    np.testing.assert_array_equal(a, b)


def test_seeding_rejects_too_many_clusters():
    with pytest.raises(InvalidClusterCount):
        init_centroids(np.array([[0.0], [1.0]]), 3, seed=0)


def test_seeding_rejects_duplicate_only_data():
    with pytest.raises(DegenerateData):
        init_centroids(np.ones((5, 2)), 2, seed=0)


# -----------------------------
# update_memberships
# -----------------------------
def test_membership_on_centroid_is_crisp():
    u = update_memberships(np.array([[0.0]]), np.array([[0.0], [4.0]]), 2.0)
    np.testing.assert_array_equal(u.u[:, 0], [1.0, 0.0])


def test_membership_equidistant_record_splits_evenly():
    u = update_memberships(np.array([[2.0]]), np.array([[0.0], [4.0]]), 2.0)
    np.testing.assert_allclose(u.u[:, 0], [0.5, 0.5], atol=1e-12)


def test_membership_coincident_centroids_share_equally():
    u = update_memberships(np.array([[1.0]]), np.array([[1.0], [1.0], [5.0]]), 2.0)
    np.testing.assert_allclose(u.u[:, 0], [0.5, 0.5, 0.0])


def test_membership_hand_value():
    u = update_memberships(np.array([[1.0]]), np.array([[0.0], [3.0]]), 2.0)
    np.testing.assert_allclose(u.u[:, 0], [0.8, 0.2], atol=1e-12)


def test_near_hard_assignment_for_small_fuzzifier():
    X = np.array([[1.0], [9.0], [0.5]])
    u = update_memberships(X, np.array([[0.0], [10.0]]), 1.05)
    assert np.all(u.u.max(axis=0) > 0.99)


def test_rejects_fuzzifier_at_most_one():
    with pytest.raises(InvalidConfig):
        update_memberships(np.array([[1.0]]), np.array([[0.0]]), 1.0)


# -----------------------------
# update_centroids / objective
# -----------------------------
def test_single_cluster_centroid_is_mean():
    X = np.array([[1.0, 2.0], [3.0, 6.0], [5.0, 1.0]])
    V = update_centroids(X, MembershipMatrix(np.ones((1, 3))), 2.0)
    np.testing.assert_allclose(V, [X.mean(axis=0)])


def test_crisp_memberships_give_record_centroids():
    X = np.array([[0.0], [2.0]])
    V = update_centroids(X, MembershipMatrix(np.eye(2)), 2.0)
    np.testing.assert_allclose(V[:, 0], [0.0, 2.0])


def test_weighted_mean_hand_value():
    X = np.array([[0.0], [1.0]])
    u = MembershipMatrix(np.array([[0.8, 0.2], [0.2, 0.8]]))
    V = update_centroids(X, u, 2.0)
    assert V[0, 0] == pytest.approx(0.04 / 0.68, abs=1e-12)


def test_empty_cluster_is_rejected():
    u = MembershipMatrix(np.array([[1.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(EmptyCluster):
        update_centroids(np.array([[0.0], [1.0]]), u, 2.0)


def test_objective_values():
    one = MembershipMatrix(np.ones((1, 1)))
    assert objective(np.array([[1.0]]), one, np.array([[0.0]]), 2.0) == pytest.approx(1.0)
    assert objective(np.array([[1.0]]), one, np.array([[1.0]]), 2.0) == 0.0

    u = MembershipMatrix(np.array([[0.8], [0.2]]))
    assert objective(np.array([[1.0]]), u, np.array([[0.0], [3.0]]), 2.0) == pytest.approx(0.8)


def test_objective_shape_mismatch():
    u = MembershipMatrix(np.array([[0.5], [0.5]]))
    with pytest.raises(ShapeMismatch):
        objective(np.array([[1.0]]), u, np.array([[0.0], [1.0], [2.0]]), 2.0)
    with pytest.raises(ShapeMismatch):
        objective(np.array([[1.0]]), u, np.array([[0.0, 0.0], [1.0, 1.0]]), 2.0)


def test_memberships_minimize_objective_for_fixed_centroids():
    for rng, X, c, m in _instances(100, seed=2024):
        V = rng.uniform(-5.0, 5.0, size=(c, X.shape[1]))
        best = objective(X, update_memberships(X, V, m), V, m)

        d2 = squared_distances(X, V)
        R = rng.dirichlet(np.ones(c), size=(10_000, X.shape[0])).transpose(0, 2, 1)
        q_random = np.sum((R ** m) * d2[None, :, :], axis=(1, 2))
        assert best <= q_random.min() * (1 + 1e-12)


# -----------------------------
# run_fcm
# -----------------------------
def test_properties_on_random_instances():
    for _, X, c, m in _instances(100, seed=7):
        model = run_fcm(X, FcmConfig(c=c, m=m, seed=3))
        u = model.memberships.u
        assert np.all(np.abs(u.sum(axis=0) - 1.0) <= 1e-9)
        assert np.all((u >= 0.0) & (u <= 1.0))
        trace = model.objective_trace
        for prev, cur in zip(trace, trace[1:]):
            assert cur <= prev + 1e-7 * abs(prev)


def test_recovers_separated_1d_blobs():
    rng = np.random.default_rng(0)
    X = np.concatenate([rng.uniform(-0.05, 0.05, 30), rng.uniform(9.95, 10.05, 30)]).reshape(-1, 1)
    model = run_fcm(X, FcmConfig(c=2, m=2.0))
    got = np.sort(model.centroids[:, 0])
    assert abs(got[0] - 0.0) < 0.1
    assert abs(got[1] - 10.0) < 0.1
    assert model.converged


def test_single_cluster_closed_form(separated_blobs):
    model = run_fcm(separated_blobs, FcmConfig(c=1))
    np.testing.assert_allclose(model.centroids[0], separated_blobs.records.mean(axis=0))
    np.testing.assert_array_equal(model.memberships.u, np.ones((1, separated_blobs.n_records)))
    assert model.converged
    assert model.iterations_run <= 2


def test_run_is_bit_deterministic(separated_blobs):
    cfg = FcmConfig(c=2, m=2.0, seed=5)
    a = run_fcm(separated_blobs, cfg)
    b = run_fcm(separated_blobs, cfg)
    np.testing.assert_array_equal(a.centroids, b.centroids)
    np.testing.assert_array_equal(a.memberships.u, b.memberships.u)
    assert a.objective_trace == b.objective_trace


def test_cluster_count_above_record_count():
    ds = Dataset(records=[[0.0], [1.0]], feature_names=("x",))
    with pytest.raises(InvalidClusterCount):
        run_fcm(ds, FcmConfig(c=3))


def test_invalid_config_values():
    with pytest.raises(InvalidConfig):
        FcmConfig(c=2, m=1.0)
    with pytest.raises(InvalidConfig):
        FcmConfig(c=0)
    with pytest.raises(InvalidConfig):
        FcmConfig(c=2, tol=0.0)
    with pytest.raises(InvalidConfig):
        FcmConfig(c=2, max_iter=0)


def test_warm_start_from_converged_centroids(separated_blobs):
    cfg = FcmConfig(c=2)
    model = run_fcm(separated_blobs, cfg)
    again = run_fcm(separated_blobs, cfg, init=model.centroids)
    np.testing.assert_allclose(again.centroids, model.centroids, atol=1e-4)
    assert again.iterations_run <= model.iterations_run


def test_warm_start_shape_is_checked(separated_blobs):
    with pytest.raises(ShapeMismatch):
        run_fcm(separated_blobs, FcmConfig(c=2), init=np.zeros((3, 2)))


def test_predict_and_defuzzify(separated_blobs):
    model = run_fcm(separated_blobs, FcmConfig(c=2))
    u = predict_memberships(separated_blobs, model)
    np.testing.assert_allclose(u.u, model.memberships.u)

    hard = defuzzify(model.memberships)
    assert len(set(hard[:50].tolist())) == 1
    assert len(set(hard[50:].tolist())) == 1
    assert hard[0] != hard[50]


def test_defuzzify_ties_go_to_lowest_index():
    u = MembershipMatrix(np.array([[0.5, 0.2], [0.5, 0.4], [0.0, 0.4]]))
    np.testing.assert_array_equal(defuzzify(u), [0, 1])
