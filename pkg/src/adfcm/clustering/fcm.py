from __future__ import annotations

import logging
from typing import List, Optional, Union

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import softmax

from adfcm.errors import DegenerateData, EmptyCluster, InvalidClusterCount, InvalidConfig, ShapeMismatch
from adfcm.schema.models import Dataset, FcmConfig, FcmModel, MembershipMatrix

LOGGER = logging.getLogger("adfcm_fcm")

# A record closer than this to a centroid is treated as sitting on it.
ZERO_DISTANCE = 1e-12

# Records per block when accumulating centroid sums; blocks are combined in
# index order so the result does not depend on thread scheduling.
REDUCTION_CHUNK = 4096

Records = Union[Dataset, np.ndarray]


def _as_records(data: Records) -> np.ndarray:
    if isinstance(data, Dataset):
        return data.records
    arr = np.asarray(data, dtype=float)
    return arr.reshape(-1, 1) if arr.ndim == 1 else arr


def _check_fuzzifier(m: float) -> None:
    if not m > 1.0:
        raise InvalidConfig(f"fuzzifier m must be > 1, got {m}")


def squared_distances(records: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """c x N matrix of squared Euclidean distances."""
    if records.shape[1] != centroids.shape[1]:
        raise ShapeMismatch(
            f"records have {records.shape[1]} features but centroids have {centroids.shape[1]}"
        )
    return cdist(centroids, records, metric="sqeuclidean")


# -----------------------------
# Seeding
# -----------------------------
def init_centroids(dataset: Records, c: int, seed: int) -> np.ndarray:
    """
    Greedy farthest-point seeding.

    The first centroid is the record at a seeded-random index; every further
    centroid is the record maximizing its minimum squared distance to those
    already chosen (first such record on ties).
    """
    X = _as_records(dataset)
    n_records = X.shape[0]
    if n_records == 0:
        raise DegenerateData("cannot seed centroids from an empty dataset")
    if c < 1 or c > n_records:
        raise InvalidClusterCount(f"cluster count {c} must be in [1, {n_records}]")

    n_distinct = np.unique(X, axis=0).shape[0]
    if c > n_distinct:
        raise DegenerateData(f"{c} clusters requested but only {n_distinct} distinct records")

    rng = np.random.default_rng(seed)
    chosen = [int(rng.integers(n_records))]
    min_d2 = np.sum((X - X[chosen[0]]) ** 2, axis=1)
    for _ in range(1, c):
        nxt = int(np.argmax(min_d2))
        chosen.append(nxt)
        min_d2 = np.minimum(min_d2, np.sum((X - X[nxt]) ** 2, axis=1))

    LOGGER.debug("Seeded %d centroids from records %s", c, chosen)
    return X[chosen].copy()


# -----------------------------
# Alternating updates
# -----------------------------
def _membership_array(X: np.ndarray, centroids: np.ndarray, m: float) -> np.ndarray:
    d2 = squared_distances(X, centroids)
    u = np.empty_like(d2)

    on_centroid = d2 < ZERO_DISTANCE ** 2
    hit = on_centroid.any(axis=0)
    if hit.any():
        # limit of the update rule: share equally among coincident centroids
        cols = on_centroid[:, hit].astype(float)
        u[:, hit] = cols / cols.sum(axis=0)

    free = ~hit
    if free.any():
        # u_ik = 1 / sum_j (d2_ik / d2_jk)^(1/(m-1)), evaluated as a softmax in log space
        # so small fuzzifiers do not overflow
        logits = -np.log(d2[:, free]) / (m - 1.0)
        u[:, free] = softmax(logits, axis=0)

    return np.clip(u, 0.0, 1.0)


def update_memberships(dataset: Records, centroids: np.ndarray, m: float) -> MembershipMatrix:
    _check_fuzzifier(m)
    X = _as_records(dataset)
    return MembershipMatrix(_membership_array(X, np.asarray(centroids, dtype=float), m))


def update_centroids(dataset: Records, u: MembershipMatrix, m: float) -> np.ndarray:
    """Each centroid is the u^m-weighted mean of all records."""
    _check_fuzzifier(m)
    X = _as_records(dataset)
    if u.n_records != X.shape[0]:
        raise ShapeMismatch(f"{u.n_records} membership columns for {X.shape[0]} records")

    weights = u.u ** m
    denom = weights.sum(axis=1)
    empty = np.flatnonzero(denom <= 0.0)
    if empty.size:
        raise EmptyCluster(f"cluster {int(empty[0])} has zero total membership weight")

    numer = np.zeros((u.n_clusters, X.shape[1]))
    for start in range(0, X.shape[0], REDUCTION_CHUNK):
        stop = start + REDUCTION_CHUNK
        numer += weights[:, start:stop] @ X[start:stop]
    return numer / denom[:, None]


def objective(dataset: Records, u: MembershipMatrix, centroids: np.ndarray, m: float) -> float:
    """Q = sum_i sum_k u_ik^m * ||x_k - v_i||^2."""
    X = _as_records(dataset)
    V = np.asarray(centroids, dtype=float)
    if V.ndim != 2 or V.shape[0] != u.n_clusters:
        raise ShapeMismatch(f"{V.shape[0] if V.ndim == 2 else V.ndim} centroids for {u.n_clusters} clusters")
    if u.n_records != X.shape[0]:
        raise ShapeMismatch(f"{u.n_records} membership columns for {X.shape[0]} records")
    d2 = squared_distances(X, V)
    return float(np.sum((u.u ** m) * d2))


def defuzzify(u: MembershipMatrix) -> np.ndarray:
    return u.dominant()


def predict_memberships(data: Records, model: FcmModel) -> MembershipMatrix:
    """Memberships of (possibly unseen) records against a fitted model's centroids."""
    return update_memberships(data, model.centroids, model.m)


# -----------------------------
# Driver
# -----------------------------
def run_fcm(dataset: Records, config: FcmConfig, init: Optional[np.ndarray] = None) -> FcmModel:
    """
    Alternate membership and centroid updates until the relative objective
    change drops below `config.tol` or `config.max_iter` is reached.
    `init` overrides farthest-point seeding (warm start).
    """
    X = _as_records(dataset)
    if config.c > X.shape[0]:
        raise InvalidClusterCount(f"cluster count {config.c} exceeds {X.shape[0]} records")

    if init is None:
        V = init_centroids(X, config.c, config.seed)
    else:
        V = np.array(init, dtype=float, copy=True)
        if V.shape != (config.c, X.shape[1]):
            raise ShapeMismatch(f"initial centroids have shape {V.shape}, expected {(config.c, X.shape[1])}")

    trace: List[float] = []
    converged = False
    iterations = 0
    for it in range(1, config.max_iter + 1):
        iterations = it
        U = update_memberships(X, V, config.m)
        V = update_centroids(X, U, config.m)
        q = objective(X, U, V, config.m)
        trace.append(q)
        LOGGER.debug("iter=%d objective=%.10g", it, q)

        if len(trace) >= 2 and abs(trace[-1] - trace[-2]) < config.tol * max(1.0, trace[-2]):
            converged = True
            break

    if converged:
        LOGGER.info("FCM converged after %d iterations (objective=%.6g)", iterations, trace[-1])
    else:
        LOGGER.warning("FCM stopped at max_iter=%d without converging", config.max_iter)

    return FcmModel(
        centroids=V,
        memberships=update_memberships(X, V, config.m),
        objective_trace=tuple(trace),
        iterations_run=iterations,
        converged=converged,
        m=config.m,
    )
