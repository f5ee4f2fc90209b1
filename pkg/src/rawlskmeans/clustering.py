"""Lloyd's k-means with seeded restarts, and the assignment type it produces."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .dataset import Dataset


class EmptyClusterError(ValueError):
    """An operation would leave a cluster without members."""


def squared_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.dot(d, d))


def sq_dists_to(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    """(n, k) squared distances, computed by explicit differences (no expansion)."""
    diff = X[:, None, :] - C[None, :, :]
    return np.einsum("nkf,nkf->nk", diff, diff)


def recompute_centroids(X, labels, k: int) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(X, Dataset):
        X = X.features
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError("label out of range")
    sizes = np.bincount(labels, minlength=k)
    if (sizes == 0).any():
        raise EmptyClusterError(f"cluster(s) {np.flatnonzero(sizes == 0).tolist()} are empty")
    centroids = np.empty((k, X.shape[1]))
    for c in range(k):
        centroids[c] = X[labels == c].mean(axis=0)
    return centroids, sizes


@dataclass(frozen=True, eq=False)
class ClusterAssignment:
    labels: np.ndarray
    k: int
    centroids: np.ndarray
    sizes: np.ndarray
    seed: int | None = None

    @classmethod
    def from_labels(cls, dataset: Dataset, labels, k: int | None = None, seed: int | None = None):
        labels = np.array(labels, dtype=np.int64)
        if k is None:
            k = int(labels.max()) + 1
        centroids, sizes = recompute_centroids(dataset.features, labels, k)
        labels.setflags(write=False)
        centroids.setflags(write=False)
        sizes.setflags(write=False)
        return cls(labels, k, centroids, sizes, seed)

    @property
    def n(self) -> int:
        return len(self.labels)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)

    def to_json(self, **meta) -> dict:
        d = {"k": self.k, "labels": self.labels.tolist(), "seed": self.seed}
        d.update(meta)
        return d


def save_assignment(assignment: ClusterAssignment, path, **meta) -> None:
    Path(path).write_text(json.dumps(assignment.to_json(**meta)))


def load_assignment(path: str | os.PathLike, dataset: Dataset) -> ClusterAssignment:
    d: Mapping = json.loads(Path(path).read_text())
    if len(d["labels"]) != dataset.n:
        raise ValueError(f"assignment has {len(d['labels'])} labels, dataset has {dataset.n}")
    return ClusterAssignment.from_labels(dataset, d["labels"], int(d["k"]), d.get("seed"))


def objective(dataset: Dataset, assignment: ClusterAssignment) -> float:
    diff = dataset.features - assignment.centroids[assignment.labels]
    return float(np.einsum("nf,nf->", diff, diff))


def _init_centroids(X: np.ndarray, k: int, rng: np.random.Generator, init: str) -> np.ndarray:
    n = len(X)
    if init == "random":
        return X[rng.choice(n, k, replace=False)].copy()
    if init == "kmeans++":
        idx = [int(rng.integers(n))]
        d2 = sq_dists_to(X, X[idx]).min(axis=1)
        for _ in range(1, k):
            total = d2.sum()
            if total <= 0:
                # all remaining points coincide with a chosen centre
                rest = np.setdiff1d(np.arange(n), idx)
                idx.append(int(rng.choice(rest)))
            else:
                idx.append(int(rng.choice(n, p=d2 / total)))
            d2 = np.minimum(d2, sq_dists_to(X, X[idx[-1:]])[:, 0])
        return X[idx].copy()
    raise ValueError(f"unknown init {init!r}")


def _repair_empty(X, labels, dist, k):
    """Hand each empty cluster the example farthest from its centroid.

    Only examples whose cluster keeps at least one other member are eligible.
    """
    sizes = np.bincount(labels, minlength=k)
    own = dist[np.arange(len(X)), labels]
    for c in np.flatnonzero(sizes == 0):
        eligible = sizes[labels] > 1
        cand = np.where(eligible, own, -np.inf)
        i = int(np.argmax(cand))
        sizes[labels[i]] -= 1
        labels[i] = c
        sizes[c] = 1
        own[i] = 0.0
    return labels


def lloyd(
    dataset: Dataset,
    k: int,
    seed: int,
    max_iters: int = 300,
    init: str = "random",
) -> tuple[ClusterAssignment, list[float]]:
    """Run Lloyd's algorithm; returns the assignment and per-iteration objectives.

    Stops at a label fixpoint or after ``max_iters`` iterations. Ties between
    equidistant centroids go to the lowest cluster index.
    """
    X = dataset.features
    n = len(X)
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    rng = np.random.default_rng(seed)
    centroids = _init_centroids(X, k, rng, init)
    labels = None
    history: list[float] = []
    for _ in range(max_iters):
        dist = sq_dists_to(X, centroids)
        new = np.argmin(dist, axis=1)
        if np.bincount(new, minlength=k).min() == 0:
            new = _repair_empty(X, new, dist, k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centroids, _ = recompute_centroids(X, labels, k)
        diff = X - centroids[labels]
        history.append(float(np.einsum("nf,nf->", diff, diff)))
    return ClusterAssignment.from_labels(dataset, labels, k, seed), history


def kmeans(
    dataset: Dataset,
    k: int,
    seed: int,
    max_iters: int = 300,
    init: str = "random",
) -> ClusterAssignment:
    return lloyd(dataset, k, seed, max_iters, init)[0]
