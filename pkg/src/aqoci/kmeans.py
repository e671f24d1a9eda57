"""Naive (Lloyd's) k-means with pluggable initialization and exact convergence.

Data is stored features x samples (d x n) throughout, matching the rest of the
package. Distances are squared Euclidean. Convergence means the assignments
stabilized: the update step reproduced the previous centroids exactly, which
is equivalent to the labels repeating on the next pass but costs one fewer
assignment step, so iteration counts stay sharp.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError
from .rng import Pcg32


@dataclass(frozen=True)
class KMeansConfig:
    """init=None picks k random observations with the given seed; otherwise
    init must be a d x k centroid matrix."""

    k: int
    max_iterations: int = 300
    init: np.ndarray | None = None
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.init is not None:
            init = np.asarray(self.init, dtype=np.float64)
            if init.ndim != 2 or init.shape[1] != self.k:
                raise DimensionError("init must be a d x k matrix")
            object.__setattr__(self, "init", init)


@dataclass(frozen=True)
class ClusterRun:
    seed_centroids: np.ndarray
    final_centroids: np.ndarray
    labels: np.ndarray
    inertia: float
    n_iter: int
    converged: bool
    inertia_history: tuple[float, ...] = ()


def _check_data(data: np.ndarray) -> np.ndarray:
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise DimensionError("data must be a d x n matrix")
    return data


def _sq_distances(data: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(k, n) squared Euclidean distances."""
    diff = data[:, None, :] - centroids[:, :, None]  # d x k x n
    return np.sum(diff * diff, axis=0)


def assignment_step(data: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """Nearest-centroid labels; ties go to the lowest cluster index."""
    data = _check_data(data)
    centroids = _check_data(centroids)
    if not np.all(np.isfinite(centroids)):
        raise ValueError("centroids must be finite")
    return np.argmin(_sq_distances(data, centroids), axis=0)


def update_step(data: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    """Cluster means; an empty cluster adopts the point farthest from its
    nearest non-empty centroid (the donor cluster then recomputes its mean)."""
    data = _check_data(data)
    labels = np.asarray(labels, dtype=np.int64).copy()
    d, n = data.shape
    centroids = np.zeros((d, k))
    counts = np.bincount(labels, minlength=k)
    for i in range(k):
        if counts[i] > 0:
            centroids[:, i] = data[:, labels == i].mean(axis=1)
    empty = [i for i in range(k) if counts[i] == 0]
    for i in empty:
        occupied = [c for c in range(k) if counts[c] > 0]
        dist = _sq_distances(data, centroids[:, occupied])
        nearest = dist.min(axis=0)
        donor_point = int(np.argmax(nearest))
        donor = labels[donor_point]
        labels[donor_point] = i
        counts[donor] -= 1
        counts[i] += 1
        centroids[:, i] = data[:, donor_point]
        if counts[donor] > 0:
            centroids[:, donor] = data[:, labels == donor].mean(axis=1)
    return centroids


def inertia_of(data: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    diff = data - centroids[:, np.asarray(labels, dtype=np.int64)]
    return float(np.sum(diff * diff))


def random_init(data: np.ndarray, k: int, seed: int) -> np.ndarray:
    """k distinct observations drawn with the package PRNG."""
    data = _check_data(data)
    n = data.shape[1]
    if k > n:
        raise ConfigurationError(f"k={k} exceeds the {n} available observations")
    idx = Pcg32(seed).sample_indices(n, k)
    return data[:, idx].copy()


def lloyd(data: np.ndarray, config: KMeansConfig) -> ClusterRun:
    """Alternate assignment/update until assignments stabilize or the
    iteration cap; n_iter counts assignment steps executed."""
    data = _check_data(data)
    n = data.shape[1]
    if config.k > n:
        raise ConfigurationError(f"k={config.k} exceeds the {n} available observations")
    if config.init is not None:
        centroids = config.init.copy()
        if centroids.shape[0] != data.shape[0]:
            raise DimensionError("init centroids dimensionality does not match data")
    else:
        centroids = random_init(data, config.k, config.seed)
    seed_centroids = centroids.copy()

    labels = np.zeros(n, dtype=np.int64)
    inertia_history: list[float] = []
    n_iter = 0
    converged = False
    for _ in range(config.max_iterations):
        labels = assignment_step(data, centroids)
        n_iter += 1
        inertia_history.append(inertia_of(data, labels, centroids))
        new_centroids = update_step(data, labels, config.k)
        if np.array_equal(new_centroids, centroids):
            converged = True
            break
        centroids = new_centroids
    return ClusterRun(
        seed_centroids=seed_centroids,
        final_centroids=centroids,
        labels=labels,
        inertia=inertia_of(data, labels, centroids),
        n_iter=n_iter,
        converged=converged,
        inertia_history=tuple(inertia_history),
    )


def run_to_dict(run: ClusterRun) -> dict:
    return {
        "seed_centroids": run.seed_centroids.tolist(),
        "final_centroids": run.final_centroids.tolist(),
        "labels": run.labels.tolist(),
        "inertia": run.inertia,
        "n_iter": run.n_iter,
        "converged": run.converged,
    }


def run_to_json(run: ClusterRun) -> str:
    return json.dumps(run_to_dict(run), sort_keys=True)
