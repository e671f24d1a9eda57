"""Clustering quality metrics: inertia, silhouette, homogeneity/completeness/V.

Homogeneity and completeness use the entropy definitions with natural logs and
live in [0, 1]; the V-measure is their harmonic mean (equivalently, normalized
mutual information). Silhouette uses plain (non-squared) Euclidean distances,
scores singleton-cluster points 0, and defines 0/0 as 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, UndefinedMetricError


@dataclass(frozen=True)
class MetricReport:
    """One scored clustering run. The label-agreement scores are None when the
    dataset has no ground-truth labels."""

    inertia: float
    silhouette: float
    homogeneity: float | None
    completeness: float | None
    v_measure: float | None
    n_iter: int


def inertia(data: np.ndarray, labels: np.ndarray, centroids: np.ndarray) -> float:
    """Sum of squared distances from each point to its assigned centroid."""
    data = np.asarray(data, dtype=np.float64)
    centroids = np.asarray(centroids, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if data.ndim != 2 or centroids.ndim != 2 or data.shape[0] != centroids.shape[0]:
        raise DimensionError("data and centroids must share the feature dimension")
    if labels.shape != (data.shape[1],):
        raise DimensionError("labels length must match the sample count")
    diff = data - centroids[:, labels]
    return float(np.sum(diff * diff))


def silhouette(data: np.ndarray, labels: np.ndarray) -> float:
    """Mean over points of (b - a) / max(a, b)."""
    data = np.asarray(data, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    n = data.shape[1]
    if labels.shape != (n,):
        raise DimensionError("labels length must match the sample count")
    unique = np.unique(labels)
    if unique.size < 2:
        raise UndefinedMetricError("silhouette needs at least two clusters")
    diff = data[:, :, None] - data[:, None, :]
    dist = np.sqrt(np.sum(diff * diff, axis=0))
    counts = {int(c): int(np.sum(labels == c)) for c in unique}
    scores = np.zeros(n)
    for p in range(n):
        own = int(labels[p])
        if counts[own] == 1:
            scores[p] = 0.0
            continue
        a = float(dist[p, labels == own].sum() / (counts[own] - 1))
        b = min(float(dist[p, labels == c].mean()) for c in counts if c != own)
        denom = max(a, b)
        scores[p] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(scores.mean())


def _entropy(counts: np.ndarray) -> float:
    total = counts.sum()
    probs = counts[counts > 0] / total
    return float(-np.sum(probs * np.log(probs)))


def homogeneity_completeness_v(
    true_labels: np.ndarray, pred_labels: np.ndarray
) -> tuple[float, float, float]:
    """Entropy-based agreement scores between two labelings."""
    true_labels = np.asarray(true_labels).ravel()
    pred_labels = np.asarray(pred_labels).ravel()
    if true_labels.shape != pred_labels.shape or true_labels.size < 1:
        raise DimensionError("label vectors must have equal nonzero length")
    n = true_labels.size
    _, ti = np.unique(true_labels, return_inverse=True)
    _, pi = np.unique(pred_labels, return_inverse=True)
    contingency = np.zeros((ti.max() + 1, pi.max() + 1))
    for a, b in zip(ti, pi):
        contingency[a, b] += 1

    h_c = _entropy(contingency.sum(axis=1))
    h_k = _entropy(contingency.sum(axis=0))
    # conditional entropies H(C|K) and H(K|C)
    h_c_given_k = 0.0
    h_k_given_c = 0.0
    for col in range(contingency.shape[1]):
        column = contingency[:, col]
        total = column.sum()
        if total > 0:
            h_c_given_k += (total / n) * _entropy(column)
    for row in range(contingency.shape[0]):
        row_counts = contingency[row, :]
        total = row_counts.sum()
        if total > 0:
            h_k_given_c += (total / n) * _entropy(row_counts)

    homogeneity = 1.0 if h_c == 0.0 else 1.0 - h_c_given_k / h_c
    completeness = 1.0 if h_k == 0.0 else 1.0 - h_k_given_c / h_k
    if homogeneity + completeness == 0.0:
        v_measure = 0.0
    else:
        v_measure = 2.0 * homogeneity * completeness / (homogeneity + completeness)
    return float(homogeneity), float(completeness), float(v_measure)
