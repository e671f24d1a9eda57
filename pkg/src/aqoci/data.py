"""Dataset provisioning: seeded Gaussian blobs, CSV ingestion, 2-D PCA.

Blob generation is fully deterministic: cluster centers are drawn uniformly
from [-10, 10]^2 with the package PRNG, points are assigned round-robin and
offset by Box-Muller normals. CSV files carry one sample per row, comma
delimited, '.' decimal, optional single header line.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DimensionError, ParseError
from .rng import Pcg32

CENTER_RANGE = (-10.0, 10.0)


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray  # d x n
    true_labels: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise DimensionError("points must be a d x n matrix with d, n >= 1")
        object.__setattr__(self, "points", points)
        if self.true_labels is not None:
            labels = np.asarray(self.true_labels, dtype=np.int64)
            if labels.shape != (points.shape[1],):
                raise DimensionError("true_labels length must match the sample count")
            object.__setattr__(self, "true_labels", labels)

    @property
    def d(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]


def make_blobs(n: int, k: int, seed: int, std: float = 1.0) -> Dataset:
    """n two-dimensional points around k seeded random centers."""
    if k < 1 or n < k:
        raise ConfigurationError(f"need n >= k >= 1, got n={n}, k={k}")
    if not std > 0:
        raise ConfigurationError("std must be positive")
    rng = Pcg32(seed)
    centers = np.empty((2, k))
    for c in range(k):
        centers[0, c] = rng.uniform_range(*CENTER_RANGE)
        centers[1, c] = rng.uniform_range(*CENTER_RANGE)
    points = np.empty((2, n))
    labels = np.empty(n, dtype=np.int64)
    for i in range(n):
        c = i % k
        labels[i] = c
        points[0, i] = centers[0, c] + std * rng.normal()
        points[1, i] = centers[1, c] + std * rng.normal()
    return Dataset(
        points,
        labels,
        {"kind": "blobs", "n": n, "k": k, "seed": int(seed), "std": float(std)},
    )


def load_csv(path: str) -> Dataset:
    """Numeric CSV -> Dataset (rows are samples, columns features, no labels)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    rows: list[list[float]] = []
    raw = [(i + 1, line) for i, line in enumerate(lines) if line.strip() != ""]
    if not raw:
        raise ParseError(f"{path}: file contains no data")
    first_cells = raw[0][1].split(",")
    try:
        [float(cell) for cell in first_cells]
    except ValueError:
        raw = raw[1:]  # header line
        if not raw:
            raise ParseError(f"{path}: no data rows after the header")
    width = None
    for line_no, line in raw:
        cells = line.split(",")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise ParseError(
                f"{path}: line {line_no} has {len(cells)} fields, expected {width}"
            )
        try:
            rows.append([float(cell) for cell in cells])
        except ValueError as exc:
            raise ParseError(f"{path}: line {line_no}: {exc}") from exc
    points = np.asarray(rows, dtype=np.float64).T
    return Dataset(points, None, {"kind": "csv", "path": str(path)})


def subsample(dataset: Dataset, size: int, seed: int) -> Dataset:
    """Uniform sample of `size` points without replacement (seeded)."""
    if size > dataset.n:
        raise ConfigurationError(f"cannot sample {size} of {dataset.n} points")
    idx = Pcg32(seed).sample_indices(dataset.n, size)
    labels = dataset.true_labels[idx] if dataset.true_labels is not None else None
    provenance = dict(dataset.provenance)
    provenance["subsample"] = {"size": int(size), "seed": int(seed)}
    return Dataset(dataset.points[:, idx], labels, provenance)


def _jacobi_eigh(matrix: np.ndarray, tol: float = 1e-10, max_sweeps: int = 100):
    """Cyclic Jacobi rotations for a small symmetric matrix.

    Returns (eigenvalues, eigenvectors-as-columns), unordered.
    """
    a = matrix.copy()
    d = a.shape[0]
    vecs = np.eye(d)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2) * 2.0)
        if off < tol:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rot = np.eye(d)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                vecs = vecs @ rot
    return np.diag(a).copy(), vecs


def pca_2d(dataset: Dataset) -> Dataset:
    """Project onto the top-2 principal components (covariance divisor n-1).

    Component signs are pinned: the largest-magnitude loading is positive.
    """
    if dataset.d < 2:
        raise DimensionError("PCA to 2-D needs at least 2 features")
    if dataset.n < 2:
        raise DimensionError("PCA needs at least 2 samples")
    x = dataset.points
    centered = x - x.mean(axis=1, keepdims=True)
    cov = (centered @ centered.T) / (dataset.n - 1)
    values, vectors = _jacobi_eigh(cov)
    order = np.argsort(-values, kind="stable")
    components = vectors[:, order[:2]].copy()
    for c in range(2):
        lead = int(np.argmax(np.abs(components[:, c])))
        if components[lead, c] < 0:
            components[:, c] = -components[:, c]
    projected = components.T @ centered
    provenance = dict(dataset.provenance)
    provenance["pca"] = {"components": 2}
    if provenance.get("kind") == "csv":
        provenance["kind"] = "csv_pca"
    return Dataset(projected, dataset.true_labels, provenance)
