"""K-means clustering (k-means++ seeding, Lloyd iterations) and PCA projection.

Cluster ids are canonicalized by sorting the converged centroids
lexicographically, so the same partition always gets the same labels no
matter which seed found it first.  PCA components follow a fixed sign
convention (largest-magnitude coordinate positive) for reproducible plots.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = [
    "ClusterAssignment",
    "Projection2D",
    "export_assignments_csv",
    "export_projection_csv",
    "kmeans",
    "pca_project",
]

_MOVEMENT_TOL = 1e-6
_MAX_ITER = 300


@dataclass(frozen=True)
class ClusterAssignment:
    """Labels, centroids, and the inertia trace of one k-means run."""

    labels: tuple[int, ...]
    centroids: np.ndarray
    inertia: float
    seed: int
    iterations_run: int
    inertia_history: tuple[float, ...]


@dataclass(frozen=True)
class Projection2D:
    """Principal-component projection: coords, components, explained variance."""

    coords: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray


def _plusplus_init(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = data.shape[0]
    centroids = np.empty((k, data.shape[1]))
    first = min(int(rng.random() * n), n - 1)
    centroids[0] = data[first]
    dist_sq = ((data - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = float(dist_sq.sum())
        if total > 0.0:
            target = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(dist_sq), target, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = j % n  # all remaining mass on already-chosen points
        centroids[j] = data[idx]
        dist_sq = np.minimum(dist_sq, ((data - centroids[j]) ** 2).sum(axis=1))
    return centroids


def kmeans(points: Sequence, k: int = 4, seed: int = 42) -> ClusterAssignment:
    """Cluster points into k groups; deterministic for a fixed seed.

    Runs Lloyd iterations until the largest centroid movement drops below
    1e-6 or 300 iterations pass.  An emptied cluster is repaired by
    stealing the point currently farthest from its own centroid.
    """
    data = np.asarray(points, dtype=float)
    if data.ndim != 2:
        raise ValueError("points must form a 2-D array")
    n, dim = data.shape
    if dim < 1:
        raise ValueError("points must have at least one dimension")
    if k < 1:
        raise ValueError("k must be at least 1")
    if n < k:
        raise ValueError(f"need at least k={k} points, got {n}")

    rng = np.random.Generator(np.random.PCG64(seed))
    centroids = _plusplus_init(data, k, rng)

    history = []
    labels = np.zeros(n, dtype=int)
    iterations = 0
    for _ in range(_MAX_ITER):
        iterations += 1
        distances = ((data[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = distances.argmin(axis=1)

        counts = np.bincount(labels, minlength=k)
        for j in np.flatnonzero(counts == 0):
            own = distances[np.arange(n), labels]
            eligible = counts[labels] > 1
            p = int(np.argmax(np.where(eligible, own, -1.0)))
            counts[labels[p]] -= 1
            labels[p] = j
            counts[j] = 1
            centroids[j] = data[p]
            distances[:, j] = ((data - data[p]) ** 2).sum(axis=1)

        new_centroids = np.empty_like(centroids)
        for j in range(k):
            new_centroids[j] = data[labels == j].mean(axis=0)
        movement = float(np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max())
        centroids = new_centroids

        inertia = float(((data - centroids[labels]) ** 2).sum())
        history.append(inertia)
        if movement < _MOVEMENT_TOL:
            break

    # Canonical labels: clusters ordered by centroid coordinates.
    order = np.lexsort(centroids.T[::-1])
    remap = np.empty(k, dtype=int)
    remap[order] = np.arange(k)
    return ClusterAssignment(
        labels=tuple(int(x) for x in remap[labels]),
        centroids=centroids[order],
        inertia=history[-1],
        seed=seed,
        iterations_run=iterations,
        inertia_history=tuple(history),
    )


def pca_project(points: Sequence, n_components: int = 2) -> Projection2D:
    """Project mean-centered points onto their top principal directions."""
    data = np.asarray(points, dtype=float)
    if data.ndim != 2:
        raise ValueError("points must form a 2-D array")
    n, dim = data.shape
    if n < 2:
        raise ValueError("need at least two points")
    if n_components > dim:
        raise ValueError(f"cannot extract {n_components} components from {dim}-D data")

    centered = data - data.mean(axis=0)
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:n_components].copy()
    for row in components:
        pivot = int(np.argmax(np.abs(row)))
        if row[pivot] < 0:
            row *= -1.0
    coords = centered @ components.T
    explained = (singular[:n_components] ** 2) / (n - 1)
    return Projection2D(coords=coords, components=components, explained_variance=explained)


def export_assignments_csv(assignment: ClusterAssignment, poem_indices: Sequence[int], path: str | Path) -> Path:
    """Write ``poem_index,cluster`` rows."""
    if len(poem_indices) != len(assignment.labels):
        raise ValueError("poem index count does not match label count")
    path = Path(path)
    lines = ["poem_index,cluster"]
    for poem_index, label in zip(poem_indices, assignment.labels):
        lines.append(f"{poem_index},{label}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def export_projection_csv(projection: Projection2D, poem_indices: Sequence[int], path: str | Path) -> Path:
    """Write ``poem_index,pc1,pc2`` rows."""
    if len(poem_indices) != projection.coords.shape[0]:
        raise ValueError("poem index count does not match projection rows")
    path = Path(path)
    lines = ["poem_index,pc1,pc2"]
    for poem_index, row in zip(poem_indices, projection.coords):
        lines.append(f"{poem_index},{format(float(row[0]), '.9g')},{format(float(row[1]), '.9g')}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path
