"""K-means over standardized structural features and silhouette-driven k selection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .features import Standardizer


@dataclass
class ClusterModel:
    """k cluster centers in standardized feature space.

    Carries the standardizer that produced the space so new inputs can be
    mapped consistently, and optionally the training-row labels.
    """

    k: int
    centers: np.ndarray
    standardizer: Standardizer | None = None
    labels: np.ndarray | None = None
    objective_history: list = field(default_factory=list, repr=False)


@dataclass
class KSelectionReport:
    scores: dict  # k -> silhouette score, in evaluation order
    k_star: int
    tau: float
    threshold_met: bool


def _pairwise_sq(x: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Squared Euclidean distances, (n, k), via the expanded-norm identity."""
    sq = (x * x).sum(axis=1)[:, None] + (c * c).sum(axis=1)[None, :] - 2.0 * x @ c.T
    np.maximum(sq, 0.0, out=sq)
    return sq


def kmeans(matrix: np.ndarray, k: int, seed: int, max_iter: int = 300,
           tol: float = 1e-6, standardizer: Standardizer | None = None) -> ClusterModel:
    """Lloyd iterations with Euclidean distance, deterministic under seed.

    Centers are initialized from k distinct rows. An empty cluster is
    re-seeded from the row currently farthest from its assigned center.
    Iteration stops when the largest center displacement drops below tol.
    """
    x = np.asarray(matrix, dtype=float)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError("kmeans needs a non-empty 2-d matrix")
    distinct = np.unique(x, axis=0)
    if k < 2:
        raise DataError(f"k must be >= 2, got {k}")
    if k > distinct.shape[0]:
        raise DataError(f"k={k} exceeds the {distinct.shape[0]} distinct rows")
    rng = np.random.default_rng(seed)
    centers = distinct[rng.choice(distinct.shape[0], size=k, replace=False)].copy()
    history = []
    labels = np.zeros(x.shape[0], dtype=int)
    for _ in range(max_iter):
        sq = _pairwise_sq(x, centers)
        labels = sq.argmin(axis=1)
        history.append(float(sq[np.arange(x.shape[0]), labels].sum()))
        while True:
            empties = np.flatnonzero(np.bincount(labels, minlength=k) == 0)
            if empties.size == 0:
                break
            # re-seed from the row farthest from its current center
            j = int(empties[0])
            own = ((x - centers[labels]) ** 2).sum(axis=1)
            far = int(own.argmax())
            centers[j] = x[far]
            labels[far] = j
        new_centers = np.vstack([x[labels == j].mean(axis=0) for j in range(k)])
        shift = np.sqrt(((new_centers - centers) ** 2).sum(axis=1)).max()
        centers = new_centers
        if shift < tol:
            break
    # final assignment so labels are a fixed point of the returned centers
    labels = _pairwise_sq(x, centers).argmin(axis=1)
    return ClusterModel(k=k, centers=centers, standardizer=standardizer,
                        labels=labels, objective_history=history)


def silhouette(matrix: np.ndarray, labels, sample_cap: int | None = None,
               seed: int = 0) -> float:
    """Mean silhouette score s(i) = (b(i) - a(i)) / max(a(i), b(i)).

    a(i) is the mean distance to the other points of i's cluster, b(i) the
    smallest mean distance to any other cluster. Points in singleton clusters
    score 0, as do degenerate points with a = b = 0. When sample_cap is set
    and the matrix is larger, the mean runs over a seeded row sample while
    distances are still taken against the full matrix.
    """
    x = np.asarray(matrix, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n = x.shape[0]
    uniq = np.unique(labels)
    if uniq.size < 2:
        raise DataError("silhouette needs at least two non-empty clusters")
    cluster_sizes = {int(c): int((labels == c).sum()) for c in uniq}
    if sample_cap is not None and n > sample_cap:
        rows = np.sort(np.random.default_rng(seed).choice(n, size=sample_cap, replace=False))
    else:
        rows = np.arange(n)
    d = np.sqrt(_pairwise_sq(x[rows], x))  # (len(rows), n)
    sums = np.zeros((len(rows), uniq.size))
    for ci, c in enumerate(uniq):
        sums[:, ci] = d[:, labels == c].sum(axis=1)
    scores = np.zeros(len(rows))
    for ri, i in enumerate(rows):
        own = int(labels[i])
        oi = int(np.searchsorted(uniq, own))
        n_own = cluster_sizes[own]
        if n_own <= 1:
            continue  # singleton convention: s(i) = 0
        a = sums[ri, oi] / (n_own - 1)
        b = min(
            sums[ri, ci] / cluster_sizes[int(c)]
            for ci, c in enumerate(uniq)
            if c != own
        )
        m = max(a, b)
        scores[ri] = 0.0 if m == 0.0 else (b - a) / m
    return float(scores.mean())


def select_k(matrix: np.ndarray, k_range, tau: float, seed: int, step: int = 5,
             sample_cap: int | None = 2000, score_fn=None) -> KSelectionReport:
    """Scan k ascending and pick the smallest k whose silhouette exceeds tau.

    If no k in the grid clears the threshold the argmax is returned with
    threshold_met=False. score_fn(k) may replace the default
    kmeans+silhouette scoring (used for injected score sequences in tests).
    """
    k_min, k_max = k_range
    if k_min < 2 or k_max < k_min:
        raise DataError(f"invalid k range [{k_min}, {k_max}]")
    if step < 1:
        raise DataError("k grid step must be >= 1")

    if score_fn is None:
        x = np.asarray(matrix, dtype=float)

        def score_fn(k):
            model = kmeans(x, k, seed=seed)
            return silhouette(x, model.labels, sample_cap=sample_cap, seed=seed)

    scores: dict[int, float] = {}
    for k in range(k_min, k_max + 1, step):
        s = float(score_fn(k))
        scores[k] = s
        if s > tau:
            return KSelectionReport(scores=scores, k_star=k, tau=tau, threshold_met=True)
    best = max(scores, key=scores.get)
    return KSelectionReport(scores=scores, k_star=best, tau=tau, threshold_met=False)
