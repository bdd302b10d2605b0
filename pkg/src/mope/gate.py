"""Center-distance gate: distances to cluster centers -> sparse mixture weights.

Weights decay exponentially with the Euclidean distance between the input's
standardized feature vector and each cluster center; weights below the
activation threshold 1/(k*beta) are zeroed and the survivors renormalized.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clustering import ClusterModel
from .features import extract_features


@dataclass(frozen=True)
class GateConfig:
    cluster_model: ClusterModel
    beta: float = 10.0

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be > 0")

    @property
    def k(self) -> int:
        return self.cluster_model.k

    @property
    def threshold(self) -> float:
        return 1.0 / (self.k * self.beta)


@dataclass(frozen=True)
class SparseWeights:
    weights: np.ndarray
    active: np.ndarray

    def __iter__(self):
        return iter(self.weights)


def weights_from_distances(distances, beta: float) -> SparseWeights:
    """Exponential-decay weights with sparse activation over raw distances."""
    d = np.asarray(distances, dtype=float)
    p = np.exp(-d)
    w = p / p.sum()
    keep = w >= 1.0 / (d.size * beta)
    if not keep.any():
        # corner case the threshold rule leaves undefined: keep the argmax
        keep = np.zeros(d.size, dtype=bool)
        keep[int(w.argmax())] = True
    out = np.where(keep, w, 0.0)
    out /= out.sum()
    return SparseWeights(weights=out, active=np.flatnonzero(keep))


def gate_weights(cfg: GateConfig, text: str) -> SparseWeights:
    """Sparse expert weights for a password or prefix."""
    if not text:
        raise ValueError("gate input must be non-empty")
    model = cfg.cluster_model
    f = extract_features(text)
    if model.standardizer is not None:
        f = model.standardizer.transform(f)
    d = np.sqrt(((model.centers - f) ** 2).sum(axis=1))
    return weights_from_distances(d, cfg.beta)
