"""Structural feature vectors for passwords and prefixes.

Feature order is fixed: [length, digit_ratio, lower_ratio, upper_ratio,
special_ratio, switch_count, max_digit_run, max_letter_run]. Ratios use four
character classes; runs and switches merge upper/lower into one letter class,
so "Abc123" yields switch_count 1 and max_letter_run 3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEATURE_NAMES = (
    "length",
    "digit_ratio",
    "lower_ratio",
    "upper_ratio",
    "special_ratio",
    "switch_count",
    "max_digit_run",
    "max_letter_run",
)
N_FEATURES = len(FEATURE_NAMES)

_DIGITS = frozenset("0123456789")
_LOWER = frozenset("abcdefghijklmnopqrstuvwxyz")
_UPPER = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZ")


def extract_features(password: str) -> np.ndarray:
    """Map a non-empty string to its 8-dimensional structural vector."""
    if not password:
        raise ValueError("cannot extract features from an empty string")
    n_d = n_l = n_u = 0
    switches = 0
    d_run = a_run = d_max = a_max = 0
    prev_cls = None
    for c in password:
        if c in _DIGITS:
            n_d += 1
            cls = 0  # digit
            d_run += 1
            a_run = 0
        elif c in _LOWER:
            n_l += 1
            cls = 1  # letter
            a_run += 1
            d_run = 0
        elif c in _UPPER:
            n_u += 1
            cls = 1
            a_run += 1
            d_run = 0
        else:
            cls = 2  # special
            d_run = 0
            a_run = 0
        if d_run > d_max:
            d_max = d_run
        if a_run > a_max:
            a_max = a_run
        if prev_cls is not None and cls != prev_cls:
            switches += 1
        prev_cls = cls
    length = len(password)
    n_s = length - n_d - n_l - n_u
    return np.array(
        [
            float(length),
            n_d / length,
            n_l / length,
            n_u / length,
            n_s / length,
            float(switches),
            float(d_max),
            float(a_max),
        ]
    )


def feature_matrix(passwords) -> np.ndarray:
    """Stack feature vectors of an iterable of passwords into an (n, 8) matrix."""
    rows = [extract_features(p) for p in passwords]
    if not rows:
        raise ValueError("cannot build a feature matrix from zero passwords")
    return np.vstack(rows)


@dataclass(frozen=True)
class Standardizer:
    """Per-column mean/std scaler fitted with population (1/n) statistics."""

    means: np.ndarray
    stds: np.ndarray

    def transform(self, x: np.ndarray) -> np.ndarray:
        """Standardize a vector or matrix; zero-variance columns map to 0."""
        x = np.asarray(x, dtype=float)
        safe = np.where(self.stds > 0.0, self.stds, 1.0)
        out = (x - self.means) / safe
        if out.ndim == 1:
            out[self.stds == 0.0] = 0.0
        else:
            out[:, self.stds == 0.0] = 0.0
        return out


def fit_standardizer(matrix: np.ndarray) -> Standardizer:
    """Population mean/std per column of a non-empty feature matrix."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] < 1:
        raise ValueError("standardizer needs at least one feature row")
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)  # population std (ddof=0)
    return Standardizer(means=means, stds=stds)


def standardize(std: Standardizer, v: np.ndarray) -> np.ndarray:
    return std.transform(v)
