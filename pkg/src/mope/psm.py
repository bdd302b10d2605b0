"""Real-time password strength rating on top of Monte-Carlo guess numbers.

The meter samples its pool once at construction; a query is then one
sequence-probability evaluation plus a binary search, which keeps latency in
the millisecond range. Strength levels follow the guess-number cut-offs:
weak below 10^6, medium in [10^6, 10^14), strong at or above 10^14.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .alphabet import MAX_PASSWORD_LEN
from .errors import DataError
from .offline import GuessPool, sequence_prob

WEAK_LIMIT = 1e6
STRONG_LIMIT = 1e14

# Table-style decade bucket edges: 10^0, 10^3, ..., 10^18
DEFAULT_BUCKET_EDGES = tuple(10.0 ** e for e in range(0, 19, 3))


def strength_level(guess_number: float) -> str:
    if guess_number < WEAK_LIMIT:
        return "weak"
    if guess_number < STRONG_LIMIT:
        return "medium"
    return "strong"


@dataclass(frozen=True)
class StrengthVerdict:
    log10_guess_number: float
    level: str
    latency_ms: float


class StrengthMeter:
    """Cached-pool guess-number meter over any character model."""

    def __init__(self, model, pool_size: int = 10_000, seed: int = 0):
        self.model = model
        self.alphabet = model.alphabet
        self.pool = GuessPool(model, pool_size, seed)

    def guess_number(self, password: str) -> float:
        reason = self.alphabet.reject_reason(password, MAX_PASSWORD_LEN)
        if reason is not None:
            raise DataError(f"invalid password ({reason})")
        return self.pool.guess_number_of_prob(sequence_prob(self.model, password))

    def strength(self, password: str) -> StrengthVerdict:
        start = time.perf_counter()
        g = self.guess_number(password)
        latency_ms = (time.perf_counter() - start) * 1e3
        return StrengthVerdict(
            log10_guess_number=float(np.log10(g)),
            level=strength_level(g),
            latency_ms=latency_ms,
        )


@dataclass
class UnsafeErrorMatrix:
    """Cross-tabulated guess-number buckets of two meters on one test set.

    counts[i][j] = passwords put in bucket i by meter_a and bucket j by
    meter_b. Cells with i > j are unsafe for meter_a relative to meter_b:
    meter_a rated those passwords as harder to guess.
    """

    edges: tuple
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def unsafe_count(self) -> int:
        return int(np.tril(self.counts, k=-1).sum())

    def bucket(self, guess_number: float) -> int:
        return max(int(np.searchsorted(self.edges, guess_number, side="right")) - 1, 0)


def unsafe_error_matrix(meter_a, meter_b, test_set,
                        edges=DEFAULT_BUCKET_EDGES) -> UnsafeErrorMatrix:
    """Bucketed guess-number cross-tabulation of two meters."""
    test_set = [p.password if hasattr(p, "password") else p for p in test_set]
    if not test_set:
        raise DataError("empty test set")
    edges = tuple(edges)
    n = len(edges)
    counts = np.zeros((n, n), dtype=np.int64)
    out = UnsafeErrorMatrix(edges=edges, counts=counts)
    for pwd in test_set:
        i = out.bucket(meter_a.guess_number(pwd))
        j = out.bucket(meter_b.guess_number(pwd))
        counts[i, j] += 1
    return out
