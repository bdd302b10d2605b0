"""Toolkit-wide error types."""


class DataError(ValueError):
    """Input data cannot satisfy an operation's contract."""


class CandidateLimitError(RuntimeError):
    """Candidate enumeration exceeded the configured hard cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(f"candidate set exceeded hard cap ({count} > {cap})")
        self.count = count
        self.cap = cap
