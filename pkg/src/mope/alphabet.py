"""Character set handling shared by every model in the toolkit.

Characters get contiguous ids starting at 0. Two sentinel ids live past the
character range: END (the stop symbol the models predict) and START (a
context-only marker that is never predicted). Predicted distributions are
arrays of ``n_pred = n_chars + 1`` slots with END in the last slot.
"""

from __future__ import annotations

import hashlib

MAX_PASSWORD_LEN = 16


class Alphabet:
    """Ordered, duplicate-free character set with START/END sentinels."""

    def __init__(self, symbols: str):
        if len(symbols) == 0:
            raise ValueError("alphabet must not be empty")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet contains duplicate symbols")
        self.symbols = symbols
        self.index = {c: i for i, c in enumerate(symbols)}
        self.n_chars = len(symbols)
        self.end_id = self.n_chars
        self.start_id = self.n_chars + 1
        # size of predicted distributions: every character plus END
        self.n_pred = self.n_chars + 1
        self.digest = hashlib.sha256(symbols.encode("utf-8")).hexdigest()

    @classmethod
    def printable_ascii(cls) -> "Alphabet":
        """The 95 printable ASCII characters (space through tilde)."""
        return cls("".join(chr(c) for c in range(0x20, 0x7F)))

    def __contains__(self, char: str) -> bool:
        return char in self.index

    def __len__(self) -> int:
        return self.n_chars

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and other.symbols == self.symbols

    def __repr__(self) -> str:
        return f"Alphabet({self.n_chars} chars, digest={self.digest[:8]})"

    def is_valid_password(self, text: str, max_len: int = MAX_PASSWORD_LEN) -> bool:
        if not 1 <= len(text) <= max_len:
            return False
        return all(c in self.index for c in text)

    def reject_reason(self, text: str, max_len: int = MAX_PASSWORD_LEN) -> str | None:
        """None if valid, otherwise one of 'empty', 'too_long', 'bad_char'."""
        if len(text) == 0:
            return "empty"
        if len(text) > max_len:
            return "too_long"
        if any(c not in self.index for c in text):
            return "bad_char"
        return None

    def encode(self, text: str) -> list[int]:
        try:
            return [self.index[c] for c in text]
        except KeyError as exc:
            raise ValueError(f"character {exc.args[0]!r} not in alphabet") from None

    def decode(self, ids) -> str:
        return "".join(self.symbols[i] for i in ids)

    def context_ids(self, prefix: str) -> tuple[int, ...]:
        """Symbol ids of a prefix with the leading START marker attached."""
        return (self.start_id, *self.encode(prefix))
