"""Edit operations between password pairs: distance, minimal scripts, replay.

Scripts are ordered left-to-right and every position refers to the string as
it exists when that operation is applied (after all earlier operations took
effect). Every script carries exactly one trailing ``end`` marker.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .alphabet import MAX_PASSWORD_LEN, Alphabet

INS, DEL, REP, END = "ins", "del", "rep", "end"


@dataclass(frozen=True)
class EditOp:
    kind: str
    pos: int = 0
    char: str | None = None

    def __post_init__(self):
        if self.kind not in (INS, DEL, REP, END):
            raise ValueError(f"unknown edit op kind {self.kind!r}")
        if self.kind in (INS, REP) and (self.char is None or len(self.char) != 1):
            raise ValueError(f"{self.kind} needs a single replacement character")
        if self.kind in (DEL, END) and self.char is not None:
            raise ValueError(f"{self.kind} takes no character")

    def __repr__(self) -> str:
        if self.kind == END:
            return "end"
        if self.kind == DEL:
            return f"del({self.pos})"
        return f"{self.kind}({self.char!r},{self.pos})"


END_OP = EditOp(END)


def levenshtein(a: str, b: str) -> int:
    """Plain DP edit distance with unit ins/del/rep costs."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def min_edit_script(src: str, tgt: str) -> list[EditOp]:
    """A Levenshtein-minimal script turning src into tgt, ending with ``end``.

    Ties between equal-cost DP paths are broken preferring rep over del over
    ins at the leftmost position, which makes training scripts reproducible.
    """
    n, m = len(src), len(tgt)
    # dist[i][j] = edit distance between src[i:] and tgt[j:]
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dist[i][m] = n - i
    for j in range(m + 1):
        dist[n][j] = m - j
    for i in range(n - 1, -1, -1):
        row, below = dist[i], dist[i + 1]
        for j in range(m - 1, -1, -1):
            if src[i] == tgt[j]:
                row[j] = below[j + 1]
            else:
                row[j] = 1 + min(below[j + 1], below[j], row[j + 1])
    ops: list[EditOp] = []
    i = j = 0
    while i < n or j < m:
        d = dist[i][j]
        if i < n and j < m and src[i] == tgt[j] and dist[i + 1][j + 1] == d:
            i += 1
            j += 1
            continue
        # op positions index the current working string: tgt[:j] + src[i:]
        if i < n and j < m and dist[i + 1][j + 1] + 1 == d:
            ops.append(EditOp(REP, j, tgt[j]))
            i += 1
            j += 1
        elif i < n and dist[i + 1][j] + 1 == d:
            ops.append(EditOp(DEL, j))
            i += 1
        else:
            ops.append(EditOp(INS, j, tgt[j]))
            j += 1
    ops.append(END_OP)
    return ops


class EditApplicationError(ValueError):
    """Raised when a script cannot be replayed on a source string."""


def validate_script(ops) -> None:
    """Check the exactly-one-trailing-end shape of a script."""
    ops = list(ops)
    if not ops or ops[-1].kind != END:
        raise EditApplicationError("edit script must end with the end marker")
    if any(op.kind == END for op in ops[:-1]):
        raise EditApplicationError("end marker may only appear at the tail")


def apply_edits(src: str, ops, max_len: int = MAX_PASSWORD_LEN) -> str:
    """Replay a script on src, validating positions op by op."""
    validate_script(ops)
    chars = list(src)
    for op in ops:
        if op.kind == END:
            break
        if op.kind == INS:
            if not 0 <= op.pos <= len(chars):
                raise EditApplicationError(f"{op!r} out of range for length {len(chars)}")
            chars.insert(op.pos, op.char)
        elif not 0 <= op.pos < len(chars):
            raise EditApplicationError(f"{op!r} out of range for length {len(chars)}")
        elif op.kind == DEL:
            del chars[op.pos]
        else:  # rep
            chars[op.pos] = op.char
    result = "".join(chars)
    if not 1 <= len(result) <= max_len:
        raise EditApplicationError(
            f"edited result length {len(result)} outside [1, {max_len}]"
        )
    return result


class OpSpace:
    """Dense id space over every applicable edit operation.

    Layout: [end][del x pos][rep x (pos, char)][ins x (pos, char)], with the
    ins block allowing one extra position (appending at the tail).
    """

    def __init__(self, alphabet: Alphabet, max_len: int = MAX_PASSWORD_LEN):
        self.alphabet = alphabet
        self.max_len = max_len
        nc = alphabet.n_chars
        self.end_id = 0
        self._del0 = 1
        self._rep0 = self._del0 + max_len
        self._ins0 = self._rep0 + max_len * nc
        self.n_pred = self._ins0 + (max_len + 1) * nc
        self.digest = f"editops:{max_len}:{alphabet.digest}"

    def encode(self, op: EditOp) -> int:
        nc = self.alphabet.n_chars
        if op.kind == END:
            return self.end_id
        if not 0 <= op.pos <= self.max_len:
            raise ValueError(f"position {op.pos} outside op space")
        if op.kind == DEL:
            if op.pos >= self.max_len:
                raise ValueError(f"position {op.pos} outside op space")
            return self._del0 + op.pos
        cid = self.alphabet.index[op.char]
        if op.kind == REP:
            if op.pos >= self.max_len:
                raise ValueError(f"position {op.pos} outside op space")
            return self._rep0 + op.pos * nc + cid
        return self._ins0 + op.pos * nc + cid

    def decode(self, op_id: int) -> EditOp:
        nc = self.alphabet.n_chars
        if op_id == self.end_id:
            return END_OP
        if op_id < self._rep0:
            return EditOp(DEL, op_id - self._del0)
        if op_id < self._ins0:
            rel = op_id - self._rep0
            return EditOp(REP, rel // nc, self.alphabet.symbols[rel % nc])
        rel = op_id - self._ins0
        return EditOp(INS, rel // nc, self.alphabet.symbols[rel % nc])

    def valid_ids(self, cur_len: int) -> np.ndarray:
        """Ids of every operation applicable to a string of length cur_len
        (excluding end, which is always applicable)."""
        nc = self.alphabet.n_chars
        blocks = [
            np.arange(self._del0, self._del0 + min(cur_len, self.max_len)),
            np.arange(self._rep0, self._rep0 + min(cur_len, self.max_len) * nc),
            np.arange(self._ins0, self._ins0 + (min(cur_len, self.max_len) + 1) * nc),
        ]
        return np.concatenate(blocks)
