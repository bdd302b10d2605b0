"""Loading, cleaning, splitting and pairing of password data.

Password files are UTF-8 with one password per line. Pair files are TSV with
``src<TAB>tgt`` per line. Non-conforming lines are dropped and counted, never
repaired, so the training distribution stays honest.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field

from .alphabet import MAX_PASSWORD_LEN, Alphabet
from .editops import levenshtein
from .errors import DataError


@dataclass(frozen=True)
class PasswordRecord:
    password: str
    account_key: str | None = None


@dataclass(frozen=True)
class PairRecord:
    src: str
    tgt: str


@dataclass
class LoadedCorpus:
    """Accepted records plus the per-reason counts of dropped lines."""

    records: list = field(default_factory=list)
    rejected: Counter = field(default_factory=Counter)
    total_lines: int = 0

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def passwords(self) -> list[str]:
        return [r.password for r in self.records]


def _read_lines(path):
    try:
        with open(path, "r", encoding="utf-8", errors="strict") as fh:
            for line in fh:
                yield line.rstrip("\n").rstrip("\r")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataError(f"{path} is not valid UTF-8: {exc}") from exc


def load_passwords(path, alphabet: Alphabet, max_len: int = MAX_PASSWORD_LEN) -> LoadedCorpus:
    """Read one password per line, keeping file order and multiplicity.

    Lines violating the record invariants (length in [1, max_len], every
    character in the alphabet) are dropped and tallied by reason.
    """
    out = LoadedCorpus()
    for line in _read_lines(path):
        out.total_lines += 1
        reason = alphabet.reject_reason(line, max_len)
        if reason is None:
            out.records.append(PasswordRecord(line))
        else:
            out.rejected[reason] += 1
    if not out.records:
        raise DataError(f"no valid passwords in {path} ({out.total_lines} lines read)")
    return out


def load_accounts(path, alphabet: Alphabet, max_len: int = MAX_PASSWORD_LEN) -> LoadedCorpus:
    """Read ``account_key<TAB>password`` lines into account-tagged records."""
    out = LoadedCorpus()
    for line in _read_lines(path):
        out.total_lines += 1
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0]:
            out.rejected["bad_line"] += 1
            continue
        key, pwd = parts
        reason = alphabet.reject_reason(pwd, max_len)
        if reason is None:
            out.records.append(PasswordRecord(pwd, account_key=key))
        else:
            out.rejected[reason] += 1
    if not out.records:
        raise DataError(f"no valid account records in {path}")
    return out


def load_pairs(path, alphabet: Alphabet, max_ed: int = 4,
               max_len: int = MAX_PASSWORD_LEN) -> LoadedCorpus:
    """Read src/tgt TSV pairs, dropping rows that break the pair invariants."""
    out = LoadedCorpus()
    for line in _read_lines(path):
        out.total_lines += 1
        parts = line.split("\t")
        if len(parts) != 2:
            out.rejected["bad_line"] += 1
            continue
        src, tgt = parts
        if alphabet.reject_reason(src, max_len) or alphabet.reject_reason(tgt, max_len):
            out.rejected["bad_password"] += 1
            continue
        if levenshtein(src, tgt) > max_ed:
            out.rejected["distance"] += 1
            continue
        out.records.append(PairRecord(src, tgt))
    if not out.records:
        raise DataError(f"no valid pairs in {path}")
    return out


def write_pairs(path, pairs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(f"{p.src}\t{p.tgt}\n")


def split_train_test(records, n_train: int, n_test: int, seed: int):
    """Deterministic train/test split with no password string shared.

    Distinct password strings are shuffled under the seed and assigned
    greedily (with their full multiplicity) until each side reaches its exact
    size; strings that would overshoot a side are skipped for it.
    """
    if n_train < 0 or n_test < 0:
        raise ValueError("split sizes must be non-negative")
    groups: dict[str, list] = {}
    for rec in records:
        groups.setdefault(_password_of(rec), []).append(rec)
    order = sorted(groups)
    random.Random(seed).shuffle(order)
    train: list = []
    test: list = []
    for pwd in order:
        bucket = groups[pwd]
        if len(train) + len(bucket) <= n_train:
            train.extend(bucket)
        elif len(test) + len(bucket) <= n_test:
            test.extend(bucket)
    if len(train) != n_train or len(test) != n_test:
        total = sum(len(v) for v in groups.values())
        raise DataError(
            f"cannot draw disjoint {n_train}/{n_test} split from "
            f"{total} records over {len(groups)} distinct passwords"
        )
    return train, test


def _password_of(rec) -> str:
    return rec.password if isinstance(rec, PasswordRecord) else str(rec)


def extract_pairs(records, max_ed: int = 4) -> list[PairRecord]:
    """Ordered source/target pairs from accounts owning >= 2 distinct passwords.

    Both directions are emitted for every unordered pair within edit
    distance max_ed. Accounts without a key are ignored.
    """
    by_account: dict[str, list[str]] = {}
    for rec in records:
        if rec.account_key is None:
            continue
        seen = by_account.setdefault(rec.account_key, [])
        if rec.password not in seen:
            seen.append(rec.password)
    pairs: list[PairRecord] = []
    for key in by_account:
        pwds = by_account[key]
        for i in range(len(pwds)):
            for j in range(i + 1, len(pwds)):
                if levenshtein(pwds[i], pwds[j]) <= max_ed:
                    pairs.append(PairRecord(pwds[i], pwds[j]))
                    pairs.append(PairRecord(pwds[j], pwds[i]))
    return pairs
