"""Count-based conditional next-symbol experts.

The reference expert is an add-lambda n-gram over an arbitrary symbol space
(characters for sequence models, edit operations for transform models). It
realizes the pre-train / fine-tune lifecycle exactly: pre-training is plain
maximum likelihood with add-lambda smoothing, fine-tuning blends cluster
counts with a gamma-weighted prior drawn from the pre-trained base so the
specialized expert keeps general knowledge. All arithmetic is closed form,
which keeps every downstream check exact.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

import numpy as np

from .alphabet import Alphabet
from .errors import DataError

MAGIC = b"MOPEXP1\n"


@dataclass(frozen=True)
class NGramConfig:
    """Reference expert settings.

    order: context length in symbols. lam: add-lambda pseudo-count. gamma:
    fine-tune prior strength (None = 10 * cluster/base size ratio). interp:
    optional per-order mixing weights, index = context length; None uses the
    longest available context only, which keeps the closed forms exact.
    """

    order: int = 5
    lam: float = 0.01
    gamma: float | None = None
    interp: tuple | None = None

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.lam <= 0:
            raise ValueError("smoothing pseudo-count must be > 0")
        if self.gamma is not None and self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    def digest(self) -> str:
        blob = json.dumps(
            {"order": self.order, "lam": self.lam, "gamma": self.gamma,
             "interp": list(self.interp) if self.interp else None},
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode()).hexdigest()


def _ctx_key(window) -> bytes:
    return np.asarray(window, dtype="<u2").tobytes()


class NGramExpert:
    """Immutable interpolated add-lambda model over a symbol space.

    ``space`` provides n_pred (number of predictable symbols) and a digest;
    contexts are tuples of symbol ids (ids beyond n_pred, such as START or
    structural bucket tokens, are legal context-only symbols).
    """

    def __init__(self, space, cfg: NGramConfig, kind: str = "pretrained",
                 base: "NGramExpert | None" = None, gamma: float = 0.0,
                 cluster_id: int | None = None):
        self.space = space
        self.cfg = cfg
        self.kind = kind
        self.base = base
        self.gamma = float(gamma)
        self.cluster_id = cluster_id
        self.n_pred = space.n_pred
        self.train_items = 0
        self._ids: dict[bytes, np.ndarray] = {}
        self._vals: dict[bytes, np.ndarray] = {}
        self._totals: dict[bytes, float] = {}
        self._dense: dict[bytes, np.ndarray] = {}
        self._finalized = False

    # -- training ---------------------------------------------------------

    def _accumulate(self, events):
        counts: dict[bytes, dict[int, float]] = {}
        for ctx, target in events:
            window = tuple(ctx)[-self.cfg.order:]
            lengths = (len(window),)
            if self.cfg.interp is not None:
                lengths = range(0, len(window) + 1)
            for ln in lengths:
                key = _ctx_key(window[len(window) - ln:])
                slot = counts.setdefault(key, {})
                slot[target] = slot.get(target, 0.0) + 1.0
        for key, slot in counts.items():
            ids = np.array(sorted(slot), dtype=np.int64)
            self._ids[key] = ids
            self._vals[key] = np.array([slot[i] for i in ids], dtype=float)
        self._finalize()

    def _accumulate_dense(self, dense: dict):
        self._dense = dense
        self._finalize()

    def _finalize(self):
        if self._dense:
            self._totals = {k: float(v.sum()) for k, v in self._dense.items()}
        else:
            self._totals = {k: float(v.sum()) for k, v in self._vals.items()}
        self._finalized = True

    @classmethod
    def train(cls, events, space, cfg: NGramConfig, kind: str = "pretrained",
              n_items: int = 0) -> "NGramExpert":
        expert = cls(space, cfg, kind=kind)
        expert.train_items = n_items
        expert._accumulate(events)
        if not expert._ids:
            raise DataError("no training events")
        return expert

    @classmethod
    def from_dense(cls, space, cfg: NGramConfig, dense: dict, kind: str = "distilled",
                   n_items: int = 0) -> "NGramExpert":
        """Expert backed by dense per-context pseudo-count vectors (distilled students)."""
        if not dense:
            raise DataError("no accumulated contexts")
        expert = cls(space, cfg, kind=kind)
        expert.train_items = n_items
        expert._accumulate_dense(dense)
        return expert

    @classmethod
    def finetune_from(cls, base: "NGramExpert", events, n_items: int = 0,
                      gamma: float | None = None,
                      cluster_id: int | None = None) -> "NGramExpert":
        """New expert over cluster events with a gamma-weighted base prior."""
        if gamma is None:
            gamma = base.cfg.gamma
        if gamma is None:
            gamma = 10.0 * n_items / max(base.train_items, 1)
        expert = cls(base.space, base.cfg, kind="finetuned", base=base,
                     gamma=float(gamma), cluster_id=cluster_id)
        expert.train_items = n_items
        expert._accumulate(events)
        if not expert._ids:
            raise DataError("no fine-tuning events")
        return expert

    # -- inference --------------------------------------------------------

    def _order_dist(self, window: tuple) -> np.ndarray:
        key = _ctx_key(window)
        lam = self.cfg.lam
        if self._dense:
            arr = self._dense.get(key)
            vec = (arr + lam) if arr is not None else np.full(self.n_pred, lam)
            total = self._totals.get(key, 0.0)
        else:
            vec = np.full(self.n_pred, lam)
            ids = self._ids.get(key)
            if ids is not None:
                vec[ids] += self._vals[key]
                total = self._totals[key]
            else:
                total = 0.0
        if self.base is not None:
            vec = vec + self.gamma * self.base._order_dist(window)
            denom = total + self.gamma + lam * self.n_pred
        else:
            denom = total + lam * self.n_pred
        return vec / denom

    def next_dist(self, ctx) -> np.ndarray:
        """Full next-symbol distribution, strictly positive, summing to 1."""
        window = tuple(ctx)[-self.cfg.order:] if self.cfg.order else ()
        if self.cfg.interp is None:
            return self._order_dist(window)
        weights = self.cfg.interp
        avail = len(window)
        mix = np.zeros(self.n_pred)
        wsum = 0.0
        for ln in range(0, avail + 1):
            w = weights[ln] if ln < len(weights) else 0.0
            if w <= 0.0:
                continue
            mix += w * self._order_dist(window[avail - ln:])
            wsum += w
        if wsum == 0.0:
            return self._order_dist(window)
        return mix / wsum

    # -- serialization ----------------------------------------------------

    def save(self, path) -> None:
        header = {
            "kind": self.kind,
            "order": self.cfg.order,
            "lam": self.cfg.lam,
            "gamma": self.gamma,
            "cluster_id": self.cluster_id,
            "interp": list(self.cfg.interp) if self.cfg.interp else None,
            "space_digest": self.space.digest,
            "train_items": self.train_items,
            "has_base": self.base is not None,
            "storage": "dense" if self._dense else "sparse",
            "config_digest": self.cfg.digest(),
        }
        blob = json.dumps(header, sort_keys=True).encode("utf-8")
        keys = sorted(self._dense) if self._dense else sorted(self._ids)
        ctx_lens = np.array([len(k) // 2 for k in keys], dtype=np.uint8)
        ctx_flat = (
            np.frombuffer(b"".join(keys), dtype="<u2")
            if keys else np.zeros(0, dtype="<u2")
        )
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(len(blob).to_bytes(4, "big"))
            fh.write(blob)
            np.save(fh, ctx_lens)
            np.save(fh, ctx_flat)
            if self._dense:
                rows = np.vstack([self._dense[k] for k in keys]) if keys else np.zeros((0, self.n_pred))
                np.save(fh, rows)
            else:
                row_sizes = np.array([self._ids[k].size for k in keys], dtype=np.int64)
                np.save(fh, row_sizes)
                np.save(fh, np.concatenate([self._ids[k] for k in keys]) if keys else np.zeros(0, dtype=np.int64))
                np.save(fh, np.concatenate([self._vals[k] for k in keys]) if keys else np.zeros(0))

    @classmethod
    def load(cls, path, space, base: "NGramExpert | None" = None) -> "NGramExpert":
        with open(path, "rb") as fh:
            if fh.read(len(MAGIC)) != MAGIC:
                raise DataError(f"{path} is not an expert file")
            size = int.from_bytes(fh.read(4), "big")
            header = json.loads(fh.read(size).decode("utf-8"))
            ctx_lens = np.load(fh)
            ctx_flat = np.load(fh)
            dense_rows = rows_sizes = ids_flat = vals_flat = None
            if header["storage"] == "dense":
                dense_rows = np.load(fh)
            else:
                rows_sizes = np.load(fh)
                ids_flat = np.load(fh)
                vals_flat = np.load(fh)
        if header["space_digest"] != space.digest:
            raise DataError(f"{path} was trained on a different symbol space")
        if header["has_base"] and base is None:
            raise DataError(f"{path} is a fine-tuned expert and needs its base model")
        cfg = NGramConfig(order=header["order"], lam=header["lam"],
                          interp=tuple(header["interp"]) if header["interp"] else None)
        expert = cls(space, cfg, kind=header["kind"],
                     base=base if header["has_base"] else None,
                     gamma=header["gamma"], cluster_id=header["cluster_id"])
        expert.train_items = header["train_items"]
        keys = []
        off = 0
        for ln in ctx_lens:
            keys.append(ctx_flat[off:off + int(ln)].tobytes())
            off += int(ln)
        if header["storage"] == "dense":
            expert._dense = {k: dense_rows[i].copy() for i, k in enumerate(keys)}
        else:
            off = 0
            for i, k in enumerate(keys):
                n = int(rows_sizes[i])
                expert._ids[k] = ids_flat[off:off + n].copy()
                expert._vals[k] = vals_flat[off:off + n].copy()
                off += n
        expert._finalize()
        return expert

    # -- conveniences for character experts --------------------------------

    @property
    def alphabet(self) -> Alphabet:
        if not isinstance(self.space, Alphabet):
            raise TypeError("this expert's symbol space is not a character alphabet")
        return self.space

    def next_char_dist(self, prefix: str) -> np.ndarray:
        """Next-character distribution for a text prefix (character spaces only)."""
        return self.next_dist(self.alphabet.context_ids(prefix))


def password_events(passwords, alphabet: Alphabet, order: int):
    """(context, target) pairs for every prefix of every START/END-wrapped password."""
    for pwd in passwords:
        ids = alphabet.context_ids(pwd)  # (START, c1, ..., cn)
        targets = list(ids[1:]) + [alphabet.end_id]
        for j, tgt in enumerate(targets):
            yield ids[max(0, j + 1 - order):j + 1], tgt


def pretrain(corpus, cfg: NGramConfig, alphabet: Alphabet) -> NGramExpert:
    """Maximum-likelihood expert over the whole corpus (add-lambda smoothed)."""
    corpus = [p.password if hasattr(p, "password") else p for p in corpus]
    if not corpus:
        raise DataError("cannot pre-train on an empty corpus")
    return NGramExpert.train(
        password_events(corpus, alphabet, cfg.order), alphabet, cfg,
        kind="pretrained", n_items=len(corpus),
    )


def finetune(base: NGramExpert, cluster_corpus, gamma: float | None = None,
             cluster_id: int | None = None) -> NGramExpert:
    """Specialize a pre-trained expert to one cluster; the base is unmodified."""
    cluster_corpus = [p.password if hasattr(p, "password") else p for p in cluster_corpus]
    if not cluster_corpus:
        raise DataError("cannot fine-tune on an empty cluster")
    if not isinstance(base.space, Alphabet):
        raise TypeError("finetune on passwords requires a character-space base")
    return NGramExpert.finetune_from(
        base,
        password_events(cluster_corpus, base.space, base.cfg.order),
        n_items=len(cluster_corpus), gamma=gamma, cluster_id=cluster_id,
    )
