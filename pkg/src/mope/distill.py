"""Teacher -> student compression of the offline mixture.

The hybrid loss blends a temperature-softened KL term against the teacher
with plain cross-entropy against the true next symbol. For the count-model
student the expected-loss minimizer is closed form: every sampled prefix
contributes the blended target distribution as pseudo-counts to the
student's context table.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .expert import NGramConfig, NGramExpert, _ctx_key


@dataclass(frozen=True)
class DistillConfig:
    alpha: float = 0.7
    temperature: float = 2.0
    learning_rate: float = 1e-5  # parametric students only
    sample_count: int = 20_000

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.temperature <= 0.0:
            raise ValueError("temperature must be > 0")
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")


def temper(dist: np.ndarray, temperature: float) -> np.ndarray:
    """Temperature-soften a probability vector: p^(1/T), renormalized.

    This is softmax(logits / T) for logits = log p, the faithful analog of
    logit tempering when the model emits probabilities directly.
    """
    if temperature == 1.0:
        return np.asarray(dist, dtype=float)
    out = np.power(np.asarray(dist, dtype=float), 1.0 / temperature)
    return out / out.sum()


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0.0
    return float((p[mask] * np.log(p[mask] / q[mask])).sum())


def distill_loss(teacher_dist, student_dist, true_label: int,
                 alpha: float, temperature: float) -> float:
    """alpha * T^2 * KL(temper(t) || temper(s)) + (1 - alpha) * -log s[y]."""
    s = np.asarray(student_dist, dtype=float)
    if s[true_label] <= 0.0:
        raise DataError("student assigns zero mass to the true label")
    soft = temperature ** 2 * kl_divergence(
        temper(teacher_dist, temperature), temper(s, temperature)
    )
    hard = -float(np.log(s[true_label]))
    return alpha * soft + (1.0 - alpha) * hard


def distill(teacher, prefix_source, cfg: DistillConfig, seed: int = 0) -> NGramExpert:
    """Closed-form count-model student of an offline mixture teacher.

    sample_count passwords are drawn uniformly from prefix_source; every
    prefix of each contributes alpha * temper(t(x), T) + (1-alpha) * onehot(y)
    of pseudo-count mass to the student's context table. The student shares
    the pre-trained expert architecture (same order and smoothing).
    """
    corpus = [p.password if hasattr(p, "password") else p for p in prefix_source]
    if not corpus:
        raise DataError("cannot distill from an empty corpus")
    alphabet = teacher.alphabet
    ref_cfg = teacher.experts[0].cfg if hasattr(teacher, "experts") else teacher.cfg
    cfg_student = NGramConfig(order=ref_cfg.order, lam=ref_cfg.lam, interp=ref_cfg.interp)
    rng = random.Random(seed)
    teacher_cache: dict[str, np.ndarray] = {}
    dense: dict[bytes, np.ndarray] = {}
    alpha, temperature = cfg.alpha, cfg.temperature
    for _ in range(cfg.sample_count):
        pwd = corpus[rng.randrange(len(corpus))]
        ids = alphabet.context_ids(pwd)
        targets = list(ids[1:]) + [alphabet.end_id]
        for j, y in enumerate(targets):
            prefix = pwd[:j]
            t = teacher_cache.get(prefix)
            if t is None:
                t = teacher.next_char_dist(prefix)
                teacher_cache[prefix] = t
            window = ids[max(0, j + 1 - cfg_student.order):j + 1]
            key = _ctx_key(window)
            slot = dense.get(key)
            if slot is None:
                slot = np.zeros(alphabet.n_pred)
                dense[key] = slot
            if alpha > 0.0:
                slot += alpha * temper(t, temperature)
            if alpha < 1.0:
                slot[y] += 1.0 - alpha
    return NGramExpert.from_dense(alphabet, cfg_student, dense,
                                  kind="distilled", n_items=cfg.sample_count)


def student_fidelity(teacher, student, probe_prefixes) -> float:
    """Mean KL(teacher || student) over next-character distributions."""
    probes = list(probe_prefixes)
    if not probes:
        return 0.0
    total = 0.0
    for prefix in probes:
        total += kl_divergence(teacher.next_char_dist(prefix),
                               student.next_char_dist(prefix))
    return total / len(probes)
