"""Offline mixture model: next-character blending, candidate enumeration,
Monte-Carlo guess numbers and crack curves.

The candidate enumerator walks a FIFO queue from the start marker, expanding
a child only while the cumulative probability stays at or above the
generation threshold; strings hitting the length cap are emitted with their
prefix mass. Guess numbers follow the standard Monte-Carlo position
estimator: G = 1 + sum over sampled passwords with probability strictly
above the target's of 1/(n * p_i).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .alphabet import MAX_PASSWORD_LEN, Alphabet
from .clustering import ClusterModel, kmeans, select_k
from .errors import CandidateLimitError, DataError
from .expert import NGramConfig, NGramExpert, finetune, pretrain
from .features import feature_matrix, fit_standardizer
from .gate import GateConfig, gate_weights


@dataclass
class GenerationConfig:
    tau: float
    l_min: int = 1
    l_max: int = MAX_PASSWORD_LEN

    def __post_init__(self):
        if not 0.0 < self.tau < 1.0:
            raise ValueError("generation threshold must lie in (0, 1)")
        if not 1 <= self.l_min <= self.l_max <= MAX_PASSWORD_LEN:
            raise ValueError(f"need 1 <= l_min <= l_max <= {MAX_PASSWORD_LEN}")


@dataclass(frozen=True)
class GuessEstimate:
    password: str
    prob: float
    guess_number: float

    @property
    def log10(self) -> float:
        return float(np.log10(self.guess_number))


class OfflineMope:
    """k fine-tuned character experts behind the center-distance gate."""

    def __init__(self, experts, gate: GateConfig, alphabet: Alphabet):
        if len(experts) != gate.k:
            raise ValueError(f"{len(experts)} experts for k={gate.k} clusters")
        self.experts = list(experts)
        self.gate = gate
        self.alphabet = alphabet

    @property
    def k(self) -> int:
        return self.gate.k

    def gate_weights_for(self, prefix: str) -> np.ndarray:
        """Sparse weights for a prefix; the empty prefix carries no structure
        and activates all experts uniformly."""
        if not prefix:
            return np.full(self.k, 1.0 / self.k)
        return gate_weights(self.gate, prefix).weights

    def next_char_dist(self, prefix: str, weights=None) -> np.ndarray:
        """P(c | prefix) = sum_j w'_j * P_j(c | prefix)."""
        if weights is None:
            weights = self.gate_weights_for(prefix)
        ctx = self.alphabet.context_ids(prefix)
        out = np.zeros(self.alphabet.n_pred)
        for j, w in enumerate(weights):
            if w > 0.0:
                out += w * self.experts[j].next_dist(ctx)
        return out


def mixture_next_char(model, prefix: str) -> np.ndarray:
    return model.next_char_dist(prefix)


def sequence_prob(model, password: str, regate_per_char: bool = True) -> float:
    """Probability of the full START...END-wrapped character sequence.

    With regate_per_char=False (mixtures only) the gate runs once on the
    complete password and those weights score every step.
    """
    alphabet = model.alphabet
    weights = None
    if not regate_per_char:
        weights = model.gate_weights_for(password)
    prob = 1.0
    for j, char in enumerate(password):
        dist = _dist_at(model, password[:j], weights)
        prob *= dist[alphabet.index[char]]
    prob *= _dist_at(model, password, weights)[alphabet.end_id]
    return prob


def _dist_at(model, prefix, weights):
    if weights is None:
        return model.next_char_dist(prefix)
    return model.next_char_dist(prefix, weights=weights)


def generate(model, cfg: GenerationConfig, hard_cap: int = 10_000_000):
    """Breadth-first threshold enumeration of candidates (descending order).

    Children are queued only while the running product of next-character
    probabilities stays >= tau, so every emitted candidate carries at least
    tau of model mass. Strings reaching l_max are emitted with their prefix
    mass. Raises CandidateLimitError when the set outgrows hard_cap.
    """
    alphabet = model.alphabet
    end_id = alphabet.end_id
    out = []
    queue = deque([("", 1.0, False)])
    while queue:
        prefix, prob, ended = queue.popleft()
        if ended or len(prefix) >= cfg.l_max:
            if len(prefix) >= cfg.l_min:
                out.append((prefix, prob))
                if len(out) > hard_cap:
                    raise CandidateLimitError(len(out) + len(queue), hard_cap)
            continue
        dist = model.next_char_dist(prefix)
        for cid in range(alphabet.n_chars):
            child = prob * dist[cid]
            if child >= cfg.tau:
                queue.append((prefix + alphabet.symbols[cid], child, False))
        end_prob = prob * dist[end_id]
        if end_prob >= cfg.tau:
            queue.append((prefix, end_prob, True))
    out.sort(key=lambda t: (-t[1], t[0]))
    return out


def write_candidates(path, candidates) -> None:
    """TSV of password<TAB>probability with 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        for pwd, prob in candidates:
            fh.write(f"{pwd}\t{prob:.16e}\n")


def sample_passwords(model, n: int, seed: int, max_len: int = MAX_PASSWORD_LEN):
    """Ancestral samples from the model: (password | None, probability) pairs.

    Draws that stop immediately (empty string) or run past max_len are
    invalid passwords; they are returned with password None so estimators can
    keep the sample count honest while skipping their mass.
    """
    alphabet = model.alphabet
    rng = np.random.default_rng(seed)
    cache: dict[str, tuple] = {}
    samples = []
    for _ in range(n):
        prefix = ""
        prob = 1.0
        result = None
        while True:
            entry = cache.get(prefix)
            if entry is None:
                dist = model.next_char_dist(prefix)
                entry = (dist, np.cumsum(dist))
                if len(cache) < 1 << 17:
                    cache[prefix] = entry
            dist, cum = entry
            sym = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            sym = min(sym, alphabet.n_pred - 1)
            # multiply the raw dist entry so sampled probabilities match
            # sequence_prob bit for bit on the same string
            prob *= dist[sym]
            if sym == alphabet.end_id:
                if prefix:
                    result = prefix
                break
            prefix += alphabet.symbols[sym]
            if len(prefix) > max_len:
                break
        samples.append((result, prob))
    return samples


class GuessPool:
    """Pre-sampled pool turning model probabilities into guess numbers.

    Sampling happens once; each query is then a binary search plus a suffix
    sum, which is what makes millisecond strength queries possible.
    """

    def __init__(self, model, n_samples: int, seed: int):
        if n_samples < 1:
            raise ValueError("need at least one sample")
        self.model = model
        self.n_samples = n_samples
        probs = np.array(
            [p for pwd, p in sample_passwords(model, n_samples, seed) if pwd is not None]
        )
        probs.sort()
        self._probs = probs
        # weights[i] = 1 / (n * p_i); suffix sums give the estimator directly
        rev = np.cumsum((1.0 / (n_samples * probs))[::-1])[::-1]
        self._suffix = np.append(rev, 0.0)

    def guess_number_of_prob(self, q: float) -> float:
        if q <= 0.0:
            raise DataError("probability must be positive under smoothing")
        idx = int(np.searchsorted(self._probs, q, side="right"))
        return 1.0 + float(self._suffix[idx])

    def guess_number(self, password: str) -> float:
        return self.guess_number_of_prob(sequence_prob(self.model, password))


def estimate_guess_number(model, password: str, n_samples: int, seed: int) -> GuessEstimate:
    """Monte-Carlo guess number of one password under the model."""
    pool = GuessPool(model, n_samples, seed)
    q = sequence_prob(model, password)
    return GuessEstimate(password=password, prob=q,
                         guess_number=pool.guess_number_of_prob(q))


def crack_curve(models, test_set, budgets, mode: str = "single",
                n_samples: int = 10_000, seed: int = 0, threads: int = 1):
    """Fraction of the test set cracked within each guess budget.

    mode="single" scores against models[0]; mode="min_auto" takes the
    minimum guess number across all models (the union attacker). threads
    caps the workers used to score test passwords.
    """
    test_set = [p.password if hasattr(p, "password") else p for p in test_set]
    if not test_set:
        raise DataError("empty test set")
    budgets = list(budgets)
    if budgets != sorted(budgets):
        raise ValueError("budgets must be ascending")
    if mode == "single":
        if len(models) != 1:
            raise ValueError("single mode scores exactly one model")
    elif mode != "min_auto":
        raise ValueError(f"unknown mode {mode!r}")
    pools = [GuessPool(m, n_samples, seed) for m in models]

    def score(pwd):
        return min(pool.guess_number(pwd) for pool in pools)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            guess_numbers = np.array(list(pool.map(score, test_set)))
    else:
        guess_numbers = np.array([score(pwd) for pwd in test_set])
    return [float((guess_numbers <= b).mean()) for b in budgets]


@dataclass
class OfflineTrainResult:
    model: OfflineMope
    base: NGramExpert
    cluster_model: ClusterModel
    selection: object = None
    cluster_sizes: list = field(default_factory=list)


def train_offline(passwords, alphabet: Alphabet, cfg: NGramConfig | None = None,
                  beta: float = 10.0, k: int | None = None,
                  k_range=(2, 10), tau: float = 0.5, step: int = 1,
                  seed: int = 0, sample_cap: int | None = 2000) -> OfflineTrainResult:
    """Full offline pipeline: features -> clusters -> base -> fine-tuned experts."""
    passwords = [p.password if hasattr(p, "password") else p for p in passwords]
    if not passwords:
        raise DataError("empty training corpus")
    cfg = cfg or NGramConfig()
    feats = feature_matrix(passwords)
    standardizer = fit_standardizer(feats)
    std = standardizer.transform(feats)
    selection = None
    if k is None:
        selection = select_k(std, k_range, tau, seed, step=step, sample_cap=sample_cap)
        k = selection.k_star
    cluster_model = kmeans(std, k, seed=seed, standardizer=standardizer)
    base = pretrain(passwords, cfg, alphabet)
    experts = []
    sizes = []
    for j in range(k):
        members = [passwords[i] for i in np.flatnonzero(cluster_model.labels == j)]
        sizes.append(len(members))
        experts.append(finetune(base, members, gamma=cfg.gamma, cluster_id=j))
    gate = GateConfig(cluster_model=cluster_model, beta=beta)
    model = OfflineMope(experts, gate, alphabet)
    return OfflineTrainResult(model=model, base=base, cluster_model=cluster_model,
                              selection=selection, cluster_sizes=sizes)
