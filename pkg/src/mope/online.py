"""Online credential-tweaking mixture: edit-sequence experts plus beam search.

Experts model P(op | source structure, previous two ops) over the dense edit
operation space, trained on canonical minimal scripts. The gate weighs
experts once per source password (clusters are fitted on source features),
and per-expert beams are merged by resulting string with weighted scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .alphabet import MAX_PASSWORD_LEN, Alphabet
from .clustering import ClusterModel, kmeans, select_k
from .editops import OpSpace, min_edit_script
from .errors import DataError
from .expert import NGramConfig, NGramExpert
from .features import feature_matrix, fit_standardizer
from .gate import GateConfig, gate_weights

# ops context: structural bucket token plus the last two operations
OPS_CONTEXT = 2

_CLASS_SETS = ("0123456789", "abcdefghijklmnopqrstuvwxyz",
               "ABCDEFGHIJKLMNOPQRSTUVWXYZ")


def source_bucket(src: str) -> int:
    """Coarse structural bucket of a source password: length x class presence."""
    bits = 0
    for i, chars in enumerate(_CLASS_SETS):
        if any(c in chars for c in src):
            bits |= 1 << i
    if any(all(c not in s for s in _CLASS_SETS) for c in src):
        bits |= 1 << 3
    return (min(len(src), MAX_PASSWORD_LEN) - 1) * 16 + bits


def bucket_token(space: OpSpace, src: str) -> int:
    # context-only symbol id, disjoint from the predictable op ids
    return space.n_pred + source_bucket(src)


def script_context(space: OpSpace, src: str, prev_ops) -> tuple:
    return (bucket_token(space, src), *prev_ops[-OPS_CONTEXT:])


def script_events(pairs, space: OpSpace):
    """(context, op_id) training events from canonical minimal scripts."""
    for pair in pairs:
        ops = [space.encode(op) for op in min_edit_script(pair.src, pair.tgt)]
        for t, op_id in enumerate(ops):
            yield script_context(space, pair.src, ops[:t]), op_id


def _online_cfg(cfg: NGramConfig | None) -> NGramConfig:
    if cfg is None:
        return NGramConfig(order=OPS_CONTEXT + 1, lam=0.001)
    return NGramConfig(order=OPS_CONTEXT + 1, lam=cfg.lam, gamma=cfg.gamma,
                       interp=cfg.interp)


def pretrain_online(pairs, alphabet: Alphabet, cfg: NGramConfig | None = None,
                    space: OpSpace | None = None) -> NGramExpert:
    pairs = list(pairs)
    if not pairs:
        raise DataError("cannot pre-train on an empty pair set")
    space = space or OpSpace(alphabet)
    return NGramExpert.train(script_events(pairs, space), space,
                             _online_cfg(cfg), n_items=len(pairs))


def finetune_online(base: NGramExpert, cluster_pairs, gamma: float | None = None,
                    cluster_id: int | None = None) -> NGramExpert:
    cluster_pairs = list(cluster_pairs)
    if not cluster_pairs:
        raise DataError("cannot fine-tune on an empty pair cluster")
    return NGramExpert.finetune_from(
        base, script_events(cluster_pairs, base.space),
        n_items=len(cluster_pairs), gamma=gamma, cluster_id=cluster_id,
    )


class OnlineMope:
    """k edit-sequence experts gated by the source password's structure."""

    def __init__(self, experts, gate: GateConfig, alphabet: Alphabet,
                 space: OpSpace, beam_width: int = 150, top_k: int = 150,
                 max_ops: int = 4):
        if len(experts) != gate.k:
            raise ValueError(f"{len(experts)} experts for k={gate.k} clusters")
        if beam_width < 1:
            raise ValueError("beam width must be >= 1")
        if beam_width < top_k:
            raise ValueError("beam width must be >= candidate count")
        self.experts = list(experts)
        self.gate = gate
        self.alphabet = alphabet
        self.space = space
        self.beam_width = beam_width
        self.top_k = top_k
        self.max_ops = max_ops

    @property
    def k(self) -> int:
        return self.gate.k


def _expert_beam(expert: NGramExpert, space: OpSpace, src: str, beam_width: int,
                 max_ops: int) -> dict:
    """Candidate string -> summed path probability for one expert's beam."""
    end_id = space.end_id
    bucket = space.n_pred + source_bucket(src)
    candidates: dict[str, float] = {}
    # beam entries: (op ids so far, current string, path probability)
    beam = [((), src, 1.0)]
    for depth in range(max_ops + 1):
        expansions = []
        for ops, cur, prob in beam:
            ctx = (bucket, *ops[-OPS_CONTEXT:])
            dist = expert.next_dist(ctx)
            end_prob = prob * dist[end_id]
            if 1 <= len(cur) <= MAX_PASSWORD_LEN and end_prob > 0.0:
                candidates[cur] = candidates.get(cur, 0.0) + end_prob
            if depth == max_ops:
                continue
            valid = space.valid_ids(len(cur))
            scores = prob * dist[valid]
            if valid.size > beam_width:
                top = np.argpartition(scores, -beam_width)[-beam_width:]
                valid, scores = valid[top], scores[top]
            for op_id, score in zip(valid, scores):
                expansions.append((ops, cur, int(op_id), float(score)))
        if not expansions:
            break
        expansions.sort(key=lambda e: -e[3])
        beam = []
        for ops, cur, op_id, score in expansions[:beam_width]:
            op = space.decode(op_id)
            if op.kind == "ins":
                nxt = cur[:op.pos] + op.char + cur[op.pos:]
            elif op.kind == "del":
                nxt = cur[:op.pos] + cur[op.pos + 1:]
            else:
                nxt = cur[:op.pos] + op.char + cur[op.pos + 1:]
            beam.append(((*ops, op_id), nxt, score))
    return candidates


def beam_search(model: OnlineMope, src: str, beam_width: int | None = None,
                top_k: int | None = None):
    """Top-K candidate passwords for a source, scored by the gated mixture.

    The gate runs once on the source; candidates absent from an expert's beam
    contribute nothing to that expert's term.
    """
    beam_width = beam_width or model.beam_width
    top_k = top_k or model.top_k
    if beam_width < 1:
        raise ValueError("beam width must be >= 1")
    weights = gate_weights(model.gate, src).weights
    combined: dict[str, float] = {}
    for j, w in enumerate(weights):
        if w <= 0.0:
            continue
        for cand, p in _expert_beam(model.experts[j], model.space, src,
                                    beam_width, model.max_ops).items():
            combined[cand] = combined.get(cand, 0.0) + w * p
    ranked = sorted(combined.items(), key=lambda t: (-t[1], t[0]))
    return ranked[:top_k]


def online_crack_rate(model: OnlineMope, test_pairs, budgets, threads: int = 1):
    """Fraction of pairs whose target appears within each candidate budget.

    Per-source beam searches are independent; threads caps the workers.
    """
    test_pairs = list(test_pairs)
    if not test_pairs:
        raise DataError("empty test pair set")
    budgets = sorted(budgets)
    if budgets[-1] > model.top_k:
        raise ValueError(f"budget {budgets[-1]} exceeds candidate count {model.top_k}")

    def candidates(pair):
        return [c for c, _ in beam_search(model, pair.src)]

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            all_cands = list(pool.map(candidates, test_pairs))
    else:
        all_cands = [candidates(pair) for pair in test_pairs]
    hits = {b: 0 for b in budgets}
    for pair, cands in zip(test_pairs, all_cands):
        for b in budgets:
            if pair.tgt in cands[:b]:
                hits[b] += 1
    return {b: hits[b] / len(test_pairs) for b in budgets}


def op_kind_mass(expert: NGramExpert, space: OpSpace, src: str, kind: str) -> float:
    """Total first-step probability the expert puts on one operation kind."""
    dist = expert.next_dist(script_context(space, src, ()))
    ranges = {
        "end": (space.end_id, space.end_id + 1),
        "del": (space._del0, space._rep0),
        "rep": (space._rep0, space._ins0),
        "ins": (space._ins0, space.n_pred),
    }
    lo, hi = ranges[kind]
    return float(dist[lo:hi].sum())


@dataclass
class OnlineTrainResult:
    model: OnlineMope
    base: NGramExpert
    cluster_model: ClusterModel
    selection: object = None
    cluster_sizes: list = field(default_factory=list)


def train_online(pairs, alphabet: Alphabet, cfg: NGramConfig | None = None,
                 beta: float = 2.5, k: int | None = None, k_range=(2, 10),
                 tau: float = 0.5, step: int = 1, seed: int = 0,
                 beam_width: int = 150, top_k: int = 150, max_ops: int = 4,
                 sample_cap: int | None = 2000) -> OnlineTrainResult:
    """Full online pipeline; clusters are fitted on SOURCE password features."""
    pairs = list(pairs)
    if not pairs:
        raise DataError("empty pair corpus")
    space = OpSpace(alphabet)
    feats = feature_matrix([p.src for p in pairs])
    standardizer = fit_standardizer(feats)
    std = standardizer.transform(feats)
    selection = None
    if k is None:
        selection = select_k(std, k_range, tau, seed, step=step, sample_cap=sample_cap)
        k = selection.k_star
    cluster_model = kmeans(std, k, seed=seed, standardizer=standardizer)
    base = pretrain_online(pairs, alphabet, cfg, space=space)
    experts = []
    sizes = []
    for j in range(k):
        members = [pairs[i] for i in np.flatnonzero(cluster_model.labels == j)]
        sizes.append(len(members))
        experts.append(finetune_online(base, members,
                                       gamma=cfg.gamma if cfg else None, cluster_id=j))
    gate_cfg = GateConfig(cluster_model=cluster_model, beta=beta)
    model = OnlineMope(experts, gate_cfg, alphabet, space,
                       beam_width=beam_width, top_k=top_k, max_ops=max_ops)
    return OnlineTrainResult(model=model, base=base, cluster_model=cluster_model,
                             selection=selection, cluster_sizes=sizes)
