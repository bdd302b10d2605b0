"""Shared fixtures: toy alphabets, stub experts, synthetic structured corpora."""

import numpy as np
import pytest

from mope import Alphabet, NGramConfig
from mope.clustering import ClusterModel
from mope.features import Standardizer
from mope.gate import GateConfig
from mope.offline import OfflineMope, train_offline

DIGIT_P = [0.7, 0.2, 0.1]
LETTER_P = [0.5, 0.25, 0.15, 0.07, 0.03]
SPECIAL_P = [0.6, 0.25, 0.15]

FAMILY_SYMBOLS = "abcde123!@#"


class FixedExpert:
    """Stub emitting one fixed distribution for every context."""

    def __init__(self, probs):
        self.probs = np.asarray(probs, dtype=float)

    def next_dist(self, ctx):
        return self.probs


def uniform_gate(k: int) -> GateConfig:
    """Gate whose centers are unit vectors along distinct axes while inputs
    standardize to ~0, so every expert gets exactly 1/k weight (k <= 8)."""
    std = Standardizer(means=np.zeros(8), stds=np.full(8, 1e30))
    centers = np.zeros((k, 8))
    for j in range(k):
        centers[j, j] = 1.0
    model = ClusterModel(k=k, centers=centers, standardizer=std)
    return GateConfig(cluster_model=model, beta=float(k))


def digit_family(rng, n, lo=4, hi=13):
    return ["".join(rng.choice(list("123"), p=DIGIT_P, size=int(rng.integers(lo, hi))))
            for _ in range(n)]


def mixed_family(rng, n):
    return ["".join(rng.choice(list("abcde"), p=LETTER_P, size=int(rng.integers(2, 6)))) +
            "".join(rng.choice(list("123"), p=DIGIT_P, size=int(rng.integers(2, 6))))
            for _ in range(n)]


def special_family(rng, n, lo=4, hi=13):
    return ["".join(rng.choice(list("!@#"), p=SPECIAL_P, size=int(rng.integers(lo, hi))))
            for _ in range(n)]


def family_corpus(seed=11, n_a=500, n_b=400, n_c=300):
    rng = np.random.default_rng(seed)
    return digit_family(rng, n_a), mixed_family(rng, n_b), special_family(rng, n_c)


@pytest.fixture(scope="session")
def family_alphabet():
    return Alphabet(FAMILY_SYMBOLS)


@pytest.fixture(scope="session")
def family_train():
    fam_a, fam_b, fam_c = family_corpus(seed=11)
    return fam_a + fam_b + fam_c


@pytest.fixture(scope="session")
def family_test_sets():
    fam_a, fam_b, fam_c = family_corpus(seed=99, n_a=100, n_b=100, n_c=100)
    return {"digits": fam_a, "mixed": fam_b, "specials": fam_c}


@pytest.fixture(scope="session")
def family_mope(family_train, family_alphabet):
    return train_offline(family_train, family_alphabet,
                         cfg=NGramConfig(order=3, lam=0.01),
                         k=3, seed=0, beta=2.5)


@pytest.fixture
def toy_ab():
    return Alphabet("ab")


@pytest.fixture
def toy_fixed_mope(toy_ab):
    """Two identical fixed experts behind a symmetric gate: the mixture is
    exactly the fixed distribution P(a)=0.6, P(b)=0.3, P(END)=0.1."""
    expert = FixedExpert([0.6, 0.3, 0.1])
    return OfflineMope([expert, expert], uniform_gate(2), toy_ab)
