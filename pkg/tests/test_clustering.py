import numpy as np
import pytest

from mope.clustering import kmeans, select_k, silhouette
from mope.errors import DataError


def silhouette_oracle(x, labels):
    """Straight O(n^2) evaluation of the per-point silhouette definition."""
    n = len(x)
    d = np.sqrt(((x[:, None, :] - x[None, :, :]) ** 2).sum(-1))
    uniq = sorted(set(labels))
    scores = []
    for i in range(n):
        own = labels[i]
        same = [j for j in range(n) if labels[j] == own and j != i]
        if not same:
            scores.append(0.0)
            continue
        a = float(np.mean([d[i, j] for j in same]))
        b = min(
            float(np.mean([d[i, j] for j in range(n) if labels[j] == c]))
            for c in uniq if c != own
        )
        m = max(a, b)
        scores.append(0.0 if m == 0.0 else (b - a) / m)
    return float(np.mean(scores))


def test_kmeans_k_equals_n():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(8, 4))
    model = kmeans(x, 8, seed=0)
    assert model.objective_history[-1] == pytest.approx(0.0, abs=1e-12)
    assert len(set(map(tuple, model.centers))) == 8


def test_kmeans_recovers_two_blobs():
    rng = np.random.default_rng(2)
    a = rng.uniform(-0.1, 0.1, size=(40, 5))
    b = rng.uniform(-0.1, 0.1, size=(40, 5)) + 100.0
    x = np.vstack([a, b])
    model = kmeans(x, 2, seed=3)
    labels = model.labels
    assert len(set(labels[:40])) == 1 and len(set(labels[40:])) == 1
    assert labels[0] != labels[40]
    # assignment fixed point: every row sits with its nearest center
    d = ((x[:, None, :] - model.centers[None, :, :]) ** 2).sum(-1)
    assert np.array_equal(d.argmin(axis=1), labels)


def test_kmeans_objective_non_increasing():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(200, 6))
    model = kmeans(x, 5, seed=1)
    hist = model.objective_history
    assert all(hist[i + 1] <= hist[i] + 1e-9 for i in range(len(hist) - 1))


def test_kmeans_reseeds_empty_cluster():
    # this instance provably empties a cluster on the second assignment pass;
    # the re-seed policy must still deliver k populated clusters at a fixed point
    x = np.array([[0.7, 0.8], [-0.8, -0.1], [-0.9, -1.1], [-0.5, 0.6],
                  [-0.8, -0.2], [-1.4, -0.2], [-1.8, -0.0], [1.8, -0.1],
                  [-0.4, 1.0], [-0.6, 1.1], [0.1, -0.3], [1.1, -0.7],
                  [0.4, -0.6], [-0.8, 1.4]])
    model = kmeans(x, 5, seed=0)
    assert set(model.labels) == set(range(5))
    d = ((x[:, None, :] - model.centers[None, :, :]) ** 2).sum(-1)
    assert np.array_equal(d.argmin(axis=1), model.labels)


def test_kmeans_no_empty_clusters_fuzz():
    rng = np.random.default_rng(5)
    for seed in range(8):
        x = np.vstack([rng.normal(size=(30, 3)), rng.normal(size=(3, 3)) + 50])
        model = kmeans(x, 6, seed=seed)
        assert set(model.labels) == set(range(6))


def test_kmeans_deterministic():
    rng = np.random.default_rng(6)
    x = rng.normal(size=(60, 4))
    a = kmeans(x, 4, seed=9)
    b = kmeans(x, 4, seed=9)
    assert np.array_equal(a.centers, b.centers)
    assert np.array_equal(a.labels, b.labels)


def test_kmeans_errors():
    x = np.zeros((5, 2))
    x[:3] = np.arange(3)[:, None]
    with pytest.raises(DataError):
        kmeans(x, 1, seed=0)
    with pytest.raises(DataError):
        kmeans(x, 4, seed=0)  # only 3 distinct rows


FOUR_POINTS = np.array([[0.0, 0.0], [0.0, 1.0], [10.0, 10.0], [10.0, 11.0]])
FOUR_LABELS = np.array([0, 0, 1, 1])


def test_silhouette_four_point_instance():
    score = silhouette(FOUR_POINTS, FOUR_LABELS)
    assert score == pytest.approx(silhouette_oracle(FOUR_POINTS, FOUR_LABELS), abs=1e-12)
    assert score == pytest.approx(0.9292895427118657, abs=1e-9)


def test_silhouette_singletons_score_zero():
    pts = np.array([[0.0, 0.0], [5.0, 5.0]])
    assert silhouette(pts, [0, 1]) == 0.0


def test_silhouette_coincident_points():
    pts = np.zeros((6, 3))
    assert silhouette(pts, [0, 0, 0, 1, 1, 1]) == 0.0


def test_silhouette_matches_oracle_random():
    rng = np.random.default_rng(7)
    for _ in range(10):
        n = int(rng.integers(10, 80))
        k = int(rng.integers(2, 5))
        x = rng.normal(size=(n, 4))
        labels = rng.integers(0, k, size=n)
        while len(set(labels)) < 2:
            labels = rng.integers(0, k, size=n)
        assert silhouette(x, labels) == pytest.approx(
            silhouette_oracle(x, labels.tolist()), abs=1e-9)


def test_silhouette_sampled_close_and_deterministic():
    rng = np.random.default_rng(8)
    x = np.vstack([rng.normal(size=(300, 3)), rng.normal(size=(300, 3)) + 8])
    labels = np.array([0] * 300 + [1] * 300)
    full = silhouette(x, labels)
    s1 = silhouette(x, labels, sample_cap=150, seed=2)
    s2 = silhouette(x, labels, sample_cap=150, seed=2)
    assert s1 == s2
    assert s1 == pytest.approx(full, abs=0.05)


def test_silhouette_single_cluster_error():
    with pytest.raises(DataError):
        silhouette(np.zeros((4, 2)), [0, 0, 0, 0])


TABLE_SCORES = {30: 0.6046, 35: 0.6672, 40: 0.6777, 45: 0.6837, 50: 0.7072,
                55: 0.7083, 60: 0.7168, 65: 0.7362, 70: 0.7783}


def test_select_k_injected_score_sequence():
    report = select_k(None, (30, 70), tau=0.7, seed=0, step=5,
                      score_fn=lambda k: TABLE_SCORES[k])
    assert report.k_star == 50
    assert report.threshold_met
    # early stop: larger ks are never evaluated
    assert list(report.scores) == [30, 35, 40, 45, 50]


def test_select_k_min_k_contract():
    report = select_k(None, (30, 70), tau=0.7, seed=0, step=5,
                      score_fn=lambda k: TABLE_SCORES[k])
    ks = [k for k, s in TABLE_SCORES.items() if s > 0.7]
    assert report.k_star == min(ks)


def test_select_k_threshold_unmet_falls_back_to_argmax():
    report = select_k(None, (30, 70), tau=0.9, seed=0, step=5,
                      score_fn=lambda k: TABLE_SCORES[k])
    assert not report.threshold_met
    assert report.k_star == 70  # argmax of the full grid


def test_select_k_invalid_range():
    with pytest.raises(DataError):
        select_k(np.zeros((4, 2)), (1, 5), tau=0.5, seed=0)
    with pytest.raises(DataError):
        select_k(np.zeros((4, 2)), (5, 3), tau=0.5, seed=0)
