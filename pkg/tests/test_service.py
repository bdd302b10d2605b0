import logging

import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import FixedExpert, uniform_gate
from mope import Alphabet
from mope.offline import OfflineMope
from mope.psm import StrengthMeter
from mope.service import create_app


@pytest.fixture(scope="module")
def meter():
    ab = Alphabet("ab")
    model = OfflineMope([FixedExpert([0.6, 0.3, 0.1])] * 2, uniform_gate(2), ab)
    return StrengthMeter(model, pool_size=2000, seed=0)


@pytest.fixture(scope="module")
def client(meter):
    return TestClient(create_app(meter=meter))


def test_healthz(client):
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.json() == {"status": "ok"}


def test_strength_happy_path(client):
    r = client.post("/v1/strength", json={"password": "abba"})
    assert r.status_code == 200
    body = r.json()
    assert set(body) == {"log10_guess_number", "level", "latency_ms"}
    assert body["level"] in ("weak", "medium", "strong")
    assert body["latency_ms"] >= 0.0


def test_strength_deterministic(client):
    a = client.post("/v1/strength", json={"password": "abba"}).json()
    b = client.post("/v1/strength", json={"password": "abba"}).json()
    assert a["log10_guess_number"] == b["log10_guess_number"]
    assert a["level"] == b["level"]


def test_invalid_inputs_400(client):
    assert client.post("/v1/strength", json={"password": ""}).status_code == 400
    assert client.post("/v1/strength", json={"password": "a" * 30}).status_code == 400
    assert client.post("/v1/strength", json={"password": "xyz"}).status_code == 400


def test_malformed_body_422(client):
    assert client.post("/v1/strength", json={}).status_code == 422


def test_model_not_loaded_503(monkeypatch):
    monkeypatch.delenv("MOPE_MODEL_DIR", raising=False)
    app = create_app()
    r = TestClient(app).post("/v1/strength", json={"password": "ab"})
    assert r.status_code == 503


def test_cors_allows_configured_origin(meter, monkeypatch):
    monkeypatch.setenv("MOPE_CORS_ORIGINS", "http://meter.example")
    app = create_app(meter=meter)
    r = TestClient(app).post("/v1/strength", json={"password": "ab"},
                             headers={"Origin": "http://meter.example"})
    assert r.headers.get("access-control-allow-origin") == "http://meter.example"


def test_password_never_logged(client, caplog):
    secret = "baab"
    with caplog.at_level(logging.DEBUG):
        r = client.post("/v1/strength", json={"password": secret})
    assert r.status_code == 200
    assert all(secret not in rec.getMessage() for rec in caplog.records)


def test_loads_bundle_from_env(tmp_path, monkeypatch):
    from mope import NGramConfig
    from mope.bundle import save_bundle
    from mope.offline import train_offline

    ab = Alphabet("ab12")
    rng = np.random.default_rng(0)
    corpus = ["".join(rng.choice(list("ab12"), size=4)) for _ in range(120)]
    res = train_offline(corpus, ab, cfg=NGramConfig(order=2, lam=0.01), k=2, seed=0)
    save_bundle(tmp_path / "m", res.model, res.base)
    monkeypatch.setenv("MOPE_MODEL_DIR", str(tmp_path / "m"))
    app = create_app(pool_size=500)
    r = TestClient(app).post("/v1/strength", json={"password": "a1b2"})
    assert r.status_code == 200
