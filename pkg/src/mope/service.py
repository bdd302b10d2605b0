"""HTTP strength-meter service.

POST /v1/strength rates a password with the bundle's meter model (the
distilled student when present). The queried password is never logged or
persisted; request handling only reports level and latency.
"""

from __future__ import annotations

import logging
import os

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .bundle import load_bundle
from .errors import DataError
from .psm import StrengthMeter

logger = logging.getLogger("mope.service")

DEFAULT_PORT = 8342
DEFAULT_CORS_ORIGINS = (
    "http://localhost:5173",
    "http://127.0.0.1:5173",
    "http://localhost:8080",
    "http://127.0.0.1:8080",
)


class StrengthRequest(BaseModel):
    password: str


class StrengthResponse(BaseModel):
    log10_guess_number: float
    level: str
    latency_ms: float


class HealthResponse(BaseModel):
    status: str


def _cors_origins() -> list[str]:
    env = os.environ.get("MOPE_CORS_ORIGINS")
    if env:
        return [o.strip() for o in env.split(",") if o.strip()]
    return list(DEFAULT_CORS_ORIGINS)


def create_app(model_dir: str | None = None, pool_size: int = 10_000,
               seed: int = 0, meter: StrengthMeter | None = None) -> FastAPI:
    """Build the service app; the meter pool is sampled once at startup."""
    app = FastAPI(title="mope strength meter")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=_cors_origins(),
        allow_methods=["POST", "GET"],
        allow_headers=["*"],
    )
    if meter is None:
        model_dir = model_dir or os.environ.get("MOPE_MODEL_DIR")
        if model_dir:
            bundle = load_bundle(model_dir)
            meter = StrengthMeter(bundle.meter_model, pool_size=pool_size, seed=seed)
            logger.info("meter ready (variant=%s, pool=%d)",
                        bundle.variant, pool_size)
    app.state.meter = meter

    @app.get("/healthz", response_model=HealthResponse)
    def healthz():
        return HealthResponse(status="ok")

    @app.post("/v1/strength", response_model=StrengthResponse)
    def strength(req: StrengthRequest):
        if app.state.meter is None:
            return JSONResponse(status_code=503, content={"detail": "model not loaded"})
        try:
            verdict = app.state.meter.strength(req.password)
        except DataError as exc:
            # the reason never contains the password itself
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        logger.info("strength query served: level=%s latency_ms=%.3f",
                    verdict.level, verdict.latency_ms)
        return StrengthResponse(
            log10_guess_number=verdict.log10_guess_number,
            level=verdict.level,
            latency_ms=verdict.latency_ms,
        )

    return app


def serve(model_dir: str, port: int = DEFAULT_PORT, host: str = "127.0.0.1",
          pool_size: int = 10_000, seed: int = 0) -> None:
    import uvicorn

    app = create_app(model_dir=model_dir, pool_size=pool_size, seed=seed)
    uvicorn.run(app, host=host, port=port, log_level="info")
