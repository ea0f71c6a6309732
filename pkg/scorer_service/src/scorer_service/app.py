"""HTTP layer: POST /score and GET /health.

The wire protocol is fixed by the retrieval engine's remote scorer client:
request ``{"model": "sts"|"is", "pairs": [[query, passage], ...]}``,
response ``{"scores": [...]}`` in request order with scores in [0, 1].
503 with Retry-After signals checkpoints still loading; malformed bodies
are 400. Every scoring response carries the serving checkpoint id in the
``X-Checkpoint`` header.
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from typing import Literal

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .config import ServiceConfig
from .models import ModelRegistry

CHECKPOINT_HEADER = "X-Checkpoint"


class ScoreRequest(BaseModel):
    model: Literal["sts", "is"]
    pairs: list[tuple[str, str]] = Field(min_length=1)


class ScoreResponse(BaseModel):
    scores: list[float]


def create_app(config: ServiceConfig | None = None,
               registry: ModelRegistry | None = None) -> FastAPI:
    """App factory. Tests inject a registry with stub backends; production
    use loads the configured checkpoints in the background at startup."""
    config = config or ServiceConfig.from_env()
    registry = registry or ModelRegistry(config)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        registry.start_loading()
        yield

    app = FastAPI(title="scorer-service", lifespan=lifespan)
    app.state.registry = registry

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/health")
    def health():
        if registry.error:
            return {"status": "error", "models": registry.checkpoint_ids(),
                    "error": registry.error}
        status = "ready" if registry.ready else "loading"
        return {"status": status, "models": registry.checkpoint_ids()}

    @app.post("/score", response_model=ScoreResponse)
    def score(request: ScoreRequest, response: Response):
        backend = registry.get(request.model)
        if backend is None:
            detail = registry.error or "model loading"
            return JSONResponse(status_code=503, content={"detail": detail},
                                headers={"Retry-After": "1"})
        scores = registry.score(request.model, request.pairs)
        response.headers[CHECKPOINT_HEADER] = backend.checkpoint_id
        return ScoreResponse(scores=scores)

    return app
