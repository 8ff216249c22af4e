"""HTTP embedding service.

POST /embed with ``{"texts": [...]}`` returns ``{"dim": d, "vectors": [...]}``;
the vectors are identical to what export mode writes for the same input.
Malformed requests get a 400 with an error body. Requests are stateless; a
lock serializes model access so concurrent requests are safe.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .encoder import SentenceEncoder


class EmbedRequest(BaseModel):
    texts: list[str]


def build_app(encoder: SentenceEncoder) -> FastAPI:
    app = FastAPI(title="embed-exporter")
    lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.post("/embed")
    def embed(request: EmbedRequest):
        with lock:
            vectors, _truncated = encoder.encode(request.texts)
        return {"dim": encoder.dim, "vectors": vectors.tolist()}

    @app.get("/healthz")
    def healthz():
        return {"dim": encoder.dim, "max_tokens": encoder.max_tokens}

    return app


def serve(encoder: SentenceEncoder, host: str, port: int) -> None:
    import uvicorn

    uvicorn.run(build_app(encoder), host=host, port=port, log_level="info")
