"""FastAPI application wrapping the pipeline stages.

Error contract: bad input data maps to 400 with {"error": {"kind": "data"}},
internal invariant violations (bugs) to 500 with kind "invariant". The CLI
turns these into its exit codes 2 and 3.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__, pipeline
from ..errors import DataError, InvariantError
from . import schemas


def _error_response(status: int, kind: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status, content={"error": {"kind": kind, "message": message}}
    )


def create_app() -> FastAPI:
    app = FastAPI(title="text2gloss", version=__version__)

    @app.exception_handler(DataError)
    async def _data(request: Request, exc: DataError) -> JSONResponse:
        return _error_response(400, "data", str(exc))

    @app.exception_handler(InvariantError)
    async def _invariant(request: Request, exc: InvariantError) -> JSONResponse:
        return _error_response(500, "invariant", str(exc))

    @app.exception_handler(Exception)
    async def _unexpected(request: Request, exc: Exception) -> JSONResponse:
        return _error_response(500, "invariant", f"{type(exc).__name__}: {exc}")

    @app.get("/healthz", response_model=schemas.HealthResponse)
    async def healthz() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/ingest", response_model=schemas.IngestResponse)
    def ingest(req: schemas.SplitRequest) -> schemas.IngestResponse:
        return schemas.IngestResponse(**pipeline.ingest(req.config, req.split))

    @app.post("/align", response_model=schemas.AlignResponse)
    def align(req: schemas.SplitRequest) -> schemas.AlignResponse:
        return schemas.AlignResponse(**pipeline.align(req.config, req.split))

    @app.post("/train/select", response_model=schemas.TrainSelectResponse)
    def train_select(req: schemas.StageRequest) -> schemas.TrainSelectResponse:
        return schemas.TrainSelectResponse(**pipeline.train_select(req.config))

    @app.post("/train/classes", response_model=schemas.TrainClassesResponse)
    def train_classes(req: schemas.StageRequest) -> schemas.TrainClassesResponse:
        return schemas.TrainClassesResponse(**pipeline.train_classes(req.config))

    @app.post("/train/preorder", response_model=schemas.TrainPreorderResponse)
    def train_preorder(req: schemas.StageRequest) -> schemas.TrainPreorderResponse:
        return schemas.TrainPreorderResponse(**pipeline.train_preorder(req.config))

    @app.post("/translate", response_model=schemas.TranslateResponse)
    def translate(req: schemas.TranslateRequest) -> schemas.TranslateResponse:
        return schemas.TranslateResponse(
            **pipeline.translate(req.config, req.split, req.reorder)
        )

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate(req: schemas.TranslateRequest) -> schemas.EvaluateResponse:
        return schemas.EvaluateResponse(
            **pipeline.evaluate(req.config, req.split, req.reorder)
        )

    @app.post("/bench", response_model=schemas.BenchResponse)
    def bench(req: schemas.BenchRequest) -> schemas.BenchResponse:
        return schemas.BenchResponse(
            **pipeline.bench(req.config, req.split, req.repeats)
        )

    return app
