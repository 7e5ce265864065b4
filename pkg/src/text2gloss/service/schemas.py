"""Request/response models for the service endpoints.

Every request carries the full pipeline config, so the service holds no
state between calls; artifacts live wherever the config's work_dir points.
"""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..config import PipelineConfig, ReorderMode, Split


class StageRequest(BaseModel):
    config: PipelineConfig = Field(default_factory=PipelineConfig)


class SplitRequest(StageRequest):
    split: Split = "train"


class TranslateRequest(SplitRequest):
    reorder: ReorderMode = "statistical"


class BenchRequest(SplitRequest):
    repeats: int = Field(default=3, ge=3)


class IngestResponse(BaseModel):
    split: str
    examples: int
    dropped: int
    path: str


class AlignResponse(BaseModel):
    split: str
    examples: int
    path: str


class TrainSelectResponse(BaseModel):
    entries: int
    path: str


class TrainClassesResponse(BaseModel):
    k: int
    words: int
    merges: int
    path: str


class TrainPreorderResponse(BaseModel):
    examples: int
    features: int
    path: str
    transition_path: str


class TranslateResponse(BaseModel):
    split: str
    reorder: ReorderMode
    examples: int
    path: str


class ReportModel(BaseModel):
    bleu1: float
    bleu2: float
    bleu3: float
    bleu4: float
    rouge: float
    n_examples: int


class EvaluateResponse(BaseModel):
    split: str
    reorder: ReorderMode
    report: ReportModel
    path: str


class StageLatencyModel(BaseModel):
    ms: float
    speedup: float


class BenchResponse(BaseModel):
    split: str
    baseline: str
    stages: dict[str, StageLatencyModel]
    path: str


class HealthResponse(BaseModel):
    status: str
    version: str
