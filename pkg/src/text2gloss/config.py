"""Pipeline configuration: one pydantic model shared by CLI and service.

A config is a plain JSON object; the CLI loads it from a file and lets
individual flags override keys before validation. Every stage receives the
whole validated config, so artifacts land in predictable places under
work_dir and reruns with identical config, inputs and seed are byte-identical.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field

Split = Literal["train", "dev", "test"]
ReorderMode = Literal["statistical", "constrained"]


class NeuralDefaults(BaseModel):
    """Hyperparameters reserved for transformer-based selection/reordering.

    The statistical pipeline never reads these; they are carried in the
    config so a neural drop-in replacement starts from the same settings.
    """

    dropout_selection: float = Field(default=0.35, ge=0.0, lt=1.0)
    dropout_reordering: float = Field(default=0.2, ge=0.0, lt=1.0)
    learning_rate: float = Field(default=1e-4, gt=0.0)
    lr_decrease_factor: float = Field(default=0.7, gt=0.0, le=1.0)
    patience: int = Field(default=5, ge=1)


class PipelineConfig(BaseModel):
    # corpus inputs
    train_corpus: str | None = None
    dev_corpus: str | None = None
    test_corpus: str | None = None
    corpus_format: Literal["jsonl", "tsv"] = "jsonl"

    # embedding inputs
    static_vectors: str | None = None
    contextual_store: str | None = None

    # artifact output directory
    work_dir: str = "work"

    # alignment: scale on thresholded static similarity, and the threshold
    alpha: float = Field(default=0.9, gt=0.0, le=1.0)
    threshold: float = Field(default=0.9, gt=0.0, le=1.0)

    # word classes
    brown_k: int = Field(default=50, ge=2)
    brown_min_count: int = Field(default=2, ge=1)
    brown_window: int | None = Field(default=None, ge=2)

    # pre-ordering
    preorder_iterations: int = Field(default=30, ge=0)
    preorder_beam: int = Field(default=20, ge=1)

    # add-k smoothing shared by the lexical and transition models
    smoothing_k: float = Field(default=1.0, gt=0.0)

    seed: int = 0
    jobs: int = Field(default=1, ge=1)

    neural: NeuralDefaults = Field(default_factory=NeuralDefaults)

    def corpus_path(self, split: Split) -> str | None:
        return {
            "train": self.train_corpus,
            "dev": self.dev_corpus,
            "test": self.test_corpus,
        }[split]

    def work_path(self, name: str) -> Path:
        return Path(self.work_dir) / name


def load_config(path: str | Path) -> PipelineConfig:
    import json

    from .errors import DataError, FormatError

    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"config file is not valid JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise FormatError("config file must hold a JSON object")
    return PipelineConfig.model_validate(raw)
