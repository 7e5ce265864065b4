"""Static word vectors from a transformer's input embedding matrix.

A word's vector is the mean of its sub-word embedding rows, so single-piece
words come out as their embedding row verbatim. Words whose tokenization
falls back to the unknown piece have no sub-word composition and are omitted
from the file; the summary counts them.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .backend import check_pooling, load_backend
from .formats import read_corpus, write_static_vectors


@dataclass(frozen=True)
class StaticExportSummary:
    written: int
    omitted: int
    dim: int
    path: str


def collect_vocabulary(records: Sequence[dict], side: str) -> list[str]:
    """Sorted unique tokens of one corpus side."""
    return sorted({token for record in records for token in record[side]})


def vocabulary_from_corpus(corpus_path: str | Path, side: str) -> list[str]:
    return collect_vocabulary(read_corpus(corpus_path), side)


def subword_vector(tokenizer, matrix: np.ndarray, word: str) -> np.ndarray | None:
    ids = tokenizer(word, add_special_tokens=False)["input_ids"]
    if not ids:
        return None
    unk = tokenizer.unk_token_id
    if unk is not None and unk in ids:
        return None
    return matrix[ids].mean(axis=0)


def export_static(
    vocab: Sequence[str],
    model_id: str,
    out_path: str | Path,
    pooling: str = "mean",
) -> StaticExportSummary:
    check_pooling(pooling)
    tokenizer, model = load_backend(model_id)
    matrix = model.get_input_embeddings().weight.detach().cpu().numpy()

    rows: list[tuple[str, np.ndarray]] = []
    seen: set[str] = set()
    omitted = 0
    for word in vocab:
        if word in seen:
            continue
        seen.add(word)
        vector = subword_vector(tokenizer, matrix, word)
        if vector is None:
            omitted += 1
        else:
            rows.append((word, vector))
    write_static_vectors(out_path, rows, matrix.shape[1])
    return StaticExportSummary(
        written=len(rows), omitted=omitted, dim=matrix.shape[1], path=str(out_path)
    )
