"""Static word-vector tables, contextual embedding stores, similarity matrices."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError, FormatError


@dataclass
class StaticEmbeddingTable:
    """Word -> vector lookup loaded from a text file in word2vec format."""

    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)
    duplicates: int = 0

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def get(self, word: str) -> np.ndarray | None:
        return self.vectors.get(word)

    def __len__(self) -> int:
        return len(self.vectors)


@dataclass
class ContextualEmbeddingStore:
    """(example id, side) -> token-level embedding matrix."""

    dim: int
    records: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)

    def get(self, example_id: str, side: str) -> np.ndarray | None:
        return self.records.get((example_id, side))


def load_static_table(path: str | Path) -> StaticEmbeddingTable:
    """Load "<count> <dim>" header plus one "<word> <v1> ... <vE>" row per line.

    Duplicate words keep the last row; the number of overwritten rows is
    reported on the returned table.
    """
    path = Path(path)
    try:
        handle = path.open(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read vector file {path}: {exc.strerror or exc}") from exc
    with handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise FormatError("header must be '<vocab_count> <dim>'", line=1)
        try:
            declared_count, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise FormatError("non-integer header field", line=1) from exc
        if dim < 1:
            raise FormatError("dimension must be positive", line=1)
        vectors: dict[str, np.ndarray] = {}
        duplicates = 0
        for line_no, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != dim + 1:
                raise FormatError(
                    f"expected {dim + 1} fields, got {len(fields)}", line=line_no
                )
            word = fields[0]
            try:
                vec = np.array([float(x) for x in fields[1:]], dtype=np.float64)
            except ValueError as exc:
                raise FormatError("non-numeric vector component", line=line_no) from exc
            if not np.all(np.isfinite(vec)):
                raise FormatError("non-finite vector component", line=line_no)
            if word in vectors:
                duplicates += 1
            vectors[word] = vec
    del declared_count  # header count is advisory; content wins
    return StaticEmbeddingTable(dim=dim, vectors=vectors, duplicates=duplicates)


def save_static_table(table: StaticEmbeddingTable, path: str | Path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        handle.write(f"{len(table.vectors)} {table.dim}\n")
        for word, vec in table.vectors.items():
            handle.write(word + " " + " ".join(repr(float(x)) for x in vec) + "\n")


def load_contextual_store(path: str | Path) -> ContextualEmbeddingStore:
    """Load JSONL records {"id", "side", "vectors"} keyed by (id, side)."""
    path = Path(path)
    records: dict[tuple[str, str], np.ndarray] = {}
    dim: int | None = None
    try:
        handle = path.open(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read embedding store {path}: {exc.strerror or exc}") from exc
    with handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON: {exc.msg}", line=line_no) from exc
            for key in ("id", "side", "vectors"):
                if key not in record:
                    raise FormatError(f"record is missing {key!r}", line=line_no)
            side = record["side"]
            if side not in ("text", "gloss"):
                raise FormatError(f"side must be 'text' or 'gloss', got {side!r}", line=line_no)
            matrix = np.array(record["vectors"], dtype=np.float64)
            if matrix.ndim != 2 or matrix.shape[0] < 1:
                raise FormatError("vectors must be a non-empty matrix", line=line_no)
            if not np.all(np.isfinite(matrix)):
                raise FormatError("non-finite embedding value", line=line_no)
            if dim is None:
                dim = matrix.shape[1]
            elif matrix.shape[1] != dim:
                raise FormatError(
                    f"inconsistent dimension {matrix.shape[1]}, expected {dim}", line=line_no
                )
            key = (str(record["id"]), side)
            if key in records:
                raise FormatError(f"duplicate record for {key}", line=line_no)
            records[key] = matrix
    return ContextualEmbeddingStore(dim=dim or 0, records=records)


def similarity_matrix(
    gloss_vectors: np.ndarray, text_vectors: np.ndarray, normalize: bool = True
) -> np.ndarray:
    """Pairwise dot products between gloss rows and text rows (G x W).

    With normalize set, rows are L2-normalized first so entries are cosines;
    zero-norm rows contribute zero similarity.
    """
    gloss_vectors = np.asarray(gloss_vectors, dtype=np.float64)
    text_vectors = np.asarray(text_vectors, dtype=np.float64)
    if gloss_vectors.ndim != 2 or text_vectors.ndim != 2:
        raise DomainError("similarity inputs must be 2-d matrices")
    if gloss_vectors.shape[1] != text_vectors.shape[1]:
        raise DomainError(
            f"dimension mismatch: {gloss_vectors.shape[1]} vs {text_vectors.shape[1]}"
        )
    if gloss_vectors.shape[0] < 1 or text_vectors.shape[0] < 1:
        raise DomainError("similarity inputs must have at least one row")
    if normalize:
        gloss_vectors = _l2_rows(gloss_vectors)
        text_vectors = _l2_rows(text_vectors)
    return gloss_vectors @ text_vectors.T


def _l2_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    safe = np.where(norms > 0.0, norms, 1.0)
    return matrix / safe
