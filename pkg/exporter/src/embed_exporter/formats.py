"""Reading the corpus and writing the two embedding file formats.

The output formats are exactly what the text2gloss toolkit consumes:

static vector file (text)
    line 1: "<count> <dim>"
    then one "<word> <v1> ... <v_dim>" row per word, floats with six decimals

contextual store (JSONL)
    one record per (example, side): {"id": ..., "side": "text"|"gloss",
    "vectors": [[...], ...]} with exactly one vector per corpus token

The corpus itself is JSONL with "id", "text" and (optionally) "gloss" token
lists per line, matching the toolkit's corpus format.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CorpusError

SIDES = ("text", "gloss")


def read_corpus(path: str | Path) -> list[dict]:
    path = Path(path)
    try:
        handle = path.open(encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc.strerror or exc}") from exc
    records = []
    with handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{line_no}: invalid JSON: {exc.msg}") from exc
            if not isinstance(record, dict):
                raise CorpusError(f"{path}:{line_no}: record is not an object")
            if not isinstance(record.get("id"), str) or not record["id"]:
                raise CorpusError(f"{path}:{line_no}: missing or empty 'id'")
            for side in SIDES:
                tokens = record.get(side, [] if side == "gloss" else None)
                if tokens is None:
                    raise CorpusError(f"{path}:{line_no}: missing 'text' token list")
                if not isinstance(tokens, list) or not all(
                    isinstance(t, str) and t for t in tokens
                ):
                    raise CorpusError(
                        f"{path}:{line_no}: '{side}' must be a list of non-empty strings"
                    )
                record[side] = tokens
            records.append(record)
    return records


def write_static_vectors(
    path: str | Path, rows: Sequence[tuple[str, np.ndarray]], dim: int
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as handle:
        handle.write(f"{len(rows)} {dim}\n")
        for word, vector in rows:
            values = " ".join(f"{v:.6f}" for v in np.asarray(vector, dtype=np.float64))
            handle.write(f"{word} {values}\n")


def write_contextual_store(
    path: str | Path, records: Iterable[tuple[str, str, np.ndarray]]
) -> int:
    """Write (id, side, matrix) triples as JSONL; returns the record count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8") as handle:
        for example_id, side, matrix in records:
            row = {
                "id": example_id,
                "side": side,
                "vectors": [[float(v) for v in vector] for vector in matrix],
            }
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")
            count += 1
    return count
