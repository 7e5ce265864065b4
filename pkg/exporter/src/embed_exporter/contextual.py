"""Word-level contextual embeddings.

Each corpus token usually becomes several sub-word pieces inside the model.
The export groups the chosen layer's piece vectors back onto their word via
the tokenizer's word-index map and mean-pools each group, so the output has
exactly one vector per corpus token, in corpus order. A token whose pieces
cannot be recovered (for example one the normalizer deletes entirely) is a
hard error naming the example, never a silently shorter record.

Layer indexing follows the hidden-states convention: 0 is the embedding
output, each following index one encoder layer, -1 the final layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .backend import check_pooling, load_backend
from .errors import AlignmentError, CorpusError, ModelError
from .formats import read_corpus, write_contextual_store


@dataclass(frozen=True)
class ContextualExportSummary:
    records: int
    rows: int
    dim: int
    path: str


def pool_word_vectors(
    hidden: np.ndarray,
    word_ids: list[int | None],
    n_tokens: int,
    example_id: str,
) -> np.ndarray:
    """Mean of each word's piece vectors; one output row per corpus token."""
    groups: dict[int, list[int]] = {}
    for position, word_index in enumerate(word_ids):
        if word_index is not None:
            groups.setdefault(word_index, []).append(position)
    if set(groups) - set(range(n_tokens)):
        raise AlignmentError(
            f"example {example_id!r}: tokenizer produced pieces beyond the "
            f"{n_tokens} corpus tokens",
            example_id,
        )
    rows = []
    for index in range(n_tokens):
        positions = groups.get(index)
        if not positions:
            raise AlignmentError(
                f"example {example_id!r}: token {index} produced no sub-word "
                "pieces; cannot pool a vector for it",
                example_id,
            )
        rows.append(hidden[positions].mean(axis=0))
    return np.stack(rows)


def export_contextual(
    corpus_path: str | Path,
    model_id: str,
    side: str,
    out_path: str | Path,
    layer: int = -1,
    pooling: str = "mean",
) -> ContextualExportSummary:
    import torch

    check_pooling(pooling)
    records = read_corpus(corpus_path)
    tokenizer, model = load_backend(model_id)
    limit = getattr(model.config, "max_position_embeddings", None)

    exported = []
    rows = 0
    dim = 0
    with torch.no_grad():
        for record in records:
            tokens = record[side]
            if not tokens:
                raise CorpusError(f"example {record['id']!r} has no {side} tokens")
            encoding = tokenizer(tokens, is_split_into_words=True, return_tensors="pt")
            length = encoding["input_ids"].shape[1]
            if limit is not None and length > limit:
                raise AlignmentError(
                    f"example {record['id']!r}: {length} sub-word pieces exceed "
                    f"the model's length limit of {limit}",
                    record["id"],
                )
            output = model(**encoding, output_hidden_states=True)
            states = output.hidden_states
            if not -len(states) <= layer < len(states):
                raise ModelError(
                    f"layer {layer} out of range; model exposes indices "
                    f"{-len(states)}..{len(states) - 1}"
                )
            hidden = states[layer][0].cpu().numpy()
            matrix = pool_word_vectors(
                hidden, encoding.word_ids(0), len(tokens), record["id"]
            )
            exported.append((record["id"], side, matrix))
            rows += matrix.shape[0]
            dim = matrix.shape[1]

    count = write_contextual_store(out_path, exported)
    return ContextualExportSummary(records=count, rows=rows, dim=dim, path=str(out_path))
