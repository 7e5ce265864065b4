"""Acceptance check for the exporter: on a 20-sentence sample, every exported
record has exactly one row per corpus token, and each row equals the mean of
that word's sub-word vectors taken directly from the model (for a two-piece
word with piece vectors u and v, the exported row is (u+v)/2), to 1e-5."""

from __future__ import annotations

import json

import numpy as np
import torch

from embed_exporter import export_contextual
from tiny_backend import TWO_PIECE_WORDS


def test_exporter_contract(model_dir, corpus, tmp_path, backend):
    path, records = corpus
    assert len(records) == 20
    out = tmp_path / "acceptance.jsonl"
    export_contextual(path, model_dir, "text", out)

    store = {}
    with out.open(encoding="utf-8") as handle:
        for line in handle:
            row = json.loads(line)
            store[row["id"]] = np.array(row["vectors"])

    tokenizer, model = backend
    checked_two_piece = 0
    for record in records:
        tokens = record["text"]
        exported = store[record["id"]]
        assert exported.shape[0] == len(tokens), record["id"]

        encoding = tokenizer(tokens, is_split_into_words=True, return_tensors="pt")
        with torch.no_grad():
            hidden = model(**encoding).last_hidden_state[0].numpy()
        word_ids = encoding.word_ids(0)
        for index, token in enumerate(tokens):
            positions = [p for p, w in enumerate(word_ids) if w == index]
            direct = hidden[positions].mean(axis=0)
            assert np.allclose(exported[index], direct, atol=1e-5), (
                record["id"],
                token,
            )
            if token in TWO_PIECE_WORDS:
                assert len(positions) == 2
                u, v = hidden[positions[0]], hidden[positions[1]]
                assert np.allclose(exported[index], (u + v) / 2.0, atol=1e-5)
                checked_two_piece += 1
    # the corpus plants a multi-piece word in every sentence
    assert checked_two_piece >= 20
