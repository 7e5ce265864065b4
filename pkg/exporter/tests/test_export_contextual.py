"""Contextual export: row counts, pooling correctness, layer selection, and
the misalignment error paths."""

from __future__ import annotations

import json

import numpy as np
import pytest
import torch

from embed_exporter import AlignmentError, CorpusError, ModelError, export_contextual
from embed_exporter.cli import run_command


def read_store(path):
    records = {}
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            row = json.loads(line)
            records[(row["id"], row["side"])] = np.array(row["vectors"])
    return records


def direct_word_vectors(backend, tokens, layer=-1):
    """Reference computation straight from the model, no exporter code."""
    tokenizer, model = backend
    encoding = tokenizer(tokens, is_split_into_words=True, return_tensors="pt")
    with torch.no_grad():
        hidden = model(**encoding, output_hidden_states=True).hidden_states[layer][0]
    hidden = hidden.numpy()
    out = []
    for index in range(len(tokens)):
        positions = [
            p for p, w in enumerate(encoding.word_ids(0)) if w == index
        ]
        out.append(hidden[positions].mean(axis=0))
    return np.stack(out)


def test_row_counts_match_tokens(model_dir, corpus, tmp_path):
    path, records = corpus
    out = tmp_path / "ctx.jsonl"
    summary = export_contextual(path, model_dir, "text", out)
    store = read_store(out)
    assert summary.records == len(records)
    assert summary.dim == 32
    for record in records:
        matrix = store[(record["id"], "text")]
        assert matrix.shape == (len(record["text"]), 32), record["id"]
    assert summary.rows == sum(len(r["text"]) for r in records)


def test_gloss_side(model_dir, corpus, tmp_path):
    path, records = corpus
    out = tmp_path / "gloss.jsonl"
    export_contextual(path, model_dir, "gloss", out)
    store = read_store(out)
    for record in records:
        assert store[(record["id"], "gloss")].shape[0] == len(record["gloss"])


def test_pooled_vectors_match_direct_outputs(model_dir, corpus, tmp_path, backend):
    path, records = corpus
    out = tmp_path / "ctx.jsonl"
    export_contextual(path, model_dir, "text", out)
    store = read_store(out)
    for record in records[:5]:
        expected = direct_word_vectors(backend, record["text"])
        assert np.allclose(store[(record["id"], "text")], expected, atol=1e-5)


def test_layer_zero_differs_from_final(model_dir, corpus, tmp_path):
    path, _ = corpus
    first = tmp_path / "embeddings.jsonl"
    last = tmp_path / "final.jsonl"
    export_contextual(path, model_dir, "text", first, layer=0)
    export_contextual(path, model_dir, "text", last, layer=-1)
    a = read_store(first)
    b = read_store(last)
    key = next(iter(a))
    assert not np.allclose(a[key], b[key])


def test_explicit_final_layer_index_matches_default(model_dir, corpus, tmp_path):
    path, _ = corpus
    default = tmp_path / "default.jsonl"
    explicit = tmp_path / "explicit.jsonl"
    export_contextual(path, model_dir, "text", default)
    # the tiny model has hidden_states 0..2, so 2 is the final layer
    export_contextual(path, model_dir, "text", explicit, layer=2)
    assert default.read_bytes() == explicit.read_bytes()


@pytest.mark.parametrize("layer", [99, -99])
def test_layer_out_of_range(model_dir, corpus, tmp_path, layer):
    path, _ = corpus
    with pytest.raises(ModelError, match="out of range"):
        export_contextual(path, model_dir, "text", tmp_path / "x.jsonl", layer=layer)


def test_vanishing_token_is_alignment_error(model_dir, tmp_path):
    corpus = tmp_path / "bad.jsonl"
    corpus.write_text(
        json.dumps({"id": "weird", "text": ["what", "\x01", "is"], "gloss": ["WHAT"]})
        + "\n",
        encoding="utf-8",
    )
    with pytest.raises(AlignmentError, match="weird") as info:
        export_contextual(corpus, model_dir, "text", tmp_path / "x.jsonl")
    assert info.value.example_id == "weird"


def test_empty_side_is_corpus_error(model_dir, tmp_path):
    corpus = tmp_path / "empty-gloss.jsonl"
    corpus.write_text(
        json.dumps({"id": "g0", "text": ["what"], "gloss": []}) + "\n",
        encoding="utf-8",
    )
    with pytest.raises(CorpusError, match="g0"):
        export_contextual(corpus, model_dir, "gloss", tmp_path / "x.jsonl")


def test_overlong_sentence_is_alignment_error(model_dir, tmp_path):
    corpus = tmp_path / "long.jsonl"
    corpus.write_text(
        json.dumps({"id": "long0", "text": ["cat"] * 60, "gloss": ["CAT"]}) + "\n",
        encoding="utf-8",
    )
    with pytest.raises(AlignmentError, match="long0"):
        export_contextual(corpus, model_dir, "text", tmp_path / "x.jsonl")


def test_malformed_corpus_line_is_corpus_error(model_dir, tmp_path):
    corpus = tmp_path / "broken.jsonl"
    corpus.write_text('{"id": "a", "text": ["what"]}\n{nope\n', encoding="utf-8")
    with pytest.raises(CorpusError, match=":2"):
        export_contextual(corpus, model_dir, "text", tmp_path / "x.jsonl")


def test_rerun_is_byte_identical(model_dir, corpus, tmp_path):
    path, _ = corpus
    first = tmp_path / "a.jsonl"
    second = tmp_path / "b.jsonl"
    export_contextual(path, model_dir, "text", first)
    export_contextual(path, model_dir, "text", second)
    assert first.read_bytes() == second.read_bytes()


def test_cli_export_contextual(model_dir, corpus, tmp_path, capsys):
    path, records = corpus
    out = tmp_path / "cli.jsonl"
    rc = run_command(
        [
            "export-contextual",
            "--corpus",
            str(path),
            "--model",
            model_dir,
            "--side",
            "text",
            "--out",
            str(out),
            "--layer",
            "-1",
        ]
    )
    assert rc == 0
    assert f"wrote {len(records)} records" in capsys.readouterr().out
    assert len(read_store(out)) == len(records)
