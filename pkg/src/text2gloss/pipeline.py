"""Stage orchestration: each function runs one pipeline stage end to end.

Stages communicate only through artifact files under config.work_dir, so a
stage can run in a fresh process (or on a remote service) as long as it sees
the same directory. Every function returns a small JSON-friendly summary.

Artifact layout:
    corpus-<split>.jsonl            ingested (normalized, filtered) corpus
    alignments-<split>.jsonl        pseudo alignment dump
    select-model.json               lexical choice table
    classes.json                    word-class assignment
    preorder-model.json             reordering weights
    transition-model.json           class-bigram decoder counts
    translations-<split>-<mode>.jsonl
    report-<split>-<mode>.json
    latency-<split>.json
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import align as align_mod
from . import corpus as corpus_mod
from . import eval as eval_mod
from . import preorder as preorder_mod
from . import reorder as reorder_mod
from . import select as select_mod
from . import wordclass as wordclass_mod
from .config import PipelineConfig, ReorderMode, Split
from .errors import DataError, TrainingError


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise DataError(f"{path} not found; run `{hint}` first")
    return path


def _load_ingested(config: PipelineConfig, split: Split) -> corpus_mod.Corpus:
    path = _require(
        config.work_path(f"corpus-{split}.jsonl"), f"text2gloss ingest --split {split}"
    )
    return corpus_mod.load_corpus(path, "jsonl", split)


def ingest(config: PipelineConfig, split: Split) -> dict:
    """Normalize gloss variants, drop G > W examples, write the clean corpus."""
    raw_path = config.corpus_path(split)
    if raw_path is None:
        raise DataError(f"no corpus path configured for split {split!r}")
    corpus = corpus_mod.load_corpus(raw_path, config.corpus_format, split)
    normalized = corpus_mod.Corpus(
        split=split,
        examples=[
            dataclasses.replace(ex, gloss=corpus_mod.normalize_gloss(ex.gloss))
            for ex in corpus
        ],
    )
    kept, dropped = corpus_mod.filter_many_to_one(normalized)
    out = config.work_path(f"corpus-{split}.jsonl")
    out.parent.mkdir(parents=True, exist_ok=True)
    corpus_mod.save_corpus(kept, out)
    return {
        "split": split,
        "examples": len(kept),
        "dropped": len(dropped),
        "path": str(out),
    }


def align(config: PipelineConfig, split: Split) -> dict:
    """Pseudo word-gloss alignment for every ingested example."""
    corpus = _load_ingested(config, split)
    if config.static_vectors is None:
        raise DataError("static_vectors is not configured")
    if config.contextual_store is None:
        raise DataError("contextual_store is not configured")
    from .embeddings import load_contextual_store, load_static_table

    table = load_static_table(config.static_vectors)
    store = load_contextual_store(config.contextual_store)

    records = []
    for example in corpus:
        soft = align_mod.build_soft_alignment(
            example, table, store, config.alpha, config.threshold
        )
        one = align_mod.extract_one_to_one(soft)
        records.append(align_mod.align_example(example, one))
    out = config.work_path(f"alignments-{split}.jsonl")
    out.parent.mkdir(parents=True, exist_ok=True)
    align_mod.dump_alignments(records, out)
    return {"split": split, "examples": len(records), "path": str(out)}


def train_select(config: PipelineConfig) -> dict:
    corpus = _load_ingested(config, "train")
    records = align_mod.load_alignments(
        _require(
            config.work_path("alignments-train.jsonl"),
            "text2gloss align --split train",
        )
    )
    model = select_mod.train_lexical_model(
        corpus,
        {ex_id: rec.alignment for ex_id, rec in records.items()},
        config.smoothing_k,
    )
    out = config.work_path("select-model.json")
    select_mod.save_lexical_model(model, out)
    return {"entries": len(model.table), "path": str(out)}


def train_classes(config: PipelineConfig) -> dict:
    corpus = _load_ingested(config, "train")
    clustering = wordclass_mod.train_brown(
        corpus, config.brown_k, config.brown_min_count, config.brown_window
    )
    out = config.work_path("classes.json")
    wordclass_mod.save_clustering(clustering, out)
    return {
        "k": clustering.k,
        "words": len(clustering.assignment),
        "merges": len(clustering.merge_log),
        "path": str(out),
    }


def train_preorder(config: PipelineConfig) -> dict:
    """Fit both reordering models: the tree-based one and the decoder's
    class-bigram transition counts (they train on the same alignments)."""
    corpus = _load_ingested(config, "train")
    records = align_mod.load_alignments(
        _require(
            config.work_path("alignments-train.jsonl"),
            "text2gloss align --split train",
        )
    )
    clustering = wordclass_mod.load_clustering(
        _require(config.work_path("classes.json"), "text2gloss train-classes")
    )

    pairs = []
    sequences = []
    for example in corpus:
        record = records.get(example.id)
        if record is None:
            raise TrainingError(f"no alignment for example {example.id!r}")
        annotated = preorder_mod.annotate_classes(example.text, clustering)
        pairs.append((annotated, record.perm))
        sequences.append(record.sio)

    model = preorder_mod.train_preorder(
        pairs,
        iterations=config.preorder_iterations,
        beam=config.preorder_beam,
        seed=config.seed,
    )
    out = config.work_path("preorder-model.json")
    preorder_mod.save_preorder_model(model, out)

    scorer = reorder_mod.train_transition_model(
        sequences, clustering, config.smoothing_k
    )
    transition_out = config.work_path("transition-model.json")
    reorder_mod.save_transition_model(scorer, transition_out)
    return {
        "examples": len(pairs),
        "features": len(model.weights),
        "path": str(out),
        "transition_path": str(transition_out),
    }


class Translator:
    """All trained models loaded once, applied sentence by sentence."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.select_model = select_mod.load_lexical_model(
            _require(config.work_path("select-model.json"), "text2gloss train-select")
        )
        self.clustering = wordclass_mod.load_clustering(
            _require(config.work_path("classes.json"), "text2gloss train-classes")
        )
        self.preorder_model = preorder_mod.load_preorder_model(
            _require(config.work_path("preorder-model.json"), "text2gloss train-preorder")
        )
        self.transition = reorder_mod.load_transition_model(
            _require(
                config.work_path("transition-model.json"), "text2gloss train-preorder"
            ),
            self.clustering,
        )

    def select(self, sentence: corpus_mod.Sentence) -> align_mod.SpoGloss:
        return select_mod.gs_decode(self.select_model, sentence)

    def mapping(
        self, sentence: corpus_mod.Sentence, mode: ReorderMode
    ) -> reorder_mod.Mapping:
        if mode == "statistical":
            annotated = preorder_mod.annotate_classes(sentence, self.clustering)
            _, perm = preorder_mod.apply_preorder(self.preorder_model, annotated)
            return reorder_mod.Mapping(perm=perm)
        decoded = reorder_mod.constrained_decode(self.transition, sentence.surfaces)
        return reorder_mod.extract_mapping(sentence.surfaces, decoded)

    def translate(
        self, example: corpus_mod.ParallelExample, mode: ReorderMode
    ) -> reorder_mod.TranslationResult:
        spo = self.select(example.text)
        mapping = self.mapping(example.text, mode)
        gloss = reorder_mod.compose_translation(spo, mapping)
        return reorder_mod.TranslationResult(
            id=example.id,
            spo=spo.tokens,
            perm=mapping.perm,
            gloss=tuple(gloss),
        )


def _translate_corpus(
    translator: Translator,
    corpus: corpus_mod.Corpus,
    mode: ReorderMode,
    jobs: int,
) -> list[reorder_mod.TranslationResult]:
    if jobs <= 1:
        return [translator.translate(ex, mode) for ex in corpus]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda ex: translator.translate(ex, mode), corpus))


def translate(config: PipelineConfig, split: Split, mode: ReorderMode) -> dict:
    corpus = _load_ingested(config, split)
    translator = Translator(config)
    results = _translate_corpus(translator, corpus, mode, config.jobs)
    out = config.work_path(f"translations-{split}-{mode}.jsonl")
    out.parent.mkdir(parents=True, exist_ok=True)
    reorder_mod.dump_translations(results, out)
    return {
        "split": split,
        "reorder": mode,
        "examples": len(results),
        "path": str(out),
    }


def evaluate(config: PipelineConfig, split: Split, mode: ReorderMode) -> dict:
    corpus = _load_ingested(config, split)
    translator = Translator(config)
    results = _translate_corpus(translator, corpus, mode, config.jobs)
    hypotheses = [list(r.gloss) for r in results]
    references = [ex.gloss.surfaces for ex in corpus]
    report = eval_mod.evaluate_corpus(hypotheses, references)
    out = config.work_path(f"report-{split}-{mode}.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    eval_mod.save_report(report, out)
    return {
        "split": split,
        "reorder": mode,
        "report": report.to_json(),
        "path": str(out),
    }


def bench(config: PipelineConfig, split: Split, repeats: int = 3) -> dict:
    """Time the full statistical path against its isolated stages."""
    corpus = _load_ingested(config, split)
    translator = Translator(config)

    def full_statistical(c: corpus_mod.Corpus) -> None:
        for ex in c:
            translator.translate(ex, "statistical")

    def full_constrained(c: corpus_mod.Corpus) -> None:
        for ex in c:
            translator.translate(ex, "constrained")

    def select_only(c: corpus_mod.Corpus) -> None:
        for ex in c:
            translator.select(ex.text)

    def reorder_only(c: corpus_mod.Corpus) -> None:
        for ex in c:
            translator.mapping(ex.text, "statistical")

    def decode_only(c: corpus_mod.Corpus) -> None:
        for ex in c:
            translator.mapping(ex.text, "constrained")

    report = eval_mod.bench_latency(
        {
            "translate-statistical": full_statistical,
            "translate-constrained": full_constrained,
            "select": select_only,
            "reorder-statistical": reorder_only,
            "reorder-constrained": decode_only,
        },
        corpus,
        repeats=repeats,
        baseline="translate-statistical",
    )
    out = config.work_path(f"latency-{split}.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    eval_mod.save_report(report, out)
    return {
        "split": split,
        "baseline": report.baseline,
        "stages": report.to_json(),
        "path": str(out),
    }
