"""Gloss selection: per-position prediction of a gloss or pad, no autoregression.

The scorer interface mirrors the I/O contract of a sequence model that reads
the whole sentence and emits one distribution per position; the default
implementation is a smoothed count table over aligned training data, so a
learned scorer can be dropped in without touching the decoder.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

from .align import OneToOneAlignment, SpoGloss, make_spo
from .corpus import PAD, Corpus, Sentence
from .errors import DataError, DomainError, FormatError, TrainingError


class SelectionScorer(Protocol):
    def score(self, sentence: Sentence, position: int) -> dict[str, float]:
        """Distribution over gloss vocabulary plus the pad token (sums to 1)."""
        ...


@dataclass
class LexicalChoiceModel:
    """Add-k smoothed word -> gloss-or-pad counts."""

    table: dict[str, Counter] = field(default_factory=dict)
    k: float = 0.0

    def __post_init__(self):
        if self.k < 0:
            raise DomainError("smoothing k must be non-negative")

    def support(self, word: str) -> set[str]:
        # the pad is always a candidate, even for words never seen with one
        return set(self.table.get(word, ())) | {PAD}

    def score(self, sentence: Sentence, position: int) -> dict[str, float]:
        word = sentence[position].surface
        counts = self.table.get(word)
        if counts is None:
            return {PAD: 1.0}
        support = self.support(word)
        total = sum(counts.values()) + self.k * len(support)
        if total == 0.0:
            return {label: 1.0 / len(support) for label in sorted(support)}
        return {label: (counts.get(label, 0) + self.k) / total for label in sorted(support)}


def train_lexical_model(
    corpus: Corpus, alignments: dict[str, OneToOneAlignment], k: float = 0.0
) -> LexicalChoiceModel:
    """Count word -> spoken-order-gloss co-occurrences over aligned examples."""
    model = LexicalChoiceModel(k=k)
    for example in corpus:
        alignment = alignments.get(example.id)
        if alignment is None:
            raise TrainingError(f"no alignment for example {example.id!r}")
        spo = make_spo(example, alignment)
        for word_token, label in zip(example.text, spo.tokens):
            model.table.setdefault(word_token.surface, Counter())[label] += 1
    return model


def gs_decode(scorer: SelectionScorer, sentence: Sentence) -> SpoGloss:
    """Independent argmax per position; ties prefer the alphabetically first
    gloss, with the pad losing all ties.

    The output has exactly one token per input position, so it is already a
    spoken-order gloss sequence.
    """
    out = []
    for position in range(len(sentence)):
        distribution = scorer.score(sentence, position)
        if not distribution:
            out.append(PAD)
            continue
        best = min(distribution.items(), key=lambda kv: (-kv[1], kv[0] == PAD, kv[0]))
        out.append(best[0])
    return SpoGloss(tokens=tuple(out))


def save_lexical_model(model: LexicalChoiceModel, path: str | Path) -> None:
    payload = {
        "k": model.k,
        "table": {word: dict(sorted(counts.items())) for word, counts in sorted(model.table.items())},
    }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, sort_keys=True), encoding="utf-8")


def load_lexical_model(path: str | Path) -> LexicalChoiceModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read selection model {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid selection model file: {exc.msg}") from exc
    if "k" not in payload or "table" not in payload:
        raise FormatError("selection model file needs 'k' and 'table'")
    table = {word: Counter(counts) for word, counts in payload["table"].items()}
    return LexicalChoiceModel(table=table, k=float(payload["k"]))
