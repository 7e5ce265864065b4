"""Parallel text-gloss corpora: loading, normalization, filtering, statistics."""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

from .errors import DataError, DomainError, ParseError, SchemaError

PAD = "*"

# Trailing variant designator: digits plus an optional letter suffix, attached
# to a purely alphabetic base ("HAUS1A" -> "HAUS"). Unicode letters only, so
# umlauted glosses strip cleanly and "NUM-12" stays untouched.
_VARIANT = re.compile(r"^([^\W\d_]+)(\d+)([^\W\d_]*)$")


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str | None = None
    pos: str | None = None
    word_class: int | None = None

    def __post_init__(self):
        if not self.surface:
            raise DomainError("token surface must be non-empty")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __post_init__(self):
        if len(self.tokens) < 1:
            raise DomainError("sentence must contain at least one token")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @classmethod
    def from_surfaces(cls, surfaces: Iterable[str], pos: Iterable[str] | None = None) -> "Sentence":
        surfaces = list(surfaces)
        if pos is None:
            return cls(tuple(Token(s) for s in surfaces))
        return cls(tuple(Token(s, pos=p) for s, p in zip(surfaces, pos)))


@dataclass(frozen=True)
class ParallelExample:
    id: str
    text: Sentence
    gloss: Sentence

    @property
    def w(self) -> int:
        return len(self.text)

    @property
    def g(self) -> int:
        return len(self.gloss)


@dataclass
class Corpus:
    split: str
    examples: list[ParallelExample] = field(default_factory=list)

    def __post_init__(self):
        ids = [e.id for e in self.examples]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise SchemaError(f"duplicate example id {dup!r} in split {self.split!r}")

    def __len__(self) -> int:
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    @property
    def text_vocab(self) -> Counter:
        counts: Counter = Counter()
        for ex in self.examples:
            counts.update(ex.text.surfaces)
        return counts

    @property
    def gloss_vocab(self) -> Counter:
        counts: Counter = Counter()
        for ex in self.examples:
            counts.update(ex.gloss.surfaces)
        return counts


def _example_from_record(record: dict, line_no: int) -> ParallelExample:
    for key in ("id", "text", "gloss"):
        if key not in record:
            raise SchemaError(f"line {line_no}: record is missing {key!r}")
    text_surfaces = record["text"]
    gloss_surfaces = record["gloss"]
    if not isinstance(text_surfaces, list) or not isinstance(gloss_surfaces, list):
        raise SchemaError(f"line {line_no}: text and gloss must be token lists")
    pos = record.get("pos")
    if pos is not None and len(pos) != len(text_surfaces):
        raise SchemaError(
            f"line {line_no}: pos list has length {len(pos)}, expected {len(text_surfaces)}"
        )
    try:
        return ParallelExample(
            id=str(record["id"]),
            text=Sentence.from_surfaces(text_surfaces, pos),
            gloss=Sentence.from_surfaces(gloss_surfaces),
        )
    except DomainError as exc:
        raise SchemaError(f"line {line_no}: {exc}") from exc


def load_corpus(path: str | Path, format: str = "jsonl", split: str = "train") -> Corpus:
    """Read a parallel corpus file (jsonl or tsv) into a Corpus, order preserved."""
    path = Path(path)
    if format not in ("jsonl", "tsv"):
        raise DomainError(f"unknown corpus format {format!r}")
    examples = []
    try:
        handle = path.open(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read corpus file {path}: {exc.strerror or exc}") from exc
    with handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if format == "jsonl":
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON: {exc.msg}", line=line_no) from exc
                if not isinstance(record, dict):
                    raise ParseError("record is not an object", line=line_no)
            else:
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ParseError(f"expected 3 tab-separated fields, got {len(parts)}", line=line_no)
                record = {"id": parts[0], "text": parts[1].split(), "gloss": parts[2].split()}
            examples.append(_example_from_record(record, line_no))
    return Corpus(split=split, examples=examples)


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus as JSONL; load(save(c)) round-trips token content."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as handle:
        for ex in corpus:
            record: dict = {"id": ex.id, "text": ex.text.surfaces, "gloss": ex.gloss.surfaces}
            pos = [t.pos for t in ex.text]
            if all(p is not None for p in pos):
                record["pos"] = pos
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def normalize_gloss_surface(surface: str) -> str:
    match = _VARIANT.match(surface)
    return match.group(1) if match else surface


def normalize_gloss(gloss: Sentence) -> Sentence:
    """Strip trailing variant designators from every gloss token (idempotent)."""
    return Sentence(
        tuple(replace(tok, surface=normalize_gloss_surface(tok.surface)) for tok in gloss)
    )


def split_compounds(sentence: Sentence, lexicon: set[str]) -> Sentence:
    """Split each token into known lexicon words, greedy longest-match left to right.

    A token is replaced only when the greedy scan covers it completely with at
    least two parts; anything else is kept as-is. Parts inherit the source
    token's POS tag.
    """
    if not lexicon:
        raise DomainError("compound splitting needs a non-empty lexicon")
    out: list[Token] = []
    for tok in sentence:
        parts = _greedy_decompose(tok.surface, lexicon)
        if parts is None or len(parts) < 2:
            out.append(tok)
        else:
            out.extend(Token(part, pos=tok.pos) for part in parts)
    return Sentence(tuple(out))


def _greedy_decompose(surface: str, lexicon: set[str]) -> list[str] | None:
    longest = max(len(w) for w in lexicon)
    parts = []
    i = 0
    while i < len(surface):
        for end in range(min(len(surface), i + longest), i, -1):
            if surface[i:end] in lexicon:
                parts.append(surface[i:end])
                i = end
                break
        else:
            return None
    return parts


def filter_many_to_one(corpus: Corpus) -> tuple[Corpus, Corpus]:
    """Partition into examples the aligner can handle (W >= G) and the rest."""
    kept = [ex for ex in corpus if ex.w >= ex.g]
    dropped = [ex for ex in corpus if ex.w < ex.g]
    return Corpus(corpus.split, kept), Corpus(corpus.split, dropped)


Lemmatizer = Callable[[str], str]


def identity_lemmatizer(word: str) -> str:
    return word


def lexical_overlap(corpus: Corpus, lemmatize: Lemmatizer = identity_lemmatizer) -> float:
    """Share of gloss types whose normalized form also occurs in the text vocabulary.

    Both sides are lowercased and lemmatized; the gloss side is additionally
    variant-stripped. Denominator is the normalized gloss type count.
    """
    if len(corpus) == 0:
        raise DomainError("lexical overlap over an empty corpus")
    text_types = {lemmatize(w.lower()) for w in corpus.text_vocab}
    gloss_types = {
        lemmatize(normalize_gloss_surface(g).lower()) for g in corpus.gloss_vocab
    }
    matched = sum(1 for g in gloss_types if g in text_types)
    return matched / len(gloss_types)
