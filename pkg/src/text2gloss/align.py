"""Word-gloss alignment from embedding similarity, and the orderings it induces.

The combined score matrix adds thresholded static-vector cosines on top of
contextual cosines; a greedy max-cell sweep turns it into an injective
gloss -> word assignment, from which both the spoken-order gloss sequence
(glosses placed at their aligned word slots, pads elsewhere) and the
sign-order text permutation are materialized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import PAD, ParallelExample
from .embeddings import ContextualEmbeddingStore, StaticEmbeddingTable, similarity_matrix
from .errors import (
    DataError,
    DomainError,
    EmbeddingLookupError,
    FormatError,
    InvariantError,
)


@dataclass
class SoftAlignment:
    scores: np.ndarray  # G x W
    source: str = "combined"

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.ndim != 2:
            raise DomainError("alignment scores must be a G x W matrix")
        if not np.all(np.isfinite(self.scores)):
            raise DomainError("alignment scores must be finite")


@dataclass(frozen=True)
class OneToOneAlignment:
    """Total, injective map from gloss index to word index."""

    pairs: dict[int, int]
    w: int

    def __post_init__(self):
        g = len(self.pairs)
        if sorted(self.pairs) != list(range(g)):
            raise DomainError("alignment must cover every gloss index")
        words = list(self.pairs.values())
        if len(set(words)) != len(words):
            raise DomainError("alignment must not reuse a word index")
        if words and (min(words) < 0 or max(words) >= self.w):
            raise DomainError("aligned word index out of range")

    @property
    def g(self) -> int:
        return len(self.pairs)

    def word_of(self, gloss_index: int) -> int:
        return self.pairs[gloss_index]


@dataclass(frozen=True)
class SpoGloss:
    """Gloss tokens in spoken order, padded to source length with '*'."""

    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)

    def non_pad_count(self) -> int:
        return sum(1 for t in self.tokens if t != PAD)


@dataclass(frozen=True)
class SignOrderText:
    """Source tokens permuted into sign order; perm[p] = source index at slot p."""

    tokens: tuple[str, ...]
    perm: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.perm) != list(range(len(self.perm))):
            raise InvariantError("sign-order perm is not a bijection")
        if len(self.tokens) != len(self.perm):
            raise InvariantError("sign-order tokens and perm differ in length")


def _static_rows(surfaces: list[str], table: StaticEmbeddingTable) -> np.ndarray:
    """Stack static vectors for the given tokens; absent words get zero rows.

    Lookup is exact first, lowercased second, so uppercase gloss labels hit
    their spoken-language forms without a dedicated gloss table.
    """
    rows = np.zeros((len(surfaces), table.dim), dtype=np.float64)
    for i, surface in enumerate(surfaces):
        vec = table.get(surface)
        if vec is None:
            vec = table.get(surface.lower())
        if vec is not None:
            rows[i] = vec
    return rows


def combine_scores(
    contextual: np.ndarray,
    static: np.ndarray,
    alpha: float,
    threshold: float | None = None,
) -> np.ndarray:
    """contextual + alpha * static, keeping only static entries above threshold.

    The threshold defaults to alpha itself; entries equal to it are dropped.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must be in (0, 1], got {alpha}")
    if threshold is None:
        threshold = alpha
    if not 0.0 < threshold <= 1.0:
        raise DomainError(f"threshold must be in (0, 1], got {threshold}")
    contextual = np.asarray(contextual, dtype=np.float64)
    static = np.asarray(static, dtype=np.float64)
    if contextual.shape != static.shape:
        raise DomainError(
            f"score shapes differ: contextual {contextual.shape}, static {static.shape}"
        )
    filtered = np.where(static > threshold, static, 0.0)
    return contextual + alpha * filtered


def build_soft_alignment(
    example: ParallelExample,
    static_table: StaticEmbeddingTable,
    store: ContextualEmbeddingStore,
    alpha: float,
    threshold: float | None = None,
) -> SoftAlignment:
    """Combine contextual and thresholded static similarities for one example.

    Static cosines at or below the threshold (default: alpha itself) are
    zeroed; survivors are scaled by alpha and added to the contextual cosines.
    """
    text_ctx = store.get(example.id, "text")
    if text_ctx is None:
        raise EmbeddingLookupError(example.id, "text")
    gloss_ctx = store.get(example.id, "gloss")
    if gloss_ctx is None:
        raise EmbeddingLookupError(example.id, "gloss")
    if text_ctx.shape[0] != example.w:
        raise DomainError(
            f"contextual text rows ({text_ctx.shape[0]}) != W ({example.w}) for {example.id!r}"
        )
    if gloss_ctx.shape[0] != example.g:
        raise DomainError(
            f"contextual gloss rows ({gloss_ctx.shape[0]}) != G ({example.g}) for {example.id!r}"
        )

    contextual = similarity_matrix(gloss_ctx, text_ctx, normalize=True)

    gloss_static = _static_rows(example.gloss.surfaces, static_table)
    text_static = _static_rows(example.text.surfaces, static_table)
    static = similarity_matrix(gloss_static, text_static, normalize=True)

    return SoftAlignment(
        scores=combine_scores(contextual, static, alpha, threshold), source="combined"
    )


def extract_one_to_one(soft: SoftAlignment) -> OneToOneAlignment:
    """Greedy strongest-cell extraction of an injective gloss -> word map.

    Repeatedly take the maximum remaining cell, retire its row and column.
    Ties resolve to the smaller gloss index, then the smaller word index.
    """
    scores = soft.scores
    g, w = scores.shape
    if g > w:
        raise DomainError(f"cannot align {g} glosses to {w} words (need G <= W)")
    working = scores.astype(np.float64, copy=True)
    pairs: dict[int, int] = {}
    for _ in range(g):
        # argmax over a row-major flat view picks the first maximal cell,
        # which is exactly the (smaller g, smaller w) tie-break
        flat = int(np.argmax(working))
        gi, wi = divmod(flat, w)
        pairs[gi] = wi
        working[gi, :] = -np.inf
        working[:, wi] = -np.inf
    return OneToOneAlignment(pairs=pairs, w=w)


def make_spo(example: ParallelExample, alignment: OneToOneAlignment) -> SpoGloss:
    """Place each gloss at its aligned word slot; every other slot is a pad."""
    _check_alignment(example, alignment)
    out = [PAD] * example.w
    for gi, wi in alignment.pairs.items():
        out[wi] = example.gloss[gi].surface
    return SpoGloss(tokens=tuple(out))


def make_sio(example: ParallelExample, alignment: OneToOneAlignment) -> SignOrderText:
    """Order words by their gloss's index; unaligned words trail in source order."""
    _check_alignment(example, alignment)
    aligned = [alignment.word_of(gi) for gi in range(alignment.g)]
    taken = set(aligned)
    trailing = [wi for wi in range(example.w) if wi not in taken]
    perm = aligned + trailing
    tokens = tuple(example.text[wi].surface for wi in perm)
    return SignOrderText(tokens=tokens, perm=tuple(perm))


def _check_alignment(example: ParallelExample, alignment: OneToOneAlignment) -> None:
    if alignment.g != example.g or alignment.w != example.w:
        raise DomainError(
            f"alignment shape ({alignment.g}, {alignment.w}) does not match "
            f"example {example.id!r} ({example.g}, {example.w})"
        )


@dataclass(frozen=True)
class AlignmentRecord:
    """One aligned example as serialized in the alignment dump."""

    id: str
    alignment: OneToOneAlignment
    spo: tuple[str, ...]
    sio: tuple[str, ...]
    perm: tuple[int, ...]


def align_example(
    example: ParallelExample, alignment: OneToOneAlignment
) -> AlignmentRecord:
    spo = make_spo(example, alignment)
    sio = make_sio(example, alignment)
    return AlignmentRecord(
        id=example.id,
        alignment=alignment,
        spo=spo.tokens,
        sio=sio.tokens,
        perm=sio.perm,
    )


def dump_alignments(records: list[AlignmentRecord], path: str | Path) -> None:
    """Write one JSONL row per aligned example: pairs, spo, sio, perm."""
    with Path(path).open("w", encoding="utf-8") as handle:
        for rec in records:
            row = {
                "id": rec.id,
                "pairs": [[gi, rec.alignment.pairs[gi]] for gi in sorted(rec.alignment.pairs)],
                "spo": list(rec.spo),
                "sio": list(rec.sio),
                "perm": list(rec.perm),
            }
            handle.write(json.dumps(row, ensure_ascii=False) + "\n")


def load_alignments(path: str | Path) -> dict[str, AlignmentRecord]:
    """Read an alignment dump back, keyed by example id."""
    records: dict[str, AlignmentRecord] = {}
    try:
        handle = Path(path).open(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read alignment file {path}: {exc.strerror or exc}") from exc
    with handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid alignment record: {exc.msg}", line=line_no) from exc
            pairs = {int(g): int(w) for g, w in row["pairs"]}
            records[row["id"]] = AlignmentRecord(
                id=row["id"],
                alignment=OneToOneAlignment(pairs=pairs, w=len(row["perm"])),
                spo=tuple(row["spo"]),
                sio=tuple(row["sio"]),
                perm=tuple(row["perm"]),
            )
    return records
