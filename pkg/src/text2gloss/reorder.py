"""Constrained reordering and the final composition into sign-order gloss.

The decoder fills output positions one at a time from a multiset mask over
the input tokens, so whatever the scorer prefers, the output is exactly a
permutation of the input. A mapping extracted from (input, output) then
gathers the padded gloss row into sign order; stripping pads yields the
translation. The default scorer is a class-bigram model, a count-based
stand-in for a learned reorderer behind the same interface.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

from .align import SpoGloss
from .corpus import PAD
from .errors import DataError, DomainError, FormatError
from .wordclass import BrownClustering

_BOUNDARY_CLASS = -1


@dataclass
class ReorderMask:
    """Multiset of input tokens still available to the decoder.

    A token with multiplicity c stays selectable until all c copies are
    spent; counts never go negative.
    """

    remaining: Counter = field(default_factory=Counter)

    @classmethod
    def of(cls, tokens: Sequence[str]) -> "ReorderMask":
        return cls(remaining=Counter(tokens))

    def allowed(self) -> set[str]:
        return {t for t, c in self.remaining.items() if c > 0}

    def consume(self, token: str) -> None:
        if self.remaining[token] <= 0:
            raise DomainError(f"token {token!r} not available in mask")
        self.remaining[token] -= 1
        if self.remaining[token] == 0:
            del self.remaining[token]

    def total(self) -> int:
        return sum(self.remaining.values())


@dataclass(frozen=True)
class Mapping:
    """Position permutation: output position p takes input index perm[p]."""

    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.perm) != list(range(len(self.perm))):
            raise DomainError("mapping must be a bijection on output positions")

    def __len__(self) -> int:
        return len(self.perm)


class TransitionScorer(Protocol):
    def score(self, previous: Sequence[str], candidate: str, position: int) -> float:
        """Finite preference for placing candidate at this output position."""
        ...


@dataclass
class ClassBigramScorer:
    """Add-k smoothed log p(class(candidate) | class(previous token)).

    Position 0 conditions on a boundary class. Unknown words take the
    clustering's reserved class K, so every candidate scores finitely.
    """

    clustering: BrownClustering
    counts: dict[int, Counter]
    k: float = 0.1

    def _class(self, token: str) -> int:
        return self.clustering.class_of(token)

    def score(self, previous: Sequence[str], candidate: str, position: int) -> float:
        prev_class = self._class(previous[-1]) if position > 0 else _BOUNDARY_CLASS
        cand_class = self._class(candidate)
        support = self.clustering.k + 1  # trained classes plus unknown
        row = self.counts.get(prev_class)
        seen = row[cand_class] if row else 0
        total = sum(row.values()) if row else 0
        return math.log((seen + self.k) / (total + self.k * support))


def train_transition_model(
    sequences: Sequence[Sequence[str]], clustering: BrownClustering, k: float = 0.1
) -> ClassBigramScorer:
    """Count class bigrams over token sequences already in target order."""
    if k <= 0:
        raise DomainError(f"smoothing k must be positive, got {k}")
    counts: dict[int, Counter] = {}
    for seq in sequences:
        prev = _BOUNDARY_CLASS
        for token in seq:
            cls = clustering.class_of(token)
            counts.setdefault(prev, Counter())[cls] += 1
            prev = cls
    return ClassBigramScorer(clustering=clustering, counts=counts, k=k)


def save_transition_model(scorer: ClassBigramScorer, path: str | Path) -> None:
    payload = {
        "k": scorer.k,
        "counts": {
            str(prev): {str(cls): n for cls, n in row.items()}
            for prev, row in scorer.counts.items()
        },
    }
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, sort_keys=True), encoding="utf-8"
    )


def load_transition_model(
    path: str | Path, clustering: BrownClustering
) -> ClassBigramScorer:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read transition model {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid transition model file: {exc.msg}") from exc
    if "k" not in payload or "counts" not in payload:
        raise FormatError("transition model file needs 'k' and 'counts'")
    counts = {
        int(prev): Counter({int(cls): int(n) for cls, n in row.items()})
        for prev, row in payload["counts"].items()
    }
    return ClassBigramScorer(clustering=clustering, counts=counts, k=float(payload["k"]))


def constrained_decode(scorer: TransitionScorer, tokens: Sequence[str]) -> list[str]:
    """Reorder tokens greedily under the scorer, output a multiset permutation.

    At each position the highest-scoring token with remaining count wins;
    ties go to the token whose earliest still-unclaimed input occurrence
    comes first, so an indifferent scorer reproduces the input order.
    """
    if not tokens:
        raise DomainError("cannot decode an empty sequence")
    mask = ReorderMask.of(tokens)
    positions: dict[str, list[int]] = {}
    for i, t in enumerate(tokens):
        positions.setdefault(t, []).append(i)
    next_free = {t: 0 for t in positions}

    output: list[str] = []
    for position in range(len(tokens)):
        candidates = sorted(
            (t for t in positions if mask.remaining[t] > 0),
            key=lambda t: positions[t][next_free[t]],
        )
        best_token: str | None = None
        best_score = -math.inf
        for token in candidates:
            s = scorer.score(output, token, position)
            if s > best_score:
                best_score = s
                best_token = token
        assert best_token is not None
        mask.consume(best_token)
        next_free[best_token] += 1
        output.append(best_token)
    return output


def extract_mapping(
    input_tokens: Sequence[str], output_tokens: Sequence[str]
) -> Mapping:
    """Index movement of each output token, stable for duplicates.

    Output position p maps to the smallest input index holding that token
    that no earlier output position has claimed.
    """
    if Counter(input_tokens) != Counter(output_tokens):
        raise DomainError("output is not a multiset permutation of input")
    positions: dict[str, list[int]] = {}
    for i, tok in enumerate(input_tokens):
        positions.setdefault(tok, []).append(i)
    next_free = {tok: 0 for tok in positions}
    perm = []
    for tok in output_tokens:
        idx = positions[tok][next_free[tok]]
        next_free[tok] += 1
        perm.append(idx)
    return Mapping(perm=tuple(perm))


def apply_mapping(mapping: Mapping, seq: Sequence) -> list:
    if len(seq) != len(mapping):
        raise DomainError(
            f"sequence length {len(seq)} does not match mapping length {len(mapping)}"
        )
    return [seq[i] for i in mapping.perm]


def compose_translation(
    spo: SpoGloss, mapping: Mapping, strip_pads: bool = True
) -> list[str]:
    """Gather the padded gloss row into sign order; drop pads by default."""
    ordered = apply_mapping(mapping, spo.tokens)
    if strip_pads:
        return [g for g in ordered if g != PAD]
    return ordered


@dataclass(frozen=True)
class TranslationResult:
    id: str
    spo: tuple[str, ...]
    perm: tuple[int, ...]
    gloss: tuple[str, ...]


def dump_translations(results: Sequence[TranslationResult], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in results:
            fh.write(
                json.dumps(
                    {
                        "id": r.id,
                        "spo": list(r.spo),
                        "perm": list(r.perm),
                        "gloss": list(r.gloss),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_translations(path: str | Path) -> list[TranslationResult]:
    results = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read translations file {path}: {exc.strerror or exc}") from exc
    with fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid translation row: {exc.msg}", line=line_no) from exc
            for key in ("id", "spo", "perm", "gloss"):
                if key not in row:
                    raise FormatError(f"translation row missing {key!r}", line=line_no)
            results.append(
                TranslationResult(
                    id=str(row["id"]),
                    spo=tuple(row["spo"]),
                    perm=tuple(int(i) for i in row["perm"]),
                    gloss=tuple(row["gloss"]),
                )
            )
    return results
