"""Pre-ordering of text into sign order with a bracketing transduction grammar.

A binary tree over the source sentence decides, at every span, whether to
emit it as-is (terminal), split and keep the halves in order (straight), or
split and swap them (inverted). A linear model over span features scores the
decisions, beam search finds the best tree, and a structured perceptron with
weight averaging trains the model against permutations read off word-gloss
alignments. The oracle tree for a target permutation maximizes concordant
pairs via a span DP with O(1) cross-span counts from 2D prefix sums.
"""

from __future__ import annotations

import dataclasses
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .corpus import Sentence
from .errors import (
    DataError,
    DomainError,
    FeatureError,
    FormatError,
    InvariantError,
    TrainingError,
)
from .wordclass import BrownClustering

STRAIGHT = "straight"
INVERTED = "inverted"
TERMINAL = "terminal"


@dataclass(frozen=True)
class BtgNode:
    label: str
    start: int
    end: int
    left: "BtgNode | None" = None
    right: "BtgNode | None" = None

    def __post_init__(self) -> None:
        if self.label == TERMINAL:
            if self.left is not None or self.right is not None:
                raise InvariantError("terminal node with children")
        elif self.label in (STRAIGHT, INVERTED):
            if self.left is None or self.right is None:
                raise InvariantError(f"{self.label} node needs two children")
        else:
            raise InvariantError(f"unknown node label {self.label!r}")
        if self.end <= self.start:
            raise InvariantError("empty span")


def tree_to_permutation(tree: BtgNode) -> tuple[int, ...]:
    """Source indices in output order."""
    if tree.label == TERMINAL:
        return tuple(range(tree.start, tree.end))
    assert tree.left is not None and tree.right is not None
    left = tree_to_permutation(tree.left)
    right = tree_to_permutation(tree.right)
    return left + right if tree.label == STRAIGHT else right + left


def apply_permutation(items: Sequence, perm: Sequence[int]) -> list:
    if sorted(perm) != list(range(len(items))):
        raise DomainError("permutation does not match sequence length")
    return [items[i] for i in perm]


def kendall_tau(a: Sequence, b: Sequence) -> float:
    """Normalized Kendall tau: concordant pairs over all pairs, in [0, 1].

    Both sequences must order the same distinct items. A single item (or an
    empty sequence) is trivially concordant, so tau is 1.0.
    """
    if len(a) != len(b) or set(a) != set(b) or len(set(a)) != len(a):
        raise DomainError("sequences must be permutations of the same distinct items")
    n = len(a)
    if n <= 1:
        return 1.0
    pos = {item: i for i, item in enumerate(b)}
    seq = [pos[item] for item in a]
    concordant = sum(
        1 for i in range(n) for j in range(i + 1, n) if seq[i] < seq[j]
    )
    return concordant / (n * (n - 1) / 2)


def reachable_permutations(n: int) -> set[tuple[int, ...]]:
    """All permutations some tree over n tokens can produce."""
    if n < 1:
        raise DomainError("need at least one token")
    memo: dict[int, set[tuple[int, ...]]] = {1: {(0,)}}

    def perms(length: int) -> set[tuple[int, ...]]:
        if length in memo:
            return memo[length]
        out = {tuple(range(length))}
        for m in range(1, length):
            for lp in perms(m):
                for rp in perms(length - m):
                    shifted = tuple(i + m for i in rp)
                    out.add(lp + shifted)
                    out.add(shifted + lp)
        memo[length] = out
        return out

    return perms(n)


def enumerate_trees(start: int, end: int) -> Iterator[BtgNode]:
    """Every labeled tree over the span, terminals allowed at any length."""
    yield BtgNode(TERMINAL, start, end)
    for m in range(start + 1, end):
        for left in enumerate_trees(start, m):
            for right in enumerate_trees(m, end):
                yield BtgNode(STRAIGHT, start, end, left, right)
                yield BtgNode(INVERTED, start, end, left, right)


def annotate_classes(sentence: Sentence, clustering: BrownClustering) -> Sentence:
    """Copy of the sentence with word classes filled in from the clustering."""
    return Sentence(
        tokens=tuple(
            dataclasses.replace(tok, word_class=clustering.class_of(tok.surface))
            for tok in sentence.tokens
        )
    )


def _length_bucket(length: int) -> str:
    if length <= 4:
        return str(length)
    return "5-8" if length <= 8 else "9+"


def span_features(
    sentence: Sentence,
    start: int,
    end: int,
    split: int | None,
    decision: str,
    parent: str,
) -> list[str]:
    """Feature strings for one decision, each conjoined with its label."""
    toks = sentence.tokens

    def pos(i: int) -> str:
        return toks[i].pos or "NONE"

    def cls(i: int) -> str:
        wc = toks[i].word_class
        return "NONE" if wc is None else str(wc)

    d = decision
    feats = [
        f"bias:{d}",
        f"parent:{parent}|{d}",
        f"len:{_length_bucket(end - start)}|{d}",
        f"first.pos:{pos(start)}|{d}",
        f"last.pos:{pos(end - 1)}|{d}",
        f"first.cls:{cls(start)}|{d}",
        f"last.cls:{cls(end - 1)}|{d}",
        f"first.word:{toks[start].surface}|{d}",
        f"last.word:{toks[end - 1].surface}|{d}",
    ]
    if split is not None:
        feats += [
            f"split.pos:{pos(split - 1)}|{pos(split)}|{d}",
            f"split.cls:{cls(split - 1)}|{cls(split)}|{d}",
            f"left.pos:{pos(split - 1)}|{d}",
            f"right.pos:{pos(split)}|{d}",
            f"left.cls:{cls(split - 1)}|{d}",
            f"right.cls:{cls(split)}|{d}",
        ]
    return feats


@dataclass
class PreorderModel:
    weights: dict[str, float]
    beam: int = 20
    iterations: int = 30

    def score(self, features: Sequence[str]) -> float:
        w = self.weights
        return sum(w.get(f, 0.0) for f in features)


@dataclass(frozen=True)
class _State:
    score: float
    # undecided spans, leftmost first: (start, end, parent label)
    pending: tuple[tuple[int, int, str], ...]
    # decisions in expansion order (pre-order, left before right)
    decisions: tuple[tuple[str, int | None], ...]
    # canonical index of each decision among its span's candidates; sorting
    # ties on this tuple realizes earlier-split/straight-first/terminal-last
    rank: tuple[int, ...] = ()


def _candidate_decisions(start: int, end: int) -> list[tuple[str, int | None]]:
    # canonical order realizes the tie-break: earlier splits first,
    # straight before inverted at each split, terminal last
    if end - start == 1:
        return [(TERMINAL, None)]
    out: list[tuple[str, int | None]] = []
    for m in range(start + 1, end):
        out.append((STRAIGHT, m))
        out.append((INVERTED, m))
    out.append((TERMINAL, None))
    return out


def _rebuild(decisions: Sequence[tuple[str, int | None]], n: int) -> BtgNode:
    it = iter(decisions)

    def build(start: int, end: int) -> BtgNode:
        label, split = next(it)
        if label == TERMINAL:
            return BtgNode(TERMINAL, start, end)
        assert split is not None
        left = build(start, split)
        right = build(split, end)
        return BtgNode(label, start, end, left, right)

    tree = build(0, n)
    try:
        next(it)
    except StopIteration:
        return tree
    raise InvariantError("leftover decisions after tree rebuild")


def parse_btg(model: PreorderModel, sentence: Sentence, beam: int | None = None) -> BtgNode:
    """Best tree under the model by beam search over partial trees.

    Each step expands the leftmost undecided span of every live state; the
    beam keeps the highest-scoring states, stably, so the canonical decision
    order settles ties.
    """
    width = beam if beam is not None else model.beam
    if width < 1:
        raise DomainError(f"beam width must be positive, got {width}")
    for i, tok in enumerate(sentence.tokens):
        if tok.word_class is None:
            raise FeatureError(
                f"token {tok.surface!r} at position {i} has no word class; "
                "annotate the sentence with a clustering first"
            )
    n = len(sentence)
    states = [_State(0.0, ((0, n, "root"),), ())]
    while any(s.pending for s in states):
        candidates: list[_State] = []
        for state in states:
            if not state.pending:
                candidates.append(state)
                continue
            (start, end, parent), rest = state.pending[0], state.pending[1:]
            for index, (label, split) in enumerate(_candidate_decisions(start, end)):
                feats = span_features(sentence, start, end, split, label, parent)
                score = state.score + model.score(feats)
                if label == TERMINAL:
                    pending = rest
                else:
                    assert split is not None
                    pending = ((start, split, label), (split, end, label)) + rest
                candidates.append(
                    _State(
                        score,
                        pending,
                        state.decisions + ((label, split),),
                        state.rank + (index,),
                    )
                )
        candidates.sort(key=lambda s: (-s.score, s.rank))
        states = candidates[:width]
    return _rebuild(states[0].decisions, n)


def apply_preorder(
    model: PreorderModel, sentence: Sentence, beam: int | None = None
) -> tuple[Sentence, tuple[int, ...]]:
    """Reorder a sentence with the model; also return the permutation."""
    tree = parse_btg(model, sentence, beam)
    perm = tree_to_permutation(tree)
    reordered = Sentence(tokens=tuple(sentence.tokens[i] for i in perm))
    return reordered, perm


def tree_features(sentence: Sentence, tree: BtgNode, parent: str = "root") -> list[str]:
    """All decision features of a complete tree."""
    split = None if tree.label == TERMINAL else tree.left.end  # type: ignore[union-attr]
    feats = span_features(sentence, tree.start, tree.end, split, tree.label, parent)
    if tree.label != TERMINAL:
        assert tree.left is not None and tree.right is not None
        feats += tree_features(sentence, tree.left, tree.label)
        feats += tree_features(sentence, tree.right, tree.label)
    return feats


def oracle_tree(target: Sequence[int]) -> BtgNode:
    """Tree whose permutation has the most concordant pairs with the target.

    Span DP: the cross-span concordant count for a split comes from a 2D
    prefix-sum table in O(1), so the whole oracle is O(n^3). Ties follow the
    same canonical decision order as parsing.
    """
    n = len(target)
    if sorted(target) != list(range(n)):
        raise DomainError("target must be a permutation of 0..n-1")
    rank = [0] * n
    for out_pos, src in enumerate(target):
        rank[src] = out_pos

    # C[u, v] = 1 when source u should precede source v in the output
    c = np.zeros((n, n), dtype=np.int64)
    for u in range(n):
        for v in range(n):
            if rank[u] < rank[v]:
                c[u, v] = 1
    # prefix[a, b] = sum of C over u < a, v < b
    prefix = np.zeros((n + 1, n + 1), dtype=np.int64)
    prefix[1:, 1:] = c.cumsum(axis=0).cumsum(axis=1)

    def cross(i: int, m: int, j: int) -> int:
        # pairs (u in [i, m), v in [m, j)) with rank[u] < rank[v]
        return int(prefix[m, j] - prefix[i, j] - prefix[m, m] + prefix[i, m])

    best_score: dict[tuple[int, int], int] = {}
    best_choice: dict[tuple[int, int], tuple[str, int | None]] = {}

    for length in range(1, n + 1):
        for i in range(0, n - length + 1):
            j = i + length
            if length == 1:
                best_score[(i, j)] = 0
                best_choice[(i, j)] = (TERMINAL, None)
                continue
            score = -1
            choice: tuple[str, int | None] = (TERMINAL, None)
            for m in range(i + 1, j):
                sub = best_score[(i, m)] + best_score[(m, j)]
                straight = cross(i, m, j)
                total = (m - i) * (j - m)
                for label, gain in ((STRAIGHT, straight), (INVERTED, total - straight)):
                    if sub + gain > score:
                        score = sub + gain
                        choice = (label, m)
            in_order = sum(
                1 for u in range(i, j) for v in range(u + 1, j) if rank[u] < rank[v]
            )
            if in_order > score:
                score = in_order
                choice = (TERMINAL, None)
            best_score[(i, j)] = score
            best_choice[(i, j)] = choice

    def build(i: int, j: int) -> BtgNode:
        label, m = best_choice[(i, j)]
        if label == TERMINAL:
            return BtgNode(TERMINAL, i, j)
        assert m is not None
        return BtgNode(label, i, j, build(i, m), build(m, j))

    return build(0, n)


def train_preorder(
    pairs: Sequence[tuple[Sentence, Sequence[int]]],
    iterations: int = 30,
    beam: int = 20,
    seed: int = 0,
) -> PreorderModel:
    """Structured perceptron with weight averaging.

    For each sentence the current model parses under the beam; when the
    decoded permutation's tau against the target falls short of the oracle
    tree's tau, weights move toward the oracle tree's features. The returned
    weights are the average over all steps, which damps oscillation.
    """
    if not pairs:
        raise TrainingError("no training pairs")
    for sentence, target in pairs:
        if sorted(target) != list(range(len(sentence))):
            raise TrainingError(
                f"target permutation does not fit sentence of length {len(sentence)}"
            )

    weights: dict[str, float] = {}
    accum: dict[str, float] = {}
    step = 0
    rng = random.Random(seed)
    order = list(range(len(pairs)))
    model = PreorderModel(weights=weights, beam=beam, iterations=iterations)

    for _ in range(iterations):
        rng.shuffle(order)
        for idx in order:
            sentence, target = pairs[idx]
            step += 1
            if len(sentence) < 2:
                continue
            predicted = parse_btg(model, sentence, beam)
            predicted_perm = tree_to_permutation(predicted)
            oracle = oracle_tree(target)
            oracle_perm = tree_to_permutation(oracle)
            decoded_tau = kendall_tau(list(predicted_perm), list(target))
            oracle_tau = kendall_tau(list(oracle_perm), list(target))
            if decoded_tau >= oracle_tau:
                continue
            for feat in tree_features(sentence, oracle):
                weights[feat] = weights.get(feat, 0.0) + 1.0
                accum[feat] = accum.get(feat, 0.0) + step
            for feat in tree_features(sentence, predicted):
                weights[feat] = weights.get(feat, 0.0) - 1.0
                accum[feat] = accum.get(feat, 0.0) - step

    if step:
        averaged = {
            f: w - accum.get(f, 0.0) / step for f, w in weights.items() if w or accum.get(f)
        }
    else:
        averaged = dict(weights)
    averaged = {f: w for f, w in averaged.items() if w != 0.0}
    return PreorderModel(weights=averaged, beam=beam, iterations=iterations)


def save_preorder_model(model: PreorderModel, path: str | Path) -> None:
    payload = {
        "beam": model.beam,
        "iterations": model.iterations,
        "weights": model.weights,
    }
    Path(path).write_text(
        json.dumps(payload, ensure_ascii=False, sort_keys=True), encoding="utf-8"
    )


def load_preorder_model(path: str | Path) -> PreorderModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read model file {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid model file: {exc.msg}") from exc
    for key in ("beam", "iterations", "weights"):
        if key not in payload:
            raise FormatError(f"model file missing {key!r}")
    return PreorderModel(
        weights={str(k): float(v) for k, v in payload["weights"].items()},
        beam=int(payload["beam"]),
        iterations=int(payload["iterations"]),
    )
