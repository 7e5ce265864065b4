"""Brown clustering of the text vocabulary into K flat word classes.

Windowed agglomerative variant: the most frequent words start as singleton
classes, and the pair whose merge yields the highest class-bigram average
mutual information (AMI) is merged repeatedly, topping the window up from the
frequency-ordered queue, until K classes remain. Sentence boundaries and
below-threshold words are fixed context classes that are never merged;
words outside the trained vocabulary fall into the reserved class K.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .corpus import Corpus
from .errors import DataError, DomainError, FormatError

_BOUNDARY = "\x00<s>"
_UNKNOWN = "\x00<unk>"


class MergeStep(NamedTuple):
    class_a: int
    class_b: int
    ami: float


@dataclass
class BrownClustering:
    k: int
    assignment: dict[str, int]
    merge_log: list[MergeStep] = field(default_factory=list)

    def class_of(self, word: str) -> int:
        """Trained class id, or the reserved unknown class K."""
        return self.assignment.get(word, self.k)


@dataclass
class _Cluster:
    id: int
    words: tuple[str, ...]


def _bigram_counts(corpus: Corpus, eligible: set[str]) -> dict[tuple[str, str], int]:
    """Consecutive-token counts with boundary markers framing each sentence
    and ineligible words collapsed to a fixed unknown marker."""
    counts: dict[tuple[str, str], int] = {}
    for example in corpus:
        stream = [_BOUNDARY]
        stream += [t.surface if t.surface in eligible else _UNKNOWN for t in example.text]
        stream.append(_BOUNDARY)
        for a, b in zip(stream, stream[1:]):
            counts[(a, b)] = counts.get((a, b), 0) + 1
    return counts


def _class_matrix(
    active: list[_Cluster], bigrams: dict[tuple[str, str], int]
) -> np.ndarray:
    """Bigram counts aggregated to the current classes.

    Slots: one per active class, then boundary, then unknown. Bigrams touching
    words still in the queue are left out until those words are inserted.
    """
    n = len(active)
    slot: dict[str, int] = {}
    for i, cluster in enumerate(active):
        for word in cluster.words:
            slot[word] = i
    slot[_BOUNDARY] = n
    slot[_UNKNOWN] = n + 1
    matrix = np.zeros((n + 2, n + 2), dtype=np.float64)
    for (a, b), count in bigrams.items():
        sa = slot.get(a)
        sb = slot.get(b)
        if sa is None or sb is None:
            continue
        matrix[sa, sb] += count
    return matrix


def average_mutual_information(matrix: np.ndarray) -> float:
    """AMI of a class-bigram count matrix (natural log)."""
    total = matrix.sum()
    if total <= 0.0:
        return 0.0
    p = matrix / total
    left = p.sum(axis=1)
    right = p.sum(axis=0)
    nz = p > 0.0
    expected = np.outer(left, right)
    return float(np.sum(p[nz] * np.log(p[nz] / expected[nz])))


def _merged_ami(matrix: np.ndarray, i: int, j: int) -> float:
    merged = matrix.copy()
    merged[i, :] += merged[j, :]
    merged[:, i] += merged[:, j]
    merged = np.delete(np.delete(merged, j, axis=0), j, axis=1)
    return average_mutual_information(merged)


def train_brown(
    corpus: Corpus, k: int, min_count: int = 2, window: int | None = None
) -> BrownClustering:
    """Cluster the text vocabulary into K classes by greedy AMI-maximal merges.

    Words seen fewer than min_count times are not clustered (they map to the
    unknown class K at lookup time). Ties between candidate merges resolve to
    the pair with the smaller class ids, making training deterministic.
    """
    if k < 2:
        raise DomainError(f"need at least 2 word classes, got {k}")
    counts = corpus.text_vocab
    eligible = sorted(
        (w for w, c in counts.items() if c >= min_count),
        key=lambda w: (-counts[w], w),
    )
    if len(eligible) < k:
        raise DomainError(
            f"only {len(eligible)} words meet min_count={min_count}, need at least {k}"
        )
    if window is None:
        window = 2 * k
    window = max(window, k)

    bigrams = _bigram_counts(corpus, set(eligible))

    active = [_Cluster(id=i, words=(w,)) for i, w in enumerate(eligible[:window])]
    queue = list(eligible[window:])
    next_id = len(active)
    merge_log: list[MergeStep] = []

    while len(active) > k or queue:
        if len(active) < 2 or (queue and len(active) <= window):
            word = queue.pop(0)
            active.append(_Cluster(id=next_id, words=(word,)))
            next_id += 1
            continue

        matrix = _class_matrix(active, bigrams)
        best_ami = -np.inf
        best_pair: tuple[int, int] | None = None
        # active stays id-sorted, so scanning i<j with strict improvement
        # realizes the smaller-id-pair tie-break
        for i in range(len(active)):
            for j in range(i + 1, len(active)):
                ami = _merged_ami(matrix, i, j)
                if ami > best_ami:
                    best_ami = ami
                    best_pair = (i, j)
        assert best_pair is not None
        i, j = best_pair
        merged = _Cluster(id=next_id, words=active[i].words + active[j].words)
        merge_log.append(MergeStep(active[i].id, active[j].id, float(best_ami)))
        next_id += 1
        active = [c for idx, c in enumerate(active) if idx not in (i, j)] + [merged]

    final = sorted(
        active, key=lambda c: (-sum(counts[w] for w in c.words), min(c.words))
    )
    assignment = {w: class_id for class_id, cluster in enumerate(final) for w in cluster.words}
    return BrownClustering(k=k, assignment=assignment, merge_log=merge_log)


def class_of(clustering: BrownClustering, word: str) -> int:
    return clustering.class_of(word)


def save_clustering(clustering: BrownClustering, path: str | Path) -> None:
    payload = {"K": clustering.k, "assignment": clustering.assignment}
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, sort_keys=True), encoding="utf-8")


def load_clustering(path: str | Path) -> BrownClustering:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read classes file {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid classes file: {exc.msg}") from exc
    if "K" not in payload or "assignment" not in payload:
        raise FormatError("classes file needs 'K' and 'assignment'")
    return BrownClustering(
        k=int(payload["K"]),
        assignment={w: int(c) for w, c in payload["assignment"].items()},
    )
