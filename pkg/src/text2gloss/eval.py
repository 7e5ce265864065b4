"""Corpus metrics (BLEU, ROUGE-L) and the stage latency benchmark."""

from __future__ import annotations

import json
import math
import time
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .corpus import Corpus
from .errors import DomainError

TokenSeq = Sequence[str]


def _ngrams(tokens: TokenSeq, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(hypotheses: Sequence[TokenSeq], references: Sequence[TokenSeq], max_n: int = 4) -> float:
    """Corpus-level BLEU in [0, 100]: pooled clipped n-gram precisions,
    uniform weights, geometric mean, brevity penalty, no smoothing."""
    if not hypotheses:
        raise DomainError("no hypotheses to score")
    if len(hypotheses) != len(references):
        raise DomainError(
            f"{len(hypotheses)} hypotheses vs {len(references)} references"
        )
    if not 1 <= max_n <= 4:
        raise DomainError(f"max_n must be in [1, 4], got {max_n}")

    matched = [0] * max_n
    total = [0] * max_n
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            hyp_counts = _ngrams(hyp, n)
            ref_counts = _ngrams(ref, n)
            matched[n - 1] += sum(
                min(c, ref_counts[g]) for g, c in hyp_counts.items()
            )
            total[n - 1] += max(len(hyp) - n + 1, 0)

    if hyp_len == 0:
        return 0.0
    precisions = []
    for n in range(max_n):
        if total[n] == 0 or matched[n] == 0:
            return 0.0
        precisions.append(matched[n] / total[n])
    log_mean = sum(math.log(p) for p in precisions) / max_n
    bp = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * bp * math.exp(log_mean)


def _lcs_length(a: TokenSeq, b: TokenSeq) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(hypotheses: Sequence[TokenSeq], references: Sequence[TokenSeq]) -> float:
    """Mean per-sentence ROUGE-L F1 in [0, 100]."""
    if not hypotheses:
        raise DomainError("no hypotheses to score")
    if len(hypotheses) != len(references):
        raise DomainError(
            f"{len(hypotheses)} hypotheses vs {len(references)} references"
        )
    scores = []
    for hyp, ref in zip(hypotheses, references):
        lcs = _lcs_length(hyp, ref)
        if lcs == 0:
            scores.append(0.0)
            continue
        p = lcs / len(hyp)
        r = lcs / len(ref)
        scores.append(2 * p * r / (p + r))
    return 100.0 * sum(scores) / len(scores)


@dataclass(frozen=True)
class EvalReport:
    bleu1: float
    bleu2: float
    bleu3: float
    bleu4: float
    rouge: float
    n_examples: int

    def to_json(self) -> dict:
        return {
            "bleu1": self.bleu1,
            "bleu2": self.bleu2,
            "bleu3": self.bleu3,
            "bleu4": self.bleu4,
            "rouge": self.rouge,
            "n_examples": self.n_examples,
        }


def evaluate_corpus(
    hypotheses: Sequence[TokenSeq], references: Sequence[TokenSeq]
) -> EvalReport:
    return EvalReport(
        bleu1=bleu(hypotheses, references, 1),
        bleu2=bleu(hypotheses, references, 2),
        bleu3=bleu(hypotheses, references, 3),
        bleu4=bleu(hypotheses, references, 4),
        rouge=rouge_l(hypotheses, references),
        n_examples=len(hypotheses),
    )


@dataclass(frozen=True)
class StageLatency:
    ms: float
    speedup: float


@dataclass(frozen=True)
class LatencyReport:
    baseline: str
    stages: dict[str, StageLatency]

    def to_json(self) -> dict:
        return {
            name: {"ms": s.ms, "speedup": s.speedup}
            for name, s in self.stages.items()
        }


def speedups(latencies_ms: Mapping[str, float], baseline: str) -> dict[str, float]:
    """Baseline-over-stage ratios; the arithmetic behind the speedup column."""
    if baseline not in latencies_ms:
        raise DomainError(f"baseline stage {baseline!r} not among measured stages")
    for name, ms in latencies_ms.items():
        if ms <= 0:
            raise DomainError(f"stage {name!r} has non-positive latency")
    base = latencies_ms[baseline]
    return {name: base / ms for name, ms in latencies_ms.items()}


def bench_latency(
    stages: Mapping[str, Callable[[Corpus], object]],
    corpus: Corpus,
    repeats: int = 3,
    baseline: str | None = None,
) -> LatencyReport:
    """Mean wall-clock per full-corpus pass, after one warm-up pass each.

    Single-threaded on purpose: stable numbers matter more than finishing
    fast here.
    """
    if repeats < 3:
        raise DomainError(f"repeats must be at least 3, got {repeats}")
    if not stages:
        raise DomainError("no stages to benchmark")
    names = list(stages)
    base_name = baseline if baseline is not None else names[0]
    if base_name not in stages:
        raise DomainError(f"baseline stage {base_name!r} not among stages")

    latencies: dict[str, float] = {}
    for name in names:
        fn = stages[name]
        fn(corpus)  # warm-up
        start = time.perf_counter()
        for _ in range(repeats):
            fn(corpus)
        latencies[name] = (time.perf_counter() - start) / repeats * 1000.0
    ratios = speedups(latencies, base_name)
    return LatencyReport(
        baseline=base_name,
        stages={
            name: StageLatency(ms=latencies[name], speedup=ratios[name])
            for name in names
        },
    )


def save_report(report: EvalReport | LatencyReport, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(report.to_json(), indent=2, sort_keys=True), encoding="utf-8"
    )
