"""Brown clustering: merge behaviour against independent AMI oracles."""

import itertools
import math
import random
from collections import Counter

import pytest

from text2gloss.corpus import Corpus, ParallelExample, Sentence
from text2gloss.errors import DomainError, FormatError
from text2gloss.wordclass import (
    BrownClustering,
    average_mutual_information,
    class_of,
    load_clustering,
    save_clustering,
    train_brown,
)

BOUNDARY = object()


def example(id, text):
    return ParallelExample(
        id=id,
        text=Sentence.from_surfaces(text),
        gloss=Sentence.from_surfaces(["G"]),
    )


def make_corpus(sentences):
    return Corpus(
        split="train",
        examples=[example(f"s{i}", words) for i, words in enumerate(sentences)],
    )


def stream_bigrams(corpus):
    for ex in corpus:
        stream = [BOUNDARY] + [t.surface for t in ex.text] + [BOUNDARY]
        yield from zip(stream, stream[1:])


def oracle_ami(corpus, class_fn):
    """Pure-python class-bigram AMI, written independently of the package."""
    counts = Counter()
    for a, b in stream_bigrams(corpus):
        ca = "B" if a is BOUNDARY else class_fn(a)
        cb = "B" if b is BOUNDARY else class_fn(b)
        counts[(ca, cb)] += 1
    total = sum(counts.values())
    left, right = Counter(), Counter()
    for (ca, cb), n in counts.items():
        left[ca] += n
        right[cb] += n
    ami = 0.0
    for (ca, cb), n in counts.items():
        p = n / total
        ami += p * math.log(p / ((left[ca] / total) * (right[cb] / total)))
    return ami


def set_partitions(items, k):
    """All ways to split items into exactly k non-empty unlabeled blocks."""
    if len(items) == k:
        yield [[item] for item in items]
        return
    if k == 1:
        yield [list(items)]
        return
    head, rest = items[0], items[1:]
    for partition in set_partitions(rest, k - 1):
        yield [[head]] + partition
    for partition in set_partitions(rest, k):
        for i in range(len(partition)):
            yield partition[:i] + [[head] + partition[i]] + partition[i + 1:]


REFERENCE = make_corpus([["a", "x", "b", ".", "a", "y", "b", "."]] * 50)


class TestTrainBrown:
    def test_reference_corpus_clusters_x_with_y(self):
        clustering = train_brown(REFERENCE, k=3, min_count=1)
        assert clustering.class_of("x") == clustering.class_of("y")
        assert clustering.class_of("a") != clustering.class_of("b")

    def test_reference_corpus_matches_partition_oracle(self):
        # global brute force over every 3-way partition of the vocabulary
        vocab = ["a", "b", "x", "y", "."]
        best_ami, best = -math.inf, None
        for partition in set_partitions(vocab, 3):
            lookup = {w: i for i, block in enumerate(partition) for w in block}
            ami = oracle_ami(REFERENCE, lookup.__getitem__)
            if ami > best_ami:
                best_ami, best = ami, lookup
        assert best["x"] == best["y"]
        assert best["a"] != best["b"]
        clustering = train_brown(REFERENCE, k=3, min_count=1)
        greedy_ami = oracle_ami(REFERENCE, clustering.class_of)
        assert greedy_ami == pytest.approx(best_ami, abs=1e-9)

    def test_k_equal_to_vocab_gives_identity(self):
        corpus = make_corpus([["a", "b", "c", "a", "b"]] * 5)
        clustering = train_brown(corpus, k=3, min_count=1)
        assert len({clustering.class_of(w) for w in "abc"}) == 3
        assert clustering.merge_log == []

    def test_each_merge_is_ami_maximal(self):
        # replay the merge log; every logged merge must attain the exhaustive
        # maximum over all candidate pairs at that step (vocab <= 8, all in window)
        rng = random.Random(3)
        vocab = ["u", "v", "w", "x", "y", "z"]
        sentences = [[rng.choice(vocab) for _ in range(rng.randint(3, 7))] for _ in range(40)]
        corpus = make_corpus(sentences)
        clustering = train_brown(corpus, k=2, min_count=1, window=12)

        counts = corpus.text_vocab
        eligible = sorted(counts, key=lambda w: (-counts[w], w))
        clusters = {i: [w] for i, w in enumerate(eligible)}
        next_id = len(eligible)
        for step in clustering.merge_log:
            active = sorted(clusters)

            def partition_ami(merge_pair):
                lookup = {}
                for cid in active:
                    target = min(merge_pair) if cid in merge_pair else cid
                    for w in clusters[cid]:
                        lookup[w] = target
                return oracle_ami(corpus, lookup.__getitem__)

            candidates = {
                pair: partition_ami(pair)
                for pair in itertools.combinations(active, 2)
            }
            chosen = (step.class_a, step.class_b)
            assert chosen in candidates
            assert candidates[chosen] == pytest.approx(max(candidates.values()), abs=1e-9)
            assert step.ami == pytest.approx(candidates[chosen], abs=1e-9)
            clusters[next_id] = clusters.pop(step.class_a) + clusters.pop(step.class_b)
            next_id += 1

        assert len(clusters) == 2

    def test_min_count_words_map_to_unknown(self):
        corpus = make_corpus([["a", "b", "rare"], ["a", "b", "c"], ["a", "b", "c"]])
        clustering = train_brown(corpus, k=2, min_count=2)
        assert clustering.class_of("rare") == 2
        assert clustering.class_of("a") < 2

    def test_too_few_eligible_words(self):
        corpus = make_corpus([["a", "b"]])
        with pytest.raises(DomainError):
            train_brown(corpus, k=3, min_count=1)

    def test_k_below_two(self):
        with pytest.raises(DomainError):
            train_brown(REFERENCE, k=1, min_count=1)

    def test_deterministic(self):
        first = train_brown(REFERENCE, k=3, min_count=1)
        second = train_brown(REFERENCE, k=3, min_count=1)
        assert first.assignment == second.assignment
        assert first.merge_log == second.merge_log

    def test_class_ids_dense(self):
        clustering = train_brown(REFERENCE, k=3, min_count=1)
        assert set(clustering.assignment.values()) == {0, 1, 2}

    def test_merge_log_length(self):
        clustering = train_brown(REFERENCE, k=3, min_count=1)
        assert len(clustering.merge_log) == 5 - 3
        assert all(math.isfinite(step.ami) for step in clustering.merge_log)

    def test_window_narrower_than_vocab(self):
        # queue insertion path: window smaller than the eligible vocabulary
        rng = random.Random(11)
        vocab = [f"w{i}" for i in range(10)]
        sentences = [[rng.choice(vocab) for _ in range(6)] for _ in range(60)]
        corpus = make_corpus(sentences)
        clustering = train_brown(corpus, k=3, min_count=1, window=4)
        assert set(clustering.assignment.values()) == {0, 1, 2}
        assert len(clustering.assignment) == 10
        assert len(clustering.merge_log) == 10 - 3


class TestClassOf:
    def test_lookup_and_unknown(self):
        clustering = BrownClustering(k=3, assignment={"x": 0, "y": 1})
        assert class_of(clustering, "x") == 0
        assert class_of(clustering, "unseen") == 3
        assert class_of(clustering, "") == 3


class TestAmiFunction:
    def test_matches_independent_implementation(self):
        import numpy as np

        matrix = np.array([[4.0, 1.0, 0.0], [2.0, 0.0, 3.0], [1.0, 1.0, 1.0]])
        total = matrix.sum()
        expected = 0.0
        for i in range(3):
            for j in range(3):
                if matrix[i, j] == 0:
                    continue
                p = matrix[i, j] / total
                expected += p * math.log(
                    p / ((matrix[i].sum() / total) * (matrix[:, j].sum() / total))
                )
        assert average_mutual_information(matrix) == pytest.approx(expected, rel=1e-12)

    def test_independent_classes_have_zero_ami(self):
        import numpy as np

        # rank-one joint distribution: p(a,b) = p(a) p(b)
        left = np.array([0.5, 0.3, 0.2])
        right = np.array([0.6, 0.4])
        matrix = np.outer(left, right) * 100
        assert average_mutual_information(matrix) == pytest.approx(0.0, abs=1e-12)


class TestClassesFile:
    def test_roundtrip(self, tmp_path):
        clustering = train_brown(REFERENCE, k=3, min_count=1)
        path = tmp_path / "classes.json"
        save_clustering(clustering, path)
        again = load_clustering(path)
        assert again.k == clustering.k
        assert again.assignment == clustering.assignment

    def test_bad_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("[]")
        with pytest.raises(FormatError):
            load_clustering(path)
