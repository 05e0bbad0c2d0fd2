"""Sliding-window topic coherence (the c_v family).

The measure has four stages: boolean sliding-window counts over the
corpus token sequences, normalized pointwise mutual information between
word pairs, per-word context vectors against a topic's full top-word
set, and the mean indirect cosine between each word's vector and the
summed vector of the whole set.

Windows are step-1 and never span documents; a document shorter than the
window yields exactly one window covering the whole document. Counts are
boolean per window: a word either occurs in it or not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .corpus import Corpus
from .errors import ConfigError, DataError
from .hdp import HdpModel
from .lda import LdaModel


@dataclass(frozen=True)
class CoherenceConfig:
    window_size: int = 110
    top_n: int = 10
    epsilon: float = 1e-12
    gamma_exponent: float = 1.0
    hdp_weight_floor: float = 0.0

    def __post_init__(self) -> None:
        if self.window_size < 1:
            raise ConfigError(f"window_size must be >= 1, got {self.window_size}")
        if self.top_n < 1:
            raise ConfigError(f"top_n must be >= 1, got {self.top_n}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if self.hdp_weight_floor < 0:
            raise ConfigError("hdp_weight_floor must be >= 0")


@dataclass
class WindowCounts:
    """Boolean window occurrence statistics for a tracked word set.

    ``joint`` is keyed by unordered id pairs stored as (low, high).
    """

    n_windows: int
    occurrence: dict[int, int]
    joint: dict[tuple[int, int], int]
    tracked: frozenset[int]


@dataclass
class CoherenceResult:
    """Per-topic coherence values and their arithmetic mean."""

    topic_ids: list[int]
    per_topic: list[float]
    mean: float
    config: CoherenceConfig


def sliding_windows(
    tokens: Sequence[int], window_size: int
) -> Iterator[Sequence[int]]:
    """Step-1 windows over one document's token sequence.

    A non-empty document shorter than the window gives one window (the
    whole document); an empty document gives none.
    """
    n = len(tokens)
    if n == 0:
        return
    if n <= window_size:
        yield tokens
        return
    for start in range(n - window_size + 1):
        yield tokens[start : start + window_size]


def build_window_counts(
    corpus: Corpus, tracked: Iterable[int], window_size: int
) -> WindowCounts:
    """Count window occurrences and joint occurrences of tracked words."""
    tracked_set = frozenset(tracked)
    occurrence: dict[int, int] = {t: 0 for t in tracked_set}
    joint: dict[tuple[int, int], int] = {}
    n_windows = 0
    for seq in corpus.token_id_sequences:
        for window in sliding_windows(seq, window_size):
            n_windows += 1
            present = sorted(tracked_set.intersection(window))
            for w in present:
                occurrence[w] += 1
            for pair in combinations(present, 2):
                joint[pair] = joint.get(pair, 0) + 1
    return WindowCounts(
        n_windows=n_windows,
        occurrence=occurrence,
        joint=joint,
        tracked=tracked_set,
    )


def npmi(counts: WindowCounts, w1: int, w2: int, epsilon: float = 1e-12) -> float:
    """Normalized PMI of two tracked words from boolean window counts.

    The joint probability is floored at ``epsilon`` so the value stays
    defined (and in [-1, 1]) for pairs that never co-occur. A word pair
    that occurs in every window, like a word with itself, counts as
    perfect association (1.0).
    """
    for w in (w1, w2):
        if w not in counts.tracked:
            raise DataError(f"word id {w} is not tracked in these window counts")
        if counts.occurrence[w] == 0:
            raise DataError(f"word id {w} has zero window occurrences")
    if w1 == w2:
        return 1.0
    n = counts.n_windows
    p1 = counts.occurrence[w1] / n
    p2 = counts.occurrence[w2] / n
    key = (w1, w2) if w1 < w2 else (w2, w1)
    p_joint = max(counts.joint.get(key, 0) / n, epsilon)
    if p_joint >= 1.0:
        return 1.0
    return math.log(p_joint / (p1 * p2)) / -math.log(p_joint)


def topic_cv(
    word_ids: Sequence[int], counts: WindowCounts, config: CoherenceConfig
) -> float:
    """Coherence of one topic from its top words.

    Each word gets a context vector of NPMI values against every top
    word of the topic (self-entry 1); the topic score is the mean cosine
    between the word vectors and their elementwise sum. A zero vector
    contributes cosine 0.
    """
    words = list(word_ids)
    m = len(words)
    mat = np.ones((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            value = npmi(counts, words[i], words[j], config.epsilon)
            mat[i, j] = value
            mat[j, i] = value
    if config.gamma_exponent != 1.0:
        mat = mat ** config.gamma_exponent
    total = mat.sum(axis=0)
    total_norm = float(np.linalg.norm(total))
    cosines = np.zeros(m)
    for i in range(m):
        row_norm = float(np.linalg.norm(mat[i]))
        if row_norm == 0.0 or total_norm == 0.0:
            cosines[i] = 0.0
        else:
            cosines[i] = float(np.dot(mat[i], total) / (row_norm * total_norm))
    return float(np.mean(cosines))


def _topic_word_ids(
    model: Union[LdaModel, HdpModel], topic_id: int, corpus: Corpus, top_n: int
) -> list[int]:
    vocab = corpus.vocabulary
    ids = []
    for term in model.top_words(topic_id, top_n):
        tid = vocab.term_to_id.get(term)
        if tid is None:
            raise DataError(
                f"topic {topic_id} top word {term!r} is absent from the corpus "
                "vocabulary; the model was fitted against a different corpus"
            )
        ids.append(tid)
    return ids


def model_coherence(
    model: Union[LdaModel, HdpModel],
    corpus: Corpus,
    config: CoherenceConfig = CoherenceConfig(),
) -> CoherenceResult:
    """Mean coherence of a fitted model over the given corpus.

    For LDA the mean runs over its num_topics topics. For HDP it runs
    over every truncated topic whose corpus weight reaches
    ``hdp_weight_floor`` (all of them by default), independent of any
    top-K selection used elsewhere, so the value is a single constant
    for the model. Window counts are built once over the union of all
    involved topics' top words.
    """
    if isinstance(model, HdpModel):
        topic_ids = [
            tid for tid, w in model.topic_weights() if w >= config.hdp_weight_floor
        ]
    else:
        topic_ids = list(range(model.num_topics))
    per_topic_words = {
        tid: _topic_word_ids(model, tid, corpus, config.top_n) for tid in topic_ids
    }
    tracked: set[int] = set()
    for ids in per_topic_words.values():
        tracked.update(ids)
    counts = build_window_counts(corpus, tracked, config.window_size)
    per_topic = [topic_cv(per_topic_words[tid], counts, config) for tid in topic_ids]
    return CoherenceResult(
        topic_ids=topic_ids,
        per_topic=per_topic,
        mean=float(np.mean(per_topic)) if per_topic else 0.0,
        config=config,
    )
