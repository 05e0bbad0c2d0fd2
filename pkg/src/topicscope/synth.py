"""Synthetic corpora with planted topics.

Documents are drawn from the standard topic-mixture generative process:
topic-word rows from a symmetric Dirichlet, per-document mixtures from a
symmetric Dirichlet, Poisson lengths floored at one, and each token from
its sampled topic's word distribution. Every document is labeled with
the name of its dominant mixture component, which gives a ground-truth
label matrix for exercising the similarity and coverage metrics.

The generator emits RawDocuments (and the same CSV schema the ingestion
side reads), so synthetic data runs through the entire pipeline.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import RawDocument
from .errors import ConfigError, DataError


@dataclass(frozen=True)
class SynthConfig:
    num_topics: int
    vocab_size: int
    num_docs: int
    doc_len_mean: float = 60.0
    doc_topic_alpha: float = 0.1
    topic_concentration: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_topics < 1:
            raise ConfigError(f"num_topics must be >= 1, got {self.num_topics}")
        if self.vocab_size < self.num_topics:
            raise ConfigError(
                f"vocab_size ({self.vocab_size}) must be >= num_topics "
                f"({self.num_topics})"
            )
        if self.num_docs < 1:
            raise ConfigError(f"num_docs must be >= 1, got {self.num_docs}")
        if self.doc_len_mean <= 0:
            raise ConfigError(f"doc_len_mean must be > 0, got {self.doc_len_mean}")
        if self.doc_topic_alpha <= 0:
            raise ConfigError(f"doc_topic_alpha must be > 0, got {self.doc_topic_alpha}")
        if self.topic_concentration <= 0:
            raise ConfigError(
                f"topic_concentration must be > 0, got {self.topic_concentration}"
            )


@dataclass
class SynthCorpus:
    """Generated documents plus the ground truth that produced them."""

    documents: list[RawDocument]
    topic_word: np.ndarray
    doc_mixtures: np.ndarray
    doc_lengths: np.ndarray
    topic_names: list[str]
    terms: list[str]


@dataclass
class MatchResult:
    """Greedy topic matching: (estimated_row, true_row, cosine) triples."""

    pairs: list[tuple[int, int, float]]
    mean_cosine: float


def _term_name(i: int, width: int) -> str:
    return f"term{i:0{width}d}"


def generate(config: SynthConfig) -> SynthCorpus:
    """Draw a corpus from the planted generative process, seeded."""
    rng = np.random.default_rng(config.seed)
    k, v, d = config.num_topics, config.vocab_size, config.num_docs
    width = max(4, len(str(v - 1)))
    terms = [_term_name(i, width) for i in range(v)]
    topic_names = [f"topic{j:02d}" for j in range(k)]

    topic_word = rng.dirichlet(np.full(v, config.topic_concentration), size=k)
    doc_mixtures = rng.dirichlet(np.full(k, config.doc_topic_alpha), size=d)
    doc_lengths = np.maximum(rng.poisson(config.doc_len_mean, size=d), 1)

    documents: list[RawDocument] = []
    for i in range(d):
        length = int(doc_lengths[i])
        assignments = rng.choice(k, size=length, p=doc_mixtures[i])
        token_ids = np.empty(length, dtype=np.int64)
        for topic in np.unique(assignments):
            mask = assignments == topic
            token_ids[mask] = rng.choice(v, size=int(mask.sum()), p=topic_word[topic])
        text = " ".join(terms[t] for t in token_ids)
        label = topic_names[int(np.argmax(doc_mixtures[i]))]
        documents.append(
            RawDocument(id=f"doc{i:05d}", text=text, labels={label}, group=None)
        )
    return SynthCorpus(
        documents=documents,
        topic_word=topic_word,
        doc_mixtures=doc_mixtures,
        doc_lengths=doc_lengths,
        topic_names=topic_names,
        terms=terms,
    )


def match_topics(estimated: np.ndarray, true: np.ndarray) -> MatchResult:
    """Greedily pair estimated rows with true rows by maximal cosine.

    Repeatedly takes the highest-cosine pair among unassigned rows
    (row-major order breaks ties) until one side is exhausted. Rows with
    zero norm have cosine 0 against everything.
    """
    if estimated.shape[1] != true.shape[1]:
        raise DataError(
            f"vocabulary mismatch: estimated has {estimated.shape[1]} terms, "
            f"true has {true.shape[1]}"
        )
    est_norms = np.linalg.norm(estimated, axis=1)
    true_norms = np.linalg.norm(true, axis=1)
    est_hat = estimated / np.where(est_norms == 0.0, 1.0, est_norms)[:, np.newaxis]
    true_hat = true / np.where(true_norms == 0.0, 1.0, true_norms)[:, np.newaxis]
    cosines = est_hat @ true_hat.T

    n_pairs = min(estimated.shape[0], true.shape[0])
    remaining = cosines.copy()
    pairs: list[tuple[int, int, float]] = []
    for _ in range(n_pairs):
        flat = int(np.argmax(remaining))
        i, j = divmod(flat, remaining.shape[1])
        pairs.append((i, j, float(cosines[i, j])))
        remaining[i, :] = -np.inf
        remaining[:, j] = -np.inf
    mean = float(np.mean([c for _, _, c in pairs])) if pairs else 0.0
    return MatchResult(pairs=pairs, mean_cosine=mean)


def write_corpus_csv(documents: list[RawDocument], path: str | Path) -> None:
    """Write documents in the ingestion CSV schema (id,text,labels,group)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "text", "labels", "group"])
        for doc in documents:
            writer.writerow(
                [doc.id, doc.text, ";".join(sorted(doc.labels)), doc.group or ""]
            )
