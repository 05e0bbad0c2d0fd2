"""Corpus ingestion and preprocessing.

Turns raw documents into a token pipeline (lowercase, punctuation split,
stopword and geographic-word removal, collocation bigrams) and from there
into a shared vocabulary with sparse bag-of-words counts. The retained
token sequences are kept on the corpus because the coherence module
computes its sliding-window statistics over exactly the same pipeline
output the models are trained on.

Documents that end up empty after preprocessing are kept (with zero
counts) so document rows stay aligned with label rows downstream.
"""

from __future__ import annotations

import csv
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import ConfigError, DataError

_SPLIT_RE = re.compile(r"[^a-z0-9]+")


@dataclass
class RawDocument:
    """One input document: id, full text, optional labels and group key."""

    id: str
    text: str
    labels: set[str] = field(default_factory=set)
    group: Optional[str] = None


@dataclass
class PreprocessConfig:
    """Settings for the tokenize / filter / bigram pipeline.

    All stored terms are normalized to lowercase. ``bigram_mode`` selects
    whether detected collocations are appended after the unigrams
    ("append", the default) or fused in place of them ("replace").
    """

    stopwords: set[str] = field(default_factory=set)
    geo_words: set[str] = field(default_factory=set)
    min_token_len: int = 2
    bigram_min_count: int = 5
    bigram_threshold: float = 10.0
    bigram_mode: str = "append"

    def __post_init__(self) -> None:
        if self.min_token_len < 1:
            raise ConfigError(f"min_token_len must be >= 1, got {self.min_token_len}")
        if self.bigram_min_count < 1:
            raise ConfigError(
                f"bigram_min_count must be >= 1, got {self.bigram_min_count}"
            )
        if self.bigram_threshold < 0:
            raise ConfigError(
                f"bigram_threshold must be >= 0, got {self.bigram_threshold}"
            )
        if self.bigram_mode not in ("append", "replace"):
            raise ConfigError(
                f"bigram_mode must be 'append' or 'replace', got {self.bigram_mode!r}"
            )
        self.stopwords = {w.lower() for w in self.stopwords}
        self.geo_words = {w.lower() for w in self.geo_words}


@dataclass
class Vocabulary:
    """Bijective term <-> dense id mapping plus per-term frequencies."""

    id_to_term: list[str]
    term_to_id: dict[str, int]
    doc_freq: list[int]
    collection_freq: list[int]

    def __len__(self) -> int:
        return len(self.id_to_term)

    def encode_tokens(self, tokens: Sequence[str]) -> tuple[dict[int, int], int]:
        """Count tokens against this vocabulary.

        Returns (term_id -> count, number of out-of-vocabulary tokens
        dropped).
        """
        counts: dict[int, int] = {}
        dropped = 0
        for tok in tokens:
            tid = self.term_to_id.get(tok)
            if tid is None:
                dropped += 1
            else:
                counts[tid] = counts.get(tid, 0) + 1
        return counts, dropped


@dataclass
class BowDocument:
    """Sparse term counts for one document. No zero counts are stored."""

    doc_id: str
    counts: dict[int, int]
    token_total: int


@dataclass
class Corpus:
    """Preprocessed collection: vocabulary, bag-of-words docs, sequences.

    ``token_id_sequences`` holds the full post-preprocessing token stream
    of each document (as term ids, in order), which the coherence module
    slides its windows over. ``groups`` keeps the optional per-document
    group key for grouped statistics. A built corpus is immutable by
    convention and safe to share across threads.
    """

    vocabulary: Vocabulary
    documents: list[BowDocument]
    token_id_sequences: list[list[int]]
    doc_ids: list[str]
    groups: list[Optional[str]]

    @property
    def num_docs(self) -> int:
        return len(self.documents)


@dataclass
class GroupStats:
    doc_count: int
    tokens_mean: float
    tokens_std: float


@dataclass
class CorpusStats:
    """Corpus summary: sizes and token-count moments.

    ``vocab_size`` counts distinct retained terms; ``total_tokens`` counts
    all retained token occurrences. Both are reported because summary
    tables in the wild disagree about which one "vocabulary size" means.
    ``tokens_std`` is the population standard deviation.
    """

    doc_count: int
    vocab_size: int
    total_tokens: int
    tokens_mean: float
    tokens_std: float
    per_group: Optional[dict[str, GroupStats]] = None


def tokenize(text: str, config: PreprocessConfig) -> list[str]:
    """Lowercase and split on non-alphanumeric characters.

    Tokens shorter than ``min_token_len`` and purely numeric tokens are
    dropped. Empty text gives an empty list.
    """
    tokens = [t for t in _SPLIT_RE.split(text.lower()) if t]
    return [
        t for t in tokens if len(t) >= config.min_token_len and not t.isdigit()
    ]


def remove_filtered(tokens: Sequence[str], config: PreprocessConfig) -> list[str]:
    """Drop stopwords and geographic words, preserving order."""
    drop = config.stopwords
    geo = config.geo_words
    return [t for t in tokens if t not in drop and t not in geo]


def detect_bigrams(
    token_streams: Iterable[Sequence[str]],
    min_count: int,
    threshold: float,
) -> dict[tuple[str, str], float]:
    """Find collocation pairs across already-filtered token streams.

    A pair (a, b) is admitted when it appears adjacently at least
    ``min_count`` times and its score

        (count(a, b) - min_count) * n_unique_terms / (count(a) * count(b))

    reaches ``threshold``. Returns admitted pairs with their scores.
    """
    unigram: Counter[str] = Counter()
    pair: Counter[tuple[str, str]] = Counter()
    for stream in token_streams:
        unigram.update(stream)
        pair.update(zip(stream, stream[1:]))
    n_unique = len(unigram)
    admitted: dict[tuple[str, str], float] = {}
    for (a, b), cnt in pair.items():
        if cnt < min_count:
            continue
        score = (cnt - min_count) * n_unique / (unigram[a] * unigram[b])
        if score >= threshold:
            admitted[(a, b)] = score
    return admitted


def apply_bigrams(
    tokens: Sequence[str],
    phrase_table: dict[tuple[str, str], float],
    mode: str = "append",
) -> list[str]:
    """Join admitted adjacent pairs into ``a_b`` tokens.

    The scan is greedy left-to-right and non-overlapping. In "append"
    mode the joined tokens go at the end of the list and the unigrams
    are retained; in "replace" mode the joined token takes the place of
    its two constituents.
    """
    if mode not in ("append", "replace"):
        raise ConfigError(f"unknown bigram mode {mode!r}")
    joined: list[str] = []
    replaced: list[str] = []
    i = 0
    n = len(tokens)
    while i < n:
        if i + 1 < n and (tokens[i], tokens[i + 1]) in phrase_table:
            joined.append(f"{tokens[i]}_{tokens[i + 1]}")
            replaced.append(f"{tokens[i]}_{tokens[i + 1]}")
            i += 2
        else:
            replaced.append(tokens[i])
            i += 1
    if mode == "append":
        return list(tokens) + joined
    return replaced


def preprocess_text(text: str, config: PreprocessConfig) -> list[str]:
    """Tokenize and filter one document (no bigram stage)."""
    return remove_filtered(tokenize(text, config), config)


def build_corpus(raw_docs: Sequence[RawDocument], config: PreprocessConfig) -> Corpus:
    """Run the full pipeline and assemble vocabulary plus bag-of-words.

    Vocabulary ids follow first occurrence across the corpus, so the
    result is deterministic for identical inputs. Duplicate document ids
    raise DataError.
    """
    seen_ids: set[str] = set()
    for doc in raw_docs:
        if doc.id in seen_ids:
            raise DataError(f"duplicate document id: {doc.id!r}")
        seen_ids.add(doc.id)

    filtered = [preprocess_text(doc.text, config) for doc in raw_docs]
    table = detect_bigrams(filtered, config.bigram_min_count, config.bigram_threshold)
    sequences = [apply_bigrams(toks, table, config.bigram_mode) for toks in filtered]

    term_to_id: dict[str, int] = {}
    id_to_term: list[str] = []
    for seq in sequences:
        for tok in seq:
            if tok not in term_to_id:
                term_to_id[tok] = len(id_to_term)
                id_to_term.append(tok)

    collection_freq = [0] * len(id_to_term)
    doc_freq = [0] * len(id_to_term)
    documents: list[BowDocument] = []
    id_sequences: list[list[int]] = []
    for doc, seq in zip(raw_docs, sequences):
        ids = [term_to_id[tok] for tok in seq]
        id_sequences.append(ids)
        counts = Counter(ids)
        for tid, cnt in counts.items():
            collection_freq[tid] += cnt
            doc_freq[tid] += 1
        documents.append(
            BowDocument(doc_id=doc.id, counts=dict(counts), token_total=len(ids))
        )

    vocab = Vocabulary(
        id_to_term=id_to_term,
        term_to_id=term_to_id,
        doc_freq=doc_freq,
        collection_freq=collection_freq,
    )
    return Corpus(
        vocabulary=vocab,
        documents=documents,
        token_id_sequences=id_sequences,
        doc_ids=[doc.id for doc in raw_docs],
        groups=[doc.group for doc in raw_docs],
    )


def _moments(values: Sequence[int]) -> tuple[float, float]:
    # Population standard deviation (denominator n).
    n = len(values)
    if n == 0:
        return 0.0, 0.0
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, math.sqrt(var)


def corpus_stats(corpus: Corpus, group_by: bool = False) -> CorpusStats:
    """Summarize a corpus; token moments are over post-preprocessing totals."""
    totals = [doc.token_total for doc in corpus.documents]
    mean, std = _moments(totals)
    per_group: Optional[dict[str, GroupStats]] = None
    if group_by:
        per_group = {}
        buckets: dict[str, list[int]] = {}
        for group, total in zip(corpus.groups, totals):
            if group is None:
                continue
            buckets.setdefault(group, []).append(total)
        for group in sorted(buckets):
            gmean, gstd = _moments(buckets[group])
            per_group[group] = GroupStats(
                doc_count=len(buckets[group]), tokens_mean=gmean, tokens_std=gstd
            )
    return CorpusStats(
        doc_count=corpus.num_docs,
        vocab_size=len(corpus.vocabulary),
        total_tokens=sum(totals),
        tokens_mean=mean,
        tokens_std=std,
        per_group=per_group,
    )


def read_documents_csv(path: str | Path) -> list[RawDocument]:
    """Read the ingestion CSV: header ``id,text,labels,group``.

    The labels field is a ``;``-separated list of label names; labels and
    group may be empty or absent. Malformed rows raise DataError with the
    offending row number.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    docs: list[RawDocument] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "id" not in reader.fieldnames or "text" not in reader.fieldnames:
            raise DataError(
                f"{path}: header must contain 'id' and 'text' columns, "
                f"got {reader.fieldnames}"
            )
        for row in reader:
            if row.get("id") is None or row.get("text") is None:
                raise DataError(f"{path}: malformed row {reader.line_num}")
            labels_field = row.get("labels") or ""
            labels = {l.strip() for l in labels_field.split(";") if l.strip()}
            group = row.get("group") or None
            docs.append(
                RawDocument(id=row["id"], text=row["text"], labels=labels, group=group)
            )
    return docs


def read_wordlist(path: str | Path) -> set[str]:
    """Read a plain-text word list, one lowercase term per line."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"word list not found: {path}")
    words: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            term = line.strip().lower()
            if term:
                words.add(term)
    return words
