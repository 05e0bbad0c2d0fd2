"""Topic-against-label evaluation: similarity and coverage.

Documents are described twice: by their inferred topic proportions (a
dense D x T matrix) and by their binary label occurrences (D x C). The
similarity score averages all pairwise column similarities between the
two descriptions; coverage asks how many distinct topics win the
per-label best-topic contest.

Columns are L2-normalized before the similarity sum by default, which
makes every entry of the cross product a true cosine and bounds the
score in [0, 1]. The unnormalized sum of raw inner products is available
behind ``normalization="raw"`` for comparison.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .corpus import Corpus, RawDocument
from .errors import ConfigError, DataError
from .hdp import HdpModel
from .lda import LdaModel


@dataclass
class LabelMatrix:
    """Binary document-label occurrence with a sorted label universe."""

    values: np.ndarray
    labels: list[str]


@dataclass
class DocTopicMatrix:
    """Per-document topic proportions; columns identified by topic id."""

    values: np.ndarray
    topic_ids: list[int]


@dataclass
class CoverageResult:
    """Per-label winning topic and the distinct-topic count.

    ``chosen`` maps label name to the winning topic's column index, or
    None for a label that occurs in no document. ``cov_ratio`` divides by
    the number of labels that actually occur.
    """

    chosen: dict[str, Optional[int]]
    covered_topics: int
    cov_ratio: float


def build_label_matrix(
    raw_docs: Sequence[RawDocument],
    label_universe: Optional[Sequence[str]] = None,
) -> LabelMatrix:
    """Binary D x C matrix; columns are the sorted label universe."""
    if label_universe is None:
        universe = sorted({label for doc in raw_docs for label in doc.labels})
    else:
        universe = sorted(label_universe)
    col = {label: i for i, label in enumerate(universe)}
    values = np.zeros((len(raw_docs), len(universe)))
    for d, doc in enumerate(raw_docs):
        for label in doc.labels:
            if label not in col:
                raise DataError(
                    f"document {doc.id!r} carries label {label!r} outside the "
                    "supplied label universe"
                )
            values[d, col[label]] = 1.0
    return LabelMatrix(values=values, labels=universe)


def project_hdp_matrix(
    model: HdpModel, full_rows: np.ndarray, k: int
) -> DocTopicMatrix:
    """Restrict full-truncation HDP rows to the top-k topics by weight.

    Columns follow the weight order of ``top_k_projection``; rows are
    renormalized over the selected topics, and a row with no mass on
    them stays all zero. ``full_rows`` is D x max_topics, one
    ``infer_doc_topics`` result per document.
    """
    _, ids = model.top_k_projection(k)
    rows = full_rows[:, ids].copy()
    sums = rows.sum(axis=1)
    nonzero = sums > 0
    rows[nonzero] = rows[nonzero] / sums[nonzero][:, np.newaxis]
    return DocTopicMatrix(values=rows, topic_ids=ids)


def build_doc_topic_matrix(
    model: Union[LdaModel, HdpModel],
    corpus: Corpus,
    k: Optional[int] = None,
) -> DocTopicMatrix:
    """Infer the D x T matrix of document-topic proportions.

    For an HDP model with ``k`` given, columns are restricted to the top-k
    topics by corpus weight (in weight order) and rows renormalized over
    them; a row with no mass on the selected topics stays all zero.
    """
    rows = np.vstack([model.infer_doc_topics(doc) for doc in corpus.documents])
    if isinstance(model, HdpModel):
        return project_hdp_matrix(model, rows, model.max_topics if k is None else k)
    if k is not None and k != model.num_topics:
        raise ConfigError(
            f"k={k} does not match the LDA model's {model.num_topics} topics"
        )
    return DocTopicMatrix(values=rows, topic_ids=list(range(model.num_topics)))


def _normalize_columns(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=0)
    safe = np.where(norms == 0.0, 1.0, norms)
    return matrix / safe


def mean_cosine_similarity(
    doc_topic: np.ndarray,
    labels: np.ndarray,
    normalization: str = "cosine",
) -> float:
    """Mean of all pairwise column similarities between the two matrices.

    With ``normalization="cosine"`` (default) each column of both
    matrices is L2-normalized first and all-zero columns stay zero, so
    the result lies in [0, 1] for nonnegative inputs. With "raw" the
    plain inner products are averaged, unbounded.
    """
    if normalization not in ("cosine", "raw"):
        raise ConfigError(f"unknown normalization {normalization!r}")
    if doc_topic.shape[0] != labels.shape[0]:
        raise DataError(
            f"document count mismatch: {doc_topic.shape[0]} topic rows vs "
            f"{labels.shape[0]} label rows"
        )
    n_topics = doc_topic.shape[1]
    n_labels = labels.shape[1]
    if n_topics == 0 or n_labels == 0:
        raise DataError("similarity needs at least one topic and one label column")
    if normalization == "cosine":
        doc_topic = _normalize_columns(doc_topic)
        labels = _normalize_columns(labels)
    return float((doc_topic.T @ labels).sum() / (n_labels * n_topics))


def coverage(
    doc_topic: np.ndarray,
    labels: np.ndarray,
    label_names: Optional[Sequence[str]] = None,
) -> CoverageResult:
    """Assign each label its most similar topic and count distinct winners.

    Similarity is the column cosine; ties go to the lowest topic index.
    Labels occurring in no document get no topic, are excluded from the
    ratio's denominator, and trigger a warning.
    """
    if doc_topic.shape[0] != labels.shape[0]:
        raise DataError(
            f"document count mismatch: {doc_topic.shape[0]} topic rows vs "
            f"{labels.shape[0]} label rows"
        )
    n_topics = doc_topic.shape[1]
    n_labels = labels.shape[1]
    if n_topics == 0 or n_labels == 0:
        raise DataError("coverage needs at least one topic and one label column")
    if label_names is None:
        label_names = [f"label_{j}" for j in range(n_labels)]
    elif len(label_names) != n_labels:
        raise DataError("label_names length does not match label column count")

    topic_hat = _normalize_columns(doc_topic)
    label_hat = _normalize_columns(labels)
    cosines = topic_hat.T @ label_hat

    chosen: dict[str, Optional[int]] = {}
    winners: set[int] = set()
    effective_labels = 0
    for j, name in enumerate(label_names):
        if not np.any(labels[:, j]):
            warnings.warn(
                f"label {name!r} occurs in no document and is excluded from "
                "the coverage ratio",
                stacklevel=2,
            )
            chosen[name] = None
            continue
        effective_labels += 1
        winner = int(np.argmax(cosines[:, j]))
        chosen[name] = winner
        winners.add(winner)
    cov = len(winners)
    ratio = cov / effective_labels if effective_labels else 0.0
    return CoverageResult(chosen=chosen, covered_topics=cov, cov_ratio=ratio)


def export_matrix_csv(
    values: np.ndarray,
    row_ids: Sequence[str],
    col_names: Sequence[str],
    path: str | Path,
) -> None:
    """Write a matrix as CSV with document ids as the first column."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["doc_id", *col_names])
        for rid, row in zip(row_ids, values):
            writer.writerow([rid, *[repr(float(v)) for v in row]])
