"""Hierarchical Dirichlet Process topic model, truncated stick-breaking.

The model is the usual two-level construction: a corpus-level stick
process over at most ``max_topics`` topics, and a document-level stick
process over at most ``doc_max_topics`` slots per document. Fitting is
online variational with one deliberate twist: the assignment of each
document-level slot to a corpus topic is a hard (MAP) choice, argmax of
the slot's expected log joint, with ties broken toward the lowest topic
id. Word-to-slot responsibilities and both stick posteriors stay
mean-field. Hard slot assignment keeps the fit deterministic and makes
mass actually concentrate on the topics in use instead of smearing over
the whole truncation, including in degenerate corpora where the word
likelihood alone cannot distinguish topics.

The model infers its own effective topic count through the fitted
corpus-level sticks; ``topic_weights`` ranks topics by expected corpus
proportion and ``top_k_projection`` exposes the leading K of them as an
LDA-like topic-word matrix.

Per-document inference reuses the LDA E-step against the stick-derived
prior ``alpha0 * topic_weights``, the standard flattening of a fitted
HDP into an equivalent LDA view.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import psi

from .corpus import BowDocument, Corpus
from .errors import ConfigError, DataError
from .lda import _as_arrays, _doc_e_step, dirichlet_expectation


def expect_log_sticks(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """E[log pi] for stick proportions with Beta(a_k, b_k) sticks.

    Input arrays have length n_sticks; the returned vector has length
    n_sticks + 1, the last entry being the leftover stick.
    """
    dig_sum = psi(a + b)
    elog_w = psi(a) - dig_sum
    elog_1w = psi(b) - dig_sum
    n = len(a) + 1
    elog_pi = np.zeros(n)
    elog_pi[: n - 1] = elog_w
    elog_pi[1:] += np.cumsum(elog_1w)
    return elog_pi


def expected_stick_weights(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """E[pi] for the same construction, summing exactly to one."""
    n = len(a) + 1
    frac = a / (a + b)
    weights = np.zeros(n)
    remaining = 1.0
    for k in range(n - 1):
        weights[k] = frac[k] * remaining
        remaining *= 1.0 - frac[k]
    weights[n - 1] = remaining
    return weights


@dataclass(frozen=True)
class HdpConfig:
    """Hyperparameters for an HDP fit.

    ``gamma`` is the corpus-level concentration, ``alpha0`` the
    document-level one, ``eta`` the topic-word prior. ``max_topics`` and
    ``doc_max_topics`` are the two truncation levels.
    """

    max_topics: int = 150
    doc_max_topics: int = 15
    gamma: float = 1.0
    alpha0: float = 1.0
    eta: float = 0.01
    tau0: float = 64.0
    kappa: float = 0.6
    passes: int = 10
    minibatch_size: int = 256
    e_step_max_iters: int = 100
    e_step_tol: float = 1e-3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_topics < 1:
            raise ConfigError(f"max_topics must be >= 1, got {self.max_topics}")
        if self.doc_max_topics < 1:
            raise ConfigError(
                f"doc_max_topics must be >= 1, got {self.doc_max_topics}"
            )
        if self.doc_max_topics > self.max_topics:
            raise ConfigError(
                f"doc_max_topics ({self.doc_max_topics}) must not exceed "
                f"max_topics ({self.max_topics})"
            )
        for name in ("gamma", "alpha0", "eta"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.tau0 < 0:
            raise ConfigError(f"tau0 must be >= 0, got {self.tau0}")
        if not (0.5 < self.kappa <= 1.0):
            raise ConfigError(f"kappa must be in (0.5, 1], got {self.kappa}")
        if self.passes < 1:
            raise ConfigError(f"passes must be >= 1, got {self.passes}")
        if self.minibatch_size < 1:
            raise ConfigError(f"minibatch_size must be >= 1, got {self.minibatch_size}")


class HdpModel:
    """Fitted HDP: topic-word parameters plus corpus-level sticks.

    Like LdaModel, a fitted instance is immutable and safe for
    concurrent inference.
    """

    kind = "hdp"

    def __init__(
        self,
        config: HdpConfig,
        lam: np.ndarray,
        stick_a: np.ndarray,
        stick_b: np.ndarray,
        table_mass: np.ndarray,
        terms: Sequence[str],
        population_size: int,
        update_count: int = 0,
    ) -> None:
        self.config = config
        self.lam = lam
        self.stick_a = stick_a
        self.stick_b = stick_b
        self.table_mass = table_mass
        self.terms = list(terms)
        self.population_size = population_size
        self.update_count = update_count

    @property
    def max_topics(self) -> int:
        return self.config.max_topics

    @property
    def vocab_size(self) -> int:
        return self.lam.shape[1]

    def topic_word(self) -> np.ndarray:
        """Row-normalized expected topic-word distributions."""
        return self.lam / self.lam.sum(axis=1)[:, np.newaxis]

    def weights_vector(self) -> np.ndarray:
        """Expected corpus topic proportions in topic-id order, sum 1."""
        if self.max_topics == 1:
            return np.ones(1)
        weights = expected_stick_weights(self.stick_a, self.stick_b)
        return weights / weights.sum()

    def topic_weights(self) -> list[tuple[int, float]]:
        """(topic_id, weight) pairs sorted by descending weight.

        Ties break toward the lower topic id; weights are renormalized
        to sum to one.
        """
        weights = self.weights_vector()
        order = np.argsort(-weights, kind="stable")
        return [(int(k), float(weights[k])) for k in order]

    def top_k_projection(self, k: int) -> tuple[np.ndarray, list[int]]:
        """Topic-word rows of the k highest-weight topics, in weight order."""
        if not 1 <= k <= self.max_topics:
            raise ConfigError(
                f"k must be in [1, {self.max_topics}], got {k}"
            )
        ids = [tid for tid, _ in self.topic_weights()[:k]]
        return self.topic_word()[ids], ids

    def top_words(self, topic_id: int, n: int = 10) -> list[str]:
        """The n most probable terms of one topic, ties by ascending id."""
        if not 0 <= topic_id < self.max_topics:
            raise ConfigError(
                f"topic_id {topic_id} out of range for {self.max_topics} topics"
            )
        row = self.topic_word()[topic_id]
        order = np.argsort(-row, kind="stable")[:n]
        return [self.terms[i] for i in order]

    def infer_doc_topics(self, bow: BowDocument) -> np.ndarray:
        """Document-topic proportions over all truncated topics.

        Runs the LDA-style E-step with topics frozen and the prior set to
        alpha0 * topic_weights, so an empty document comes back exactly
        proportional to the corpus-level weights.
        """
        ids, cts = _as_arrays(bow)
        if len(ids) > 0 and ids[-1] >= self.vocab_size:
            raise DataError(
                f"document {bow.doc_id!r} has term id {int(ids[-1])} outside "
                f"vocabulary of size {self.vocab_size}"
            )
        alpha = self.config.alpha0 * self.weights_vector()
        gamma, _ = _doc_e_step(
            ids,
            cts,
            alpha,
            np.exp(dirichlet_expectation(self.lam)),
            self.config.e_step_max_iters,
            self.config.e_step_tol,
        )
        return gamma / gamma.sum()


def _doc_slot_e_step(
    ids: np.ndarray,
    cts: np.ndarray,
    elog_beta: np.ndarray,
    elog_pi_corpus: np.ndarray,
    config: HdpConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """E-step for one document under the two-level truncation.

    Returns (slot_topics, phi): the hard corpus-topic choice of each of
    the ``doc_max_topics`` slots, and the word-to-slot responsibilities
    (slots x unique words). np.argmax resolves ties to the lowest id.
    """
    n_slots = config.doc_max_topics
    if len(ids) == 0:
        slot = int(np.argmax(elog_pi_corpus))
        return np.full(n_slots, slot, dtype=np.int64), np.zeros((n_slots, 0))

    elb_doc = elog_beta[:, ids]
    doc_score = elb_doc @ cts
    slots = np.full(n_slots, int(np.argmax(doc_score + elog_pi_corpus)), dtype=np.int64)

    # Document sticks start at their prior.
    a_doc = np.ones(max(n_slots - 1, 0))
    b_doc = np.full(max(n_slots - 1, 0), config.alpha0)
    elog_pi_doc = (
        expect_log_sticks(a_doc, b_doc) if n_slots > 1 else np.zeros(1)
    )

    log_phi = elog_pi_doc[:, np.newaxis] + elb_doc[slots]
    log_phi -= log_phi.max(axis=0)
    phi = np.exp(log_phi)
    phi /= phi.sum(axis=0)

    for _ in range(config.e_step_max_iters):
        last_phi = phi
        last_slots = slots

        # Document sticks from the per-slot word mass.
        if n_slots > 1:
            slot_mass = phi @ cts
            a_doc = 1.0 + slot_mass[:-1]
            b_doc = config.alpha0 + np.flip(np.cumsum(np.flip(slot_mass[1:])))
            elog_pi_doc = expect_log_sticks(a_doc, b_doc)

        # Hard slot-to-topic assignment: argmax of expected log joint.
        slot_scores = (phi * cts) @ elb_doc.T + elog_pi_corpus[np.newaxis, :]
        slots = np.argmax(slot_scores, axis=1)

        # Word responsibilities over slots.
        log_phi = elog_pi_doc[:, np.newaxis] + elb_doc[slots]
        log_phi -= log_phi.max(axis=0)
        phi = np.exp(log_phi)
        phi /= phi.sum(axis=0)

        if np.array_equal(slots, last_slots) and np.mean(
            np.abs(phi - last_phi)
        ) < config.e_step_tol:
            break
    return slots, phi


def fit(corpus: Corpus, config: HdpConfig) -> HdpModel:
    """Fit the truncated HDP with online variational updates."""
    vocab_size = len(corpus.vocabulary)
    if vocab_size == 0:
        raise ConfigError("cannot fit on an empty vocabulary")
    num_docs = corpus.num_docs
    if num_docs == 0:
        raise ConfigError("cannot fit on an empty corpus")

    rng = np.random.default_rng(config.seed)
    n_topics = config.max_topics
    lam = rng.gamma(100.0, 1.0 / 100.0, (n_topics, vocab_size))
    n_sticks = max(n_topics - 1, 0)
    stick_a = np.ones(n_sticks)
    stick_b = np.full(n_sticks, config.gamma)
    table_mass = np.zeros(n_topics)

    encoded = [_as_arrays(doc) for doc in corpus.documents]
    update_count = 0

    for _ in range(config.passes):
        for start in range(0, num_docs, config.minibatch_size):
            batch = encoded[start : start + config.minibatch_size]
            elog_beta = dirichlet_expectation(lam)
            elog_pi = (
                expect_log_sticks(stick_a, stick_b) if n_sticks else np.zeros(1)
            )

            ss_lambda = np.zeros_like(lam)
            ss_tables = np.zeros(n_topics)
            for ids, cts in batch:
                slots, phi = _doc_slot_e_step(ids, cts, elog_beta, elog_pi, config)
                np.add.at(ss_tables, slots, 1.0)
                if len(ids) > 0:
                    weighted = phi * cts
                    for t in range(config.doc_max_topics):
                        ss_lambda[slots[t], ids] += weighted[t]

            rho = (config.tau0 + update_count) ** -config.kappa
            scale = num_docs / len(batch)
            lam = (1 - rho) * lam + rho * (config.eta + scale * ss_lambda)
            table_mass = (1 - rho) * table_mass + rho * scale * ss_tables
            if n_sticks:
                stick_a = 1.0 + table_mass[:-1]
                stick_b = config.gamma + np.flip(np.cumsum(np.flip(table_mass[1:])))
            update_count += 1

    return HdpModel(
        config=config,
        lam=lam,
        stick_a=stick_a,
        stick_b=stick_b,
        table_mass=table_mass,
        terms=corpus.vocabulary.id_to_term,
        population_size=num_docs,
        update_count=update_count,
    )
