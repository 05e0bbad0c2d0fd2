"""Latent Dirichlet Allocation fitted by online variational Bayes.

The fitting loop follows the standard online scheme: for each minibatch,
a per-document E-step runs coordinate ascent on the document-topic
parameters gamma (with the token responsibilities phi kept implicit),
and the M-step blends the resulting sufficient statistics into the
topic-word parameter matrix with step size rho_t = (tau0 + t) ** -kappa.

Everything is deterministic given (corpus, config): the only randomness
is the seeded initialization of the topic-word parameters, documents are
visited in corpus order, and the E-step initializes gamma uniformly.

``batch_mode`` turns the schedule off (rho = 1, one minibatch per pass),
which makes the fit exact batch VB; in that mode the evidence lower
bound is recorded once per pass in ``elbo_trace``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.special import gammaln, psi

from .corpus import BowDocument, Corpus
from .errors import ConfigError, DataError


def dirichlet_expectation(alpha: np.ndarray) -> np.ndarray:
    """E[log theta] for theta ~ Dirichlet(alpha), row-wise for matrices."""
    if alpha.ndim == 1:
        return psi(alpha) - psi(np.sum(alpha))
    return psi(alpha) - psi(np.sum(alpha, axis=1))[:, np.newaxis]


@dataclass(frozen=True)
class LdaConfig:
    """Hyperparameters for an LDA fit.

    alpha and eta are the symmetric document-topic and topic-word priors;
    both default to 1 / num_topics when left unset. kappa must lie in
    (0.5, 1] so the online schedule satisfies the usual step-size
    conditions.
    """

    num_topics: int
    alpha: Optional[float] = None
    eta: Optional[float] = None
    passes: int = 10
    minibatch_size: int = 256
    tau0: float = 1.0
    kappa: float = 0.7
    batch_mode: bool = False
    e_step_max_iters: int = 100
    e_step_tol: float = 1e-3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_topics < 1:
            raise ConfigError(f"num_topics must be >= 1, got {self.num_topics}")
        if self.alpha is not None and self.alpha <= 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        if self.eta is not None and self.eta <= 0:
            raise ConfigError(f"eta must be > 0, got {self.eta}")
        if self.passes < 1:
            raise ConfigError(f"passes must be >= 1, got {self.passes}")
        if self.minibatch_size < 1:
            raise ConfigError(f"minibatch_size must be >= 1, got {self.minibatch_size}")
        if self.tau0 < 0:
            raise ConfigError(f"tau0 must be >= 0, got {self.tau0}")
        if not (0.5 < self.kappa <= 1.0):
            raise ConfigError(f"kappa must be in (0.5, 1], got {self.kappa}")
        if self.e_step_max_iters < 1:
            raise ConfigError("e_step_max_iters must be >= 1")
        if self.e_step_tol <= 0:
            raise ConfigError("e_step_tol must be > 0")

    @property
    def resolved_alpha(self) -> float:
        return self.alpha if self.alpha is not None else 1.0 / self.num_topics

    @property
    def resolved_eta(self) -> float:
        return self.eta if self.eta is not None else 1.0 / self.num_topics


def _doc_e_step(
    ids: np.ndarray,
    cts: np.ndarray,
    alpha: np.ndarray,
    exp_elog_beta: np.ndarray,
    max_iters: int,
    tol: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Coordinate ascent for one document with the topics frozen.

    Returns (gamma, cts / phinorm); the latter is what the caller needs
    to accumulate sufficient statistics. ``alpha`` is a full-length prior
    vector, which lets the HDP reuse this with its stick-derived prior.
    """
    num_topics = exp_elog_beta.shape[0]
    gamma = alpha + cts.sum() / num_topics
    if len(ids) == 0:
        return gamma, cts
    exp_elog_theta = np.exp(dirichlet_expectation(gamma))
    beta_doc = exp_elog_beta[:, ids]
    phinorm = exp_elog_theta @ beta_doc + 1e-100
    for _ in range(max_iters):
        last_gamma = gamma
        # Implicit-phi update: substituting the optimal phi into the
        # gamma update collapses the two coordinate steps into one.
        gamma = alpha + exp_elog_theta * ((cts / phinorm) @ beta_doc.T)
        exp_elog_theta = np.exp(dirichlet_expectation(gamma))
        phinorm = exp_elog_theta @ beta_doc + 1e-100
        if np.mean(np.abs(gamma - last_gamma)) < tol:
            break
    return gamma, cts / phinorm


def _as_arrays(doc: BowDocument) -> tuple[np.ndarray, np.ndarray]:
    ids = np.fromiter(doc.counts.keys(), dtype=np.int64, count=len(doc.counts))
    cts = np.fromiter(doc.counts.values(), dtype=np.float64, count=len(doc.counts))
    order = np.argsort(ids)
    return ids[order], cts[order]


class LdaModel:
    """Fitted LDA: topic-word variational parameters plus the vocabulary.

    The model is immutable for inference purposes; ``update`` is the only
    mutating operation and must not run concurrently with anything else.
    """

    kind = "lda"

    def __init__(
        self,
        config: LdaConfig,
        lam: np.ndarray,
        terms: Sequence[str],
        population_size: int,
        update_count: int = 0,
        elbo_trace: Optional[list[float]] = None,
    ) -> None:
        self.config = config
        self.lam = lam
        self.terms = list(terms)
        self.population_size = population_size
        self.update_count = update_count
        self.elbo_trace = elbo_trace if elbo_trace is not None else []

    @property
    def num_topics(self) -> int:
        return self.config.num_topics

    @property
    def vocab_size(self) -> int:
        return self.lam.shape[1]

    def topic_word(self) -> np.ndarray:
        """Row-normalized expected topic-word distributions."""
        return self.lam / self.lam.sum(axis=1)[:, np.newaxis]

    def _exp_elog_beta(self) -> np.ndarray:
        return np.exp(dirichlet_expectation(self.lam))

    def infer_doc_topics(self, bow: BowDocument) -> np.ndarray:
        """One-document E-step with topics frozen; returns normalized gamma."""
        ids, cts = _as_arrays(bow)
        if len(ids) > 0 and ids[-1] >= self.vocab_size:
            raise DataError(
                f"document {bow.doc_id!r} has term id {int(ids[-1])} outside "
                f"vocabulary of size {self.vocab_size}"
            )
        alpha = np.full(self.num_topics, self.config.resolved_alpha)
        gamma, _ = _doc_e_step(
            ids,
            cts,
            alpha,
            self._exp_elog_beta(),
            self.config.e_step_max_iters,
            self.config.e_step_tol,
        )
        return gamma / gamma.sum()

    def top_words(self, topic_id: int, n: int = 10) -> list[str]:
        """The n most probable terms of one topic, ties by ascending id."""
        if not 0 <= topic_id < self.num_topics:
            raise ConfigError(
                f"topic_id {topic_id} out of range for {self.num_topics} topics"
            )
        row = self.topic_word()[topic_id]
        order = np.argsort(-row, kind="stable")[:n]
        return [self.terms[i] for i in order]

    def update(self, new_docs: Sequence[BowDocument]) -> "LdaModel":
        """Continue the online schedule on additional documents.

        Documents must already be encoded against the model's vocabulary
        (``Vocabulary.encode_tokens`` drops and counts anything out of
        vocabulary). The update counter advances by one per minibatch.
        """
        if not new_docs:
            return self
        encoded = []
        for doc in new_docs:
            ids, cts = _as_arrays(doc)
            if len(ids) > 0 and ids[-1] >= self.vocab_size:
                raise DataError(
                    f"document {doc.doc_id!r} has term id {int(ids[-1])} outside "
                    f"vocabulary of size {self.vocab_size}"
                )
            encoded.append((ids, cts))
        cfg = self.config
        eta = cfg.resolved_eta
        alpha = np.full(cfg.num_topics, cfg.resolved_alpha)
        for start in range(0, len(encoded), cfg.minibatch_size):
            batch = encoded[start : start + cfg.minibatch_size]
            # Updates are online by nature, also for batch-fitted models.
            rho = (cfg.tau0 + self.update_count) ** -cfg.kappa
            sstats = self._batch_sstats(batch, alpha)
            self.lam = (1 - rho) * self.lam + rho * (
                eta + self.population_size * sstats / len(batch)
            )
            self.update_count += 1
        return self

    def _batch_sstats(
        self,
        batch: Sequence[tuple[np.ndarray, np.ndarray]],
        alpha: np.ndarray,
        gammas_out: Optional[list[np.ndarray]] = None,
    ) -> np.ndarray:
        cfg = self.config
        exp_elog_beta = self._exp_elog_beta()
        sstats = np.zeros_like(self.lam)
        for ids, cts in batch:
            gamma, scaled = _doc_e_step(
                ids, cts, alpha, exp_elog_beta, cfg.e_step_max_iters, cfg.e_step_tol
            )
            if gammas_out is not None:
                gammas_out.append(gamma)
            if len(ids) > 0:
                exp_elog_theta = np.exp(dirichlet_expectation(gamma))
                sstats[:, ids] += np.outer(exp_elog_theta, scaled)
        return sstats * exp_elog_beta

    def elbo(self, docs: Sequence[BowDocument]) -> float:
        """Variational lower bound on the documents' log likelihood."""
        encoded = [_as_arrays(doc) for doc in docs]
        alpha = np.full(self.num_topics, self.config.resolved_alpha)
        gammas: list[np.ndarray] = []
        exp_elog_beta = self._exp_elog_beta()
        cfg = self.config
        for ids, cts in encoded:
            gamma, _ = _doc_e_step(
                ids, cts, alpha, exp_elog_beta, cfg.e_step_max_iters, cfg.e_step_tol
            )
            gammas.append(gamma)
        return _approx_bound(
            encoded,
            np.vstack(gammas),
            self.lam,
            cfg.resolved_alpha,
            cfg.resolved_eta,
        )


def _approx_bound(
    encoded: Sequence[tuple[np.ndarray, np.ndarray]],
    gamma: np.ndarray,
    lam: np.ndarray,
    alpha: float,
    eta: float,
) -> float:
    """ELBO for a set of documents under (gamma, lam).

    Per-token likelihood terms are evaluated with a log-sum-exp over
    topics, then the Dirichlet prior and entropy terms for both gamma
    and lam are added.
    """
    num_topics, vocab_size = lam.shape
    elog_theta = dirichlet_expectation(gamma)
    elog_beta = dirichlet_expectation(lam)

    score = 0.0
    for d, (ids, cts) in enumerate(encoded):
        if len(ids) == 0:
            continue
        temp = elog_theta[d][:, np.newaxis] + elog_beta[:, ids]
        tmax = temp.max(axis=0)
        phinorm = np.log(np.exp(temp - tmax).sum(axis=0)) + tmax
        score += float(np.dot(cts, phinorm))

    # E[log p(theta | alpha)] - E[log q(theta | gamma)]
    score += float(np.sum((alpha - gamma) * elog_theta))
    score += float(np.sum(gammaln(gamma) - gammaln(alpha)))
    score += float(
        np.sum(gammaln(alpha * num_topics) - gammaln(np.sum(gamma, axis=1)))
    )

    # E[log p(beta | eta)] - E[log q(beta | lam)]
    score += float(np.sum((eta - lam) * elog_beta))
    score += float(np.sum(gammaln(lam) - gammaln(eta)))
    score += float(
        np.sum(gammaln(eta * vocab_size) - gammaln(np.sum(lam, axis=1)))
    )
    return score


def fit(corpus: Corpus, config: LdaConfig) -> LdaModel:
    """Fit LDA on a corpus with online (or batch) variational Bayes."""
    vocab_size = len(corpus.vocabulary)
    if vocab_size == 0:
        raise ConfigError("cannot fit on an empty vocabulary")
    num_docs = corpus.num_docs
    if num_docs == 0:
        raise ConfigError("cannot fit on an empty corpus")

    rng = np.random.default_rng(config.seed)
    lam = rng.gamma(100.0, 1.0 / 100.0, (config.num_topics, vocab_size))
    model = LdaModel(
        config=config,
        lam=lam,
        terms=corpus.vocabulary.id_to_term,
        population_size=num_docs,
    )

    encoded = [_as_arrays(doc) for doc in corpus.documents]
    alpha = np.full(config.num_topics, config.resolved_alpha)
    eta = config.resolved_eta
    minibatch = num_docs if config.batch_mode else config.minibatch_size

    for _ in range(config.passes):
        if config.batch_mode:
            gammas: list[np.ndarray] = []
            sstats = model._batch_sstats(encoded, alpha, gammas_out=gammas)
            model.elbo_trace.append(
                _approx_bound(encoded, np.vstack(gammas), model.lam, alpha[0], eta)
            )
            # rho = 1 and the minibatch is the whole corpus, so this is
            # the exact batch M-step.
            model.lam = eta + sstats
            model.update_count += 1
        else:
            for start in range(0, num_docs, minibatch):
                batch = encoded[start : start + minibatch]
                rho = (config.tau0 + model.update_count) ** -config.kappa
                sstats = model._batch_sstats(batch, alpha)
                model.lam = (1 - rho) * model.lam + rho * (
                    eta + num_docs * sstats / len(batch)
                )
                model.update_count += 1
    return model
