"""HDP fitting, topic weights, top-K projection, and inference."""

import numpy as np
import pytest

from topicscope import hdp
from topicscope.corpus import BowDocument, RawDocument, build_corpus
from topicscope.errors import ConfigError, DataError
from topicscope.synth import SynthConfig, generate, match_topics

from conftest import plain_config


def _fit_planted(seed=11, max_topics=30):
    sc = generate(
        SynthConfig(
            num_topics=3,
            vocab_size=120,
            num_docs=300,
            doc_len_mean=50.0,
            doc_topic_alpha=0.08,
            topic_concentration=0.05,
            seed=seed,
        )
    )
    corpus = build_corpus(sc.documents, plain_config())
    term_pos = {t: i for i, t in enumerate(sc.terms)}
    order = [term_pos[t] for t in corpus.vocabulary.id_to_term]
    true = sc.topic_word[:, order]
    model = hdp.fit(
        corpus,
        hdp.HdpConfig(max_topics=max_topics, doc_max_topics=8, passes=10, seed=5),
    )
    return corpus, true, model


@pytest.fixture(scope="module")
def planted():
    return _fit_planted()


class TestFit:
    def test_degenerate_single_word_corpus(self):
        """A corpus of one repeated single-word document concentrates on one topic."""
        docs = [RawDocument(f"d{i}", "hello") for i in range(30)]
        corpus = build_corpus(docs, plain_config())
        model = hdp.fit(
            corpus,
            hdp.HdpConfig(max_topics=20, doc_max_topics=5, passes=5, seed=1),
        )
        (top_id, top_weight), *_ = model.topic_weights()
        assert top_weight > 0.9
        assert model.top_words(top_id, 1) == ["hello"]

    def test_same_seed_identical_parameters(self):
        docs = [
            RawDocument(f"d{i}", "parks closed beaches open today") for i in range(12)
        ]
        corpus = build_corpus(docs, plain_config())
        config = hdp.HdpConfig(max_topics=10, doc_max_topics=4, passes=3, seed=9)
        m1 = hdp.fit(corpus, config)
        m2 = hdp.fit(corpus, config)
        assert np.array_equal(m1.lam, m2.lam)
        assert np.array_equal(m1.stick_a, m2.stick_a)
        assert np.array_equal(m1.stick_b, m2.stick_b)

    def test_planted_three_topic_recovery(self, planted):
        _, true, model = planted
        weights = model.topic_weights()
        above = [(tid, w) for tid, w in weights if w > 1.0 / model.max_topics]
        assert len(above) >= 3
        top3 = model.topic_word()[[tid for tid, _ in weights[:3]]]
        assert match_topics(top3, true).mean_cosine >= 0.8

    def test_topic_word_rows_normalized(self, planted):
        _, _, model = planted
        np.testing.assert_allclose(model.topic_word().sum(axis=1), 1.0, atol=1e-9)
        assert np.all(model.lam > 0)

    def test_config_validation(self):
        with pytest.raises(ConfigError):
            hdp.HdpConfig(max_topics=0)
        with pytest.raises(ConfigError):
            hdp.HdpConfig(max_topics=5, doc_max_topics=6)
        with pytest.raises(ConfigError):
            hdp.HdpConfig(gamma=0.0)


class TestTopicWeights:
    def _model_with_sticks(self, stick_a, stick_b, n_topics, vocab=3):
        return hdp.HdpModel(
            config=hdp.HdpConfig(max_topics=n_topics, doc_max_topics=1),
            lam=np.ones((n_topics, vocab)),
            stick_a=np.asarray(stick_a, dtype=float),
            stick_b=np.asarray(stick_b, dtype=float),
            table_mass=np.zeros(n_topics),
            terms=[f"t{i}" for i in range(vocab)],
            population_size=1,
        )

    def test_descending_sort(self):
        # Stick fractions 1/2 then 3/5 give weights (0.5, 0.3, 0.2).
        model = self._model_with_sticks([1.0, 3.0], [1.0, 2.0], 3)
        weights = model.topic_weights()
        assert [tid for tid, _ in weights] == [0, 1, 2]
        np.testing.assert_allclose(
            [w for _, w in weights], [0.5, 0.3, 0.2], atol=1e-12
        )

    def test_equal_weights_order_by_topic_id(self):
        model = self._model_with_sticks([1.0], [1.0], 2)
        assert model.topic_weights() == [(0, 0.5), (1, 0.5)]

    def test_weights_sum_to_one(self, planted):
        _, _, model = planted
        weights = np.array([w for _, w in model.topic_weights()])
        assert np.all(weights >= 0)
        assert abs(weights.sum() - 1.0) <= 1e-9


class TestTopKProjection:
    def test_full_truncation_in_weight_order(self, planted):
        _, _, model = planted
        matrix, ids = model.top_k_projection(model.max_topics)
        assert ids == [tid for tid, _ in model.topic_weights()]
        assert matrix.shape == (model.max_topics, model.vocab_size)

    def test_k_one_is_heaviest_topic(self, planted):
        _, _, model = planted
        _, ids = model.top_k_projection(1)
        assert ids == [model.topic_weights()[0][0]]

    def test_prefix_nesting(self, planted):
        _, _, model = planted
        _, ids10 = model.top_k_projection(10)
        _, ids25 = model.top_k_projection(25)
        assert ids25[:10] == ids10

    def test_rows_normalized(self, planted):
        _, _, model = planted
        matrix, _ = model.top_k_projection(7)
        np.testing.assert_allclose(matrix.sum(axis=1), 1.0, atol=1e-9)

    def test_out_of_range(self, planted):
        _, _, model = planted
        with pytest.raises(ConfigError):
            model.top_k_projection(0)
        with pytest.raises(ConfigError):
            model.top_k_projection(model.max_topics + 1)


class TestInfer:
    def test_empty_doc_matches_topic_weights(self, planted):
        _, _, model = planted
        vec = model.infer_doc_topics(BowDocument("e", {}, 0))
        np.testing.assert_allclose(vec, model.weights_vector(), atol=1e-12)

    def test_sums_to_one(self, planted):
        corpus, _, model = planted
        for doc in corpus.documents[:8]:
            vec = model.infer_doc_topics(doc)
            assert np.all(vec >= 0)
            assert abs(vec.sum() - 1.0) <= 1e-9

    def test_exclusive_support_word_dominates(self):
        """A one-word doc whose word lives in a single topic's support."""
        lam = np.array(
            [
                [50.0, 0.01, 0.01],
                [0.01, 50.0, 0.01],
                [0.01, 0.01, 50.0],
            ]
        )
        model = hdp.HdpModel(
            config=hdp.HdpConfig(max_topics=3, doc_max_topics=2),
            lam=lam,
            stick_a=np.array([2.0, 1.0]),
            stick_b=np.array([1.0, 1.0]),
            table_mass=np.zeros(3),
            terms=["a", "b", "c"],
            population_size=10,
        )
        vec = model.infer_doc_topics(BowDocument("x", {1: 1}, 1))
        assert vec[1] > 0.5

    def test_out_of_range_term_rejected(self, planted):
        _, _, model = planted
        with pytest.raises(DataError):
            model.infer_doc_topics(BowDocument("x", {model.vocab_size + 1: 2}, 2))
