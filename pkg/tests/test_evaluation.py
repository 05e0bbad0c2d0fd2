"""Similarity and coverage metrics against brute-force reimplementation.

The oracle normalizes and multiplies matrices with explicit Python
loops, no shared code with the library path.
"""

import math

import numpy as np
import pytest

from topicscope import hdp, lda
from topicscope.corpus import RawDocument, build_corpus
from topicscope.errors import ConfigError, DataError
from topicscope.evaluation import (
    build_doc_topic_matrix,
    build_label_matrix,
    coverage,
    mean_cosine_similarity,
    project_hdp_matrix,
)

from conftest import plain_config


# ----------------------------------------------------------------------
# Brute-force oracle
# ----------------------------------------------------------------------

def _col(matrix, j):
    return [matrix[i][j] for i in range(len(matrix))]


def _unit(vec):
    norm = math.sqrt(sum(x * x for x in vec))
    if norm == 0.0:
        return list(vec)
    return [x / norm for x in vec]


def brute_similarity(topic_rows, label_rows):
    n_topics = len(topic_rows[0])
    n_labels = len(label_rows[0])
    total = 0.0
    for i in range(n_topics):
        ti = _unit(_col(topic_rows, i))
        for j in range(n_labels):
            lj = _unit(_col(label_rows, j))
            total += sum(a * b for a, b in zip(ti, lj))
    return total / (n_topics * n_labels)


def brute_coverage(topic_rows, label_rows):
    n_topics = len(topic_rows[0])
    n_labels = len(label_rows[0])
    chosen = []
    effective = 0
    for j in range(n_labels):
        lj = _col(label_rows, j)
        if all(x == 0 for x in lj):
            continue
        effective += 1
        lj = _unit(lj)
        best_topic, best_value = 0, -math.inf
        for i in range(n_topics):
            ti = _unit(_col(topic_rows, i))
            value = sum(a * b for a, b in zip(ti, lj))
            if value > best_value:
                best_topic, best_value = i, value
        chosen.append(best_topic)
    distinct = len(set(chosen))
    ratio = distinct / effective if effective else 0.0
    return distinct, ratio


class TestMeanCosineSimilarity:
    def test_identity_case(self):
        eye = np.eye(2)
        assert mean_cosine_similarity(eye, eye) == pytest.approx(0.5, abs=1e-12)

    def test_identity_against_all_ones_column(self):
        topic = np.eye(2)
        labels = np.ones((2, 1))
        expected = math.sqrt(2) / 2
        assert mean_cosine_similarity(topic, labels) == pytest.approx(
            expected, abs=1e-12
        )

    def test_all_zero_labels_give_zero(self):
        topic = np.eye(2)
        labels = np.zeros((2, 2))
        assert mean_cosine_similarity(topic, labels) == 0.0

    def test_raw_mode_skips_normalization(self):
        topic = np.eye(2)
        labels = np.ones((2, 1))
        assert mean_cosine_similarity(topic, labels, "raw") == pytest.approx(
            1.0, abs=1e-12
        )

    def test_column_rescaling_invariance(self):
        rng = np.random.default_rng(5)
        topic = rng.random((6, 3))
        labels = rng.integers(0, 2, size=(6, 2)).astype(float)
        labels[:, 0] = 1.0
        base = mean_cosine_similarity(topic, labels)
        topic_scaled = topic.copy()
        topic_scaled[:, 1] *= 7.0
        labels_scaled = labels * 3.0
        assert mean_cosine_similarity(topic_scaled, labels) == pytest.approx(
            base, abs=1e-12
        )
        assert mean_cosine_similarity(topic, labels_scaled) == pytest.approx(
            base, abs=1e-12
        )

    def test_row_permutation_invariance(self):
        rng = np.random.default_rng(6)
        topic = rng.random((8, 3))
        labels = rng.integers(0, 2, size=(8, 2)).astype(float)
        perm = rng.permutation(8)
        assert mean_cosine_similarity(topic[perm], labels[perm]) == pytest.approx(
            mean_cosine_similarity(topic, labels), abs=1e-12
        )

    def test_bounds_on_nonnegative_inputs(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            topic = rng.random((5, 4))
            labels = rng.integers(0, 2, size=(5, 3)).astype(float)
            s = mean_cosine_similarity(topic, labels)
            assert 0.0 <= s <= 1.0

    def test_shape_errors(self):
        with pytest.raises(DataError):
            mean_cosine_similarity(np.eye(2), np.ones((3, 1)))
        with pytest.raises(DataError):
            mean_cosine_similarity(np.zeros((2, 0)), np.ones((2, 1)))
        with pytest.raises(ConfigError):
            mean_cosine_similarity(np.eye(2), np.eye(2), "other")

    def test_matches_oracle_on_random_instances(self):
        rng = np.random.default_rng(8)
        for _ in range(40):
            d = int(rng.integers(1, 9))
            t = int(rng.integers(1, 5))
            c = int(rng.integers(1, 4))
            topic = rng.random((d, t))
            labels = rng.integers(0, 2, size=(d, c)).astype(float)
            expected = brute_similarity(topic.tolist(), labels.tolist())
            assert mean_cosine_similarity(topic, labels) == pytest.approx(
                expected, abs=1e-10
            )


class TestCoverage:
    def test_identity_full_coverage(self):
        eye = np.eye(2)
        result = coverage(eye, eye)
        assert result.covered_topics == 2
        assert result.cov_ratio == 1.0

    def test_duplicate_label_columns_share_topic(self):
        topic = np.eye(2)
        labels = np.column_stack([np.array([1.0, 0.0]), np.array([1.0, 0.0])])
        result = coverage(topic, labels)
        assert result.covered_topics == 1
        assert result.cov_ratio == 0.5

    def test_tie_breaks_to_lowest_topic_index(self):
        topic = np.column_stack([np.ones(3), np.ones(3)])
        labels = np.ones((3, 1))
        result = coverage(topic, labels, ["only"])
        assert result.chosen["only"] == 0

    def test_zero_label_column_warns_and_is_excluded(self):
        topic = np.eye(2)
        labels = np.column_stack([np.array([1.0, 0.0]), np.zeros(2)])
        with pytest.warns(UserWarning, match="ghost"):
            result = coverage(topic, labels, ["real", "ghost"])
        assert result.chosen["ghost"] is None
        assert result.covered_topics == 1
        assert result.cov_ratio == 1.0

    @pytest.mark.filterwarnings("ignore:label .* occurs in no document")
    def test_matches_oracle_on_random_instances(self):
        # Random binary label matrices occasionally produce an all-zero
        # column; the oracle applies the same exclusion rule.
        rng = np.random.default_rng(9)
        for _ in range(40):
            topic = rng.random((6, 4))
            labels = rng.integers(0, 2, size=(6, 3)).astype(float)
            expected_cov, expected_ratio = brute_coverage(
                topic.tolist(), labels.tolist()
            )
            got = coverage(topic, labels)
            assert got.covered_topics == expected_cov
            assert got.cov_ratio == pytest.approx(expected_ratio, abs=1e-12)

    def test_rescaling_leaves_choices_unchanged(self):
        rng = np.random.default_rng(10)
        topic = rng.random((6, 4))
        labels = rng.integers(0, 2, size=(6, 3)).astype(float)
        labels[:, 1] = np.maximum(labels[:, 1], 1.0)
        base = coverage(topic, labels)
        scaled = topic.copy()
        scaled[:, 2] *= 7.0
        assert coverage(scaled, labels).chosen == base.chosen


class TestLabelMatrix:
    def test_identity_example(self):
        docs = [
            RawDocument("d0", "x", labels={"a"}),
            RawDocument("d1", "y", labels={"b"}),
        ]
        lm = build_label_matrix(docs)
        assert lm.labels == ["a", "b"]
        np.testing.assert_array_equal(lm.values, np.eye(2))

    def test_unlabeled_doc_gets_zero_row(self):
        docs = [RawDocument("d0", "x", labels={"a"}), RawDocument("d1", "y")]
        lm = build_label_matrix(docs)
        np.testing.assert_array_equal(lm.values[1], [0.0])

    def test_label_outside_universe_rejected(self):
        docs = [RawDocument("d0", "x", labels={"a", "mystery"})]
        with pytest.raises(DataError, match="mystery"):
            build_label_matrix(docs, label_universe=["a", "b"])

    def test_universe_is_sorted(self):
        docs = [RawDocument("d0", "x", labels={"zeta", "alpha"})]
        lm = build_label_matrix(docs, label_universe=["zeta", "alpha", "mid"])
        assert lm.labels == ["alpha", "mid", "zeta"]


class TestDocTopicMatrix:
    def _corpus(self):
        rng = np.random.default_rng(12)
        words = [f"w{i}" for i in range(10)]
        docs = [
            RawDocument(f"d{i}", " ".join(rng.choice(words, size=8)))
            for i in range(12)
        ]
        docs.append(RawDocument("empty", ""))
        return build_corpus(docs, plain_config())

    def test_single_topic_model_gives_ones(self):
        corpus = self._corpus()
        model = lda.fit(corpus, lda.LdaConfig(num_topics=1, seed=0))
        matrix = build_doc_topic_matrix(model, corpus)
        np.testing.assert_allclose(matrix.values, 1.0, atol=1e-12)

    def test_empty_document_row_is_uniform(self):
        corpus = self._corpus()
        model = lda.fit(corpus, lda.LdaConfig(num_topics=4, seed=0))
        matrix = build_doc_topic_matrix(model, corpus)
        np.testing.assert_allclose(matrix.values[-1], 0.25, atol=1e-12)

    def test_rows_sum_to_one(self):
        corpus = self._corpus()
        model = lda.fit(corpus, lda.LdaConfig(num_topics=3, seed=1))
        matrix = build_doc_topic_matrix(model, corpus)
        np.testing.assert_allclose(matrix.values.sum(axis=1), 1.0, atol=1e-9)

    def test_hdp_projection_renormalizes(self):
        corpus = self._corpus()
        model = hdp.fit(
            corpus, hdp.HdpConfig(max_topics=8, doc_max_topics=4, passes=3, seed=3)
        )
        matrix = build_doc_topic_matrix(model, corpus, k=3)
        assert matrix.values.shape == (corpus.num_docs, 3)
        sums = matrix.values.sum(axis=1)
        for s in sums:
            assert s == pytest.approx(1.0, abs=1e-9) or s == 0.0
        _, ids = model.top_k_projection(3)
        assert matrix.topic_ids == ids

    def test_projection_consistent_with_full_rows(self):
        corpus = self._corpus()
        model = hdp.fit(
            corpus, hdp.HdpConfig(max_topics=8, doc_max_topics=4, passes=3, seed=3)
        )
        full = np.vstack([model.infer_doc_topics(d) for d in corpus.documents])
        direct = build_doc_topic_matrix(model, corpus, k=5)
        via_helper = project_hdp_matrix(model, full, 5)
        np.testing.assert_allclose(direct.values, via_helper.values, atol=1e-12)

    def test_lda_k_mismatch_rejected(self):
        corpus = self._corpus()
        model = lda.fit(corpus, lda.LdaConfig(num_topics=3, seed=1))
        with pytest.raises(ConfigError):
            build_doc_topic_matrix(model, corpus, k=5)


class TestMatrixExport:
    def test_csv_round_trip(self, tmp_path):
        import csv as csv_mod

        from topicscope.evaluation import export_matrix_csv

        values = np.array([[0.25, 0.75], [1.0, 0.0]])
        path = tmp_path / "matrix.csv"
        export_matrix_csv(values, ["docA", "docB"], ["t0", "t1"], path)
        with open(path, encoding="utf-8") as fh:
            rows = list(csv_mod.reader(fh))
        assert rows[0] == ["doc_id", "t0", "t1"]
        assert rows[1][0] == "docA"
        restored = np.array([[float(x) for x in row[1:]] for row in rows[1:]])
        np.testing.assert_array_equal(restored, values)
