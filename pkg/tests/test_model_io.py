"""Model artifact round-trips: bit-exact and tamper-evident."""

import json

import numpy as np
import pytest

from topicscope import hdp, lda
from topicscope.corpus import RawDocument, build_corpus
from topicscope.errors import DataError
from topicscope.model_io import load_model, save_model

from conftest import plain_config


@pytest.fixture(scope="module")
def small_corpus():
    rng = np.random.default_rng(1)
    words = [f"w{i}" for i in range(15)]
    docs = [
        RawDocument(f"d{i}", " ".join(rng.choice(words, size=12))) for i in range(20)
    ]
    return build_corpus(docs, plain_config())


class TestLdaRoundTrip:
    def test_bit_exact(self, small_corpus, tmp_path):
        model = lda.fit(small_corpus, lda.LdaConfig(num_topics=3, seed=4))
        path = tmp_path / "m.model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.kind == "lda"
        assert np.array_equal(loaded.lam, model.lam)
        assert loaded.config == model.config
        assert loaded.terms == model.terms
        assert loaded.update_count == model.update_count
        assert loaded.population_size == model.population_size

    def test_resave_is_identical(self, small_corpus, tmp_path):
        model = lda.fit(small_corpus, lda.LdaConfig(num_topics=2, seed=4))
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        save_model(model, p1)
        save_model(load_model(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_elbo_trace_preserved(self, small_corpus, tmp_path):
        model = lda.fit(
            small_corpus,
            lda.LdaConfig(num_topics=2, passes=3, batch_mode=True, seed=4),
        )
        path = tmp_path / "m.json"
        save_model(model, path)
        assert load_model(path).elbo_trace == model.elbo_trace


class TestHdpRoundTrip:
    def test_bit_exact(self, small_corpus, tmp_path):
        model = hdp.fit(
            small_corpus,
            hdp.HdpConfig(max_topics=6, doc_max_topics=3, passes=2, seed=2),
        )
        path = tmp_path / "m.model.json"
        save_model(model, path)
        loaded = load_model(path)
        assert loaded.kind == "hdp"
        for attr in ("lam", "stick_a", "stick_b", "table_mass"):
            assert np.array_equal(getattr(loaded, attr), getattr(model, attr))
        assert loaded.config == model.config
        assert loaded.topic_weights() == model.topic_weights()


class TestArtifactValidation:
    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_model(tmp_path / "absent.json")

    def test_not_json(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text("definitely not json{", encoding="utf-8")
        with pytest.raises(DataError, match="unreadable"):
            load_model(path)

    def test_wrong_format(self, tmp_path):
        path = tmp_path / "other.json"
        path.write_text(json.dumps({"format": "something.else"}), encoding="utf-8")
        with pytest.raises(DataError):
            load_model(path)

    def test_corrupted_vocabulary_detected(self, small_corpus, tmp_path):
        model = lda.fit(small_corpus, lda.LdaConfig(num_topics=2, seed=0))
        path = tmp_path / "m.json"
        save_model(model, path)
        payload = json.loads(path.read_text(encoding="utf-8"))
        payload["vocabulary"][0] = "tampered"
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(DataError, match="hash"):
            load_model(path)
