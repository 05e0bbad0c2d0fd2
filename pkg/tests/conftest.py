import pytest

from topicscope.corpus import PreprocessConfig, RawDocument, build_corpus


def plain_config(**overrides) -> PreprocessConfig:
    """Pipeline config with bigram detection effectively disabled."""
    defaults = dict(bigram_threshold=1e9)
    defaults.update(overrides)
    return PreprocessConfig(**defaults)


@pytest.fixture
def tiny_corpus():
    """Six short labeled documents over a small, controlled vocabulary."""
    docs = [
        RawDocument("d0", "parks closed parks", labels={"closure"}),
        RawDocument("d1", "parks open beaches", labels={"opening"}),
        RawDocument("d2", "schools closed today", labels={"closure"}),
        RawDocument("d3", "beaches open parks open", labels={"opening"}),
        RawDocument("d4", "schools funding program", labels={"funding"}),
        RawDocument("d5", "funding program relief", labels={"funding"}),
    ]
    return docs, build_corpus(docs, plain_config())
