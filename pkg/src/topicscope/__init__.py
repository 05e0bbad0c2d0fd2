"""Topic-model based category discovery and label-taxonomy evaluation.

The package fits LDA (online variational Bayes) and a truncated
stick-breaking HDP on preprocessed text corpora, scores topics with
sliding-window coherence, and compares document-topic structure against
an existing label taxonomy through mean column-cosine similarity and
per-label coverage. A synthetic planted-topic generator provides ground
truth for end-to-end verification, and the ``topicscope`` CLI wires the
pieces together.
"""

from .coherence import (
    CoherenceConfig,
    CoherenceResult,
    WindowCounts,
    build_window_counts,
    model_coherence,
    npmi,
    sliding_windows,
    topic_cv,
)
from .corpus import (
    BowDocument,
    Corpus,
    CorpusStats,
    PreprocessConfig,
    RawDocument,
    Vocabulary,
    apply_bigrams,
    build_corpus,
    corpus_stats,
    detect_bigrams,
    read_documents_csv,
    read_wordlist,
    remove_filtered,
    tokenize,
)
from .errors import ConfigError, DataError, TopicScopeError
from .evaluation import (
    CoverageResult,
    DocTopicMatrix,
    LabelMatrix,
    build_doc_topic_matrix,
    build_label_matrix,
    coverage,
    mean_cosine_similarity,
    project_hdp_matrix,
)
from .hdp import HdpConfig, HdpModel
from .lda import LdaConfig, LdaModel
from .model_io import load_model, save_model
from .synth import MatchResult, SynthConfig, SynthCorpus, generate, match_topics

__version__ = "0.1.0"

__all__ = [
    "BowDocument",
    "CoherenceConfig",
    "CoherenceResult",
    "ConfigError",
    "Corpus",
    "CorpusStats",
    "CoverageResult",
    "DataError",
    "DocTopicMatrix",
    "HdpConfig",
    "HdpModel",
    "LabelMatrix",
    "LdaConfig",
    "LdaModel",
    "MatchResult",
    "PreprocessConfig",
    "RawDocument",
    "SynthConfig",
    "SynthCorpus",
    "TopicScopeError",
    "Vocabulary",
    "WindowCounts",
    "apply_bigrams",
    "build_corpus",
    "build_doc_topic_matrix",
    "build_label_matrix",
    "build_window_counts",
    "corpus_stats",
    "coverage",
    "detect_bigrams",
    "generate",
    "load_model",
    "match_topics",
    "mean_cosine_similarity",
    "model_coherence",
    "npmi",
    "project_hdp_matrix",
    "read_documents_csv",
    "read_wordlist",
    "remove_filtered",
    "save_model",
    "sliding_windows",
    "tokenize",
    "topic_cv",
]
