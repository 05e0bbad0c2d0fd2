"""Command-line surface: synth, stats, sweep, topics.

Configuration comes from three layers, lowest priority first: built-in
defaults, a flat TOML config file (``--config`` or the
``TOPICSCOPE_CONFIG`` environment variable), and command-line flags.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import coherence as coherence_mod
from . import evaluation, hdp, lda, model_io, synth
from .corpus import (
    Corpus,
    PreprocessConfig,
    build_corpus,
    corpus_stats,
    read_documents_csv,
    read_wordlist,
)
from .errors import ConfigError, DataError, TopicScopeError

CONFIG_ENV_VAR = "TOPICSCOPE_CONFIG"

_DEFAULTS: dict[str, Any] = {
    "dataset_tag": None,
    "stopwords": None,
    "geo_words": None,
    "min_token_len": 2,
    "bigram_min_count": 5,
    "bigram_threshold": 10.0,
    "bigram_mode": "append",
    "models": "lda,hdp",
    "k_list": "10,25,50,100",
    "lda_alpha": None,
    "lda_eta": None,
    "lda_passes": 10,
    "lda_minibatch_size": 256,
    "lda_tau0": 1.0,
    "lda_kappa": 0.7,
    "hdp_max_topics": 150,
    "hdp_doc_max_topics": 15,
    "hdp_gamma": 1.0,
    "hdp_alpha0": 1.0,
    "hdp_eta": 0.01,
    "hdp_tau0": 64.0,
    "hdp_kappa": 0.6,
    "hdp_passes": 10,
    "hdp_minibatch_size": 256,
    "window_size": 110,
    "top_n": 10,
    "similarity_normalization": "cosine",
    "seed": 0,
}


@dataclass
class RunConfig:
    """Effective settings for one CLI invocation after layering."""

    input: Optional[str] = None
    output_dir: Optional[str] = None
    dataset_tag: Optional[str] = None
    stopwords: Optional[str] = None
    geo_words: Optional[str] = None
    min_token_len: int = 2
    bigram_min_count: int = 5
    bigram_threshold: float = 10.0
    bigram_mode: str = "append"
    models: list[str] = field(default_factory=lambda: ["lda", "hdp"])
    k_list: list[int] = field(default_factory=lambda: [10, 25, 50, 100])
    lda_alpha: Optional[float] = None
    lda_eta: Optional[float] = None
    lda_passes: int = 10
    lda_minibatch_size: int = 256
    lda_tau0: float = 1.0
    lda_kappa: float = 0.7
    hdp_max_topics: int = 150
    hdp_doc_max_topics: int = 15
    hdp_gamma: float = 1.0
    hdp_alpha0: float = 1.0
    hdp_eta: float = 0.01
    hdp_tau0: float = 64.0
    hdp_kappa: float = 0.6
    hdp_passes: int = 10
    hdp_minibatch_size: int = 256
    window_size: int = 110
    top_n: int = 10
    similarity_normalization: str = "cosine"
    seed: int = 0

    def __post_init__(self) -> None:
        if any(k <= 0 for k in self.k_list):
            raise ConfigError(f"sweep k values must be positive: {self.k_list}")
        if any(a >= b for a, b in zip(self.k_list, self.k_list[1:])) or len(
            set(self.k_list)
        ) != len(self.k_list):
            raise ConfigError(
                f"sweep k values must be strictly increasing: {self.k_list}"
            )
        for kind in self.models:
            if kind not in ("lda", "hdp"):
                raise ConfigError(f"unknown model kind {kind!r}")
        if not self.models:
            raise ConfigError("at least one model kind is required")

    def preprocess_config(self) -> PreprocessConfig:
        stop = read_wordlist(self.stopwords) if self.stopwords else set()
        geo = read_wordlist(self.geo_words) if self.geo_words else set()
        return PreprocessConfig(
            stopwords=stop,
            geo_words=geo,
            min_token_len=self.min_token_len,
            bigram_min_count=self.bigram_min_count,
            bigram_threshold=self.bigram_threshold,
            bigram_mode=self.bigram_mode,
        )

    def lda_config(self, num_topics: int) -> lda.LdaConfig:
        return lda.LdaConfig(
            num_topics=num_topics,
            alpha=self.lda_alpha,
            eta=self.lda_eta,
            passes=self.lda_passes,
            minibatch_size=self.lda_minibatch_size,
            tau0=self.lda_tau0,
            kappa=self.lda_kappa,
            seed=self.seed,
        )

    def hdp_config(self) -> hdp.HdpConfig:
        return hdp.HdpConfig(
            max_topics=self.hdp_max_topics,
            doc_max_topics=self.hdp_doc_max_topics,
            gamma=self.hdp_gamma,
            alpha0=self.hdp_alpha0,
            eta=self.hdp_eta,
            tau0=self.hdp_tau0,
            kappa=self.hdp_kappa,
            passes=self.hdp_passes,
            minibatch_size=self.hdp_minibatch_size,
            seed=self.seed,
        )

    def coherence_config(self) -> coherence_mod.CoherenceConfig:
        return coherence_mod.CoherenceConfig(
            window_size=self.window_size, top_n=self.top_n
        )


def _parse_list(value: Any, caster) -> list:
    if isinstance(value, (list, tuple)):
        return [caster(v) for v in value]
    return [caster(v.strip()) for v in str(value).split(",") if v.strip()]


def _load_config_file(path: Optional[str]) -> dict[str, Any]:
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        with open(p, "rb") as fh:
            values = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config file {p}: {exc}") from exc
    unknown = set(values) - set(_DEFAULTS) - {"input", "output_dir"}
    if unknown:
        raise ConfigError(f"unknown config keys in {p}: {sorted(unknown)}")
    return values


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Layer defaults, config file, and flags into a RunConfig."""
    file_values = _load_config_file(getattr(args, "config", None))

    def pick(key: str) -> Any:
        flag = getattr(args, key, None)
        if flag is not None:
            return flag
        if key in file_values:
            return file_values[key]
        return _DEFAULTS.get(key)

    return RunConfig(
        input=pick("input"),
        output_dir=pick("output_dir"),
        dataset_tag=pick("dataset_tag"),
        stopwords=pick("stopwords"),
        geo_words=pick("geo_words"),
        min_token_len=int(pick("min_token_len")),
        bigram_min_count=int(pick("bigram_min_count")),
        bigram_threshold=float(pick("bigram_threshold")),
        bigram_mode=str(pick("bigram_mode")),
        models=_parse_list(pick("models"), str),
        k_list=_parse_list(pick("k_list"), int),
        lda_alpha=None if pick("lda_alpha") is None else float(pick("lda_alpha")),
        lda_eta=None if pick("lda_eta") is None else float(pick("lda_eta")),
        lda_passes=int(pick("lda_passes")),
        lda_minibatch_size=int(pick("lda_minibatch_size")),
        lda_tau0=float(pick("lda_tau0")),
        lda_kappa=float(pick("lda_kappa")),
        hdp_max_topics=int(pick("hdp_max_topics")),
        hdp_doc_max_topics=int(pick("hdp_doc_max_topics")),
        hdp_gamma=float(pick("hdp_gamma")),
        hdp_alpha0=float(pick("hdp_alpha0")),
        hdp_eta=float(pick("hdp_eta")),
        hdp_tau0=float(pick("hdp_tau0")),
        hdp_kappa=float(pick("hdp_kappa")),
        hdp_passes=int(pick("hdp_passes")),
        hdp_minibatch_size=int(pick("hdp_minibatch_size")),
        window_size=int(pick("window_size")),
        top_n=int(pick("top_n")),
        similarity_normalization=str(pick("similarity_normalization")),
        seed=int(pick("seed")),
    )


def _require(value: Optional[str], flag: str) -> str:
    if value is None:
        raise ConfigError(f"{flag} is required (flag or config file)")
    return value


def _load_corpus(cfg: RunConfig) -> tuple[list, Corpus]:
    docs = read_documents_csv(_require(cfg.input, "--input"))
    corpus = build_corpus(docs, cfg.preprocess_config())
    return docs, corpus


def cmd_synth(args: argparse.Namespace) -> int:
    config = synth.SynthConfig(
        num_topics=args.num_topics,
        vocab_size=args.vocab_size,
        num_docs=args.num_docs,
        doc_len_mean=args.doc_len_mean,
        doc_topic_alpha=args.doc_topic_alpha,
        topic_concentration=args.topic_concentration,
        seed=args.seed,
    )
    corpus = synth.generate(config)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    synth.write_corpus_csv(corpus.documents, out)
    print(
        f"wrote {len(corpus.documents)} documents "
        f"({config.num_topics} planted topics, vocab {config.vocab_size}) to {out}"
    )
    return 0


def _stats_payload(stats) -> dict:
    payload = {
        "doc_count": stats.doc_count,
        "vocab_size": stats.vocab_size,
        "total_tokens": stats.total_tokens,
        "tokens_mean": stats.tokens_mean,
        "tokens_std": stats.tokens_std,
    }
    if stats.per_group is not None:
        payload["per_group"] = {
            name: {
                "doc_count": g.doc_count,
                "tokens_mean": g.tokens_mean,
                "tokens_std": g.tokens_std,
            }
            for name, g in stats.per_group.items()
        }
    return payload


def cmd_stats(args: argparse.Namespace) -> int:
    cfg = build_run_config(args)
    _, corpus = _load_corpus(cfg)
    stats = corpus_stats(corpus, group_by=args.group_by)
    print(f"documents     {stats.doc_count}")
    print(f"vocab_size    {stats.vocab_size}")
    print(f"total_tokens  {stats.total_tokens}")
    print(f"tokens_mean   {stats.tokens_mean:.2f}")
    print(f"tokens_std    {stats.tokens_std:.2f}")
    if stats.per_group is not None:
        print()
        print(f"{'group':<20} {'docs':>8} {'tokens_mean':>12} {'tokens_std':>12}")
        for name, g in stats.per_group.items():
            print(
                f"{name:<20} {g.doc_count:>8} {g.tokens_mean:>12.2f} "
                f"{g.tokens_std:>12.2f}"
            )
    if args.json:
        out = Path(args.json)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(_stats_payload(stats), fh, sort_keys=True, indent=2)
            fh.write("\n")
    return 0


def _format_row(row: dict) -> dict:
    def fmt(value, digits):
        return "" if value is None else f"{value:.{digits}f}"

    return {
        "dataset": row["dataset"],
        "tm": row["tm"],
        "k": str(row["k"]),
        "c_v": fmt(row["c_v"], 4),
        "s": fmt(row["s"], 4),
        "cov": "" if row["cov"] is None else str(row["cov"]),
        "cov_ratio": fmt(row["cov_ratio"], 4),
    }


def _sweep_text_table(rows: list[dict]) -> str:
    columns = ["dataset", "tm", "k", "c_v", "s", "cov", "cov_ratio"]
    formatted = [_format_row(r) for r in rows]
    widths = {
        c: max(len(c), *(len(f[c]) for f in formatted)) if formatted else len(c)
        for c in columns
    }
    lines = ["  ".join(c.ljust(widths[c]) for c in columns)]
    for f in formatted:
        lines.append("  ".join(f[c].ljust(widths[c]) for c in columns))
    return "\n".join(lines) + "\n"


def run_sweep(cfg: RunConfig) -> dict:
    """Fit the requested models, score every (model, K) point, report.

    LDA is fitted once per K; HDP is fitted exactly once and its top-K
    projection is evaluated per sweep point, so its coherence is one
    shared value across rows. Returns the report payload and writes
    JSON, CSV, and an aligned text table under the output directory.
    """
    docs, corpus = _load_corpus(cfg)
    if len(corpus.vocabulary) == 0:
        raise DataError("corpus vocabulary is empty after preprocessing")
    outdir = Path(_require(cfg.output_dir, "--output-dir"))
    models_dir = outdir / "models"
    models_dir.mkdir(parents=True, exist_ok=True)
    dataset = cfg.dataset_tag or Path(cfg.input).stem

    have_labels = any(doc.labels for doc in docs)
    label_matrix = evaluation.build_label_matrix(docs) if have_labels else None
    coh_config = cfg.coherence_config()

    rows: list[dict] = []
    top_words: list[dict] = []

    def score(values: np.ndarray) -> tuple[Optional[float], Optional[int], Optional[float]]:
        if label_matrix is None:
            return None, None, None
        s = evaluation.mean_cosine_similarity(
            values, label_matrix.values, cfg.similarity_normalization
        )
        cov = evaluation.coverage(values, label_matrix.values, label_matrix.labels)
        return s, cov.covered_topics, cov.cov_ratio

    if "lda" in cfg.models:
        for k in cfg.k_list:
            model = lda.fit(corpus, cfg.lda_config(k))
            model_io.save_model(model, models_dir / f"lda_k{k}.model.json")
            coh = coherence_mod.model_coherence(model, corpus, coh_config)
            matrix = evaluation.build_doc_topic_matrix(model, corpus)
            s, cov, ratio = score(matrix.values)
            rows.append(
                {
                    "dataset": dataset,
                    "tm": "lda",
                    "k": k,
                    "c_v": coh.mean,
                    "s": s,
                    "cov": cov,
                    "cov_ratio": ratio,
                }
            )
            top_words.append(
                {
                    "tm": "lda",
                    "k": k,
                    "topics": [
                        {"topic": t, "words": model.top_words(t, coh_config.top_n)}
                        for t in range(k)
                    ],
                }
            )

    if "hdp" in cfg.models:
        model = hdp.fit(corpus, cfg.hdp_config())
        model_io.save_model(model, models_dir / "hdp.model.json")
        coh = coherence_mod.model_coherence(model, corpus, coh_config)
        full_rows = np.vstack(
            [model.infer_doc_topics(doc) for doc in corpus.documents]
        )
        for k in cfg.k_list:
            matrix = evaluation.project_hdp_matrix(model, full_rows, k)
            s, cov, ratio = score(matrix.values)
            rows.append(
                {
                    "dataset": dataset,
                    "tm": "hdp",
                    "k": k,
                    "c_v": coh.mean,
                    "s": s,
                    "cov": cov,
                    "cov_ratio": ratio,
                }
            )
            top_words.append(
                {
                    "tm": "hdp",
                    "k": k,
                    "topics": [
                        {"topic": t, "words": model.top_words(t, coh_config.top_n)}
                        for t in matrix.topic_ids
                    ],
                }
            )

    rows.sort(key=lambda r: (r["tm"], r["k"]))
    top_words.sort(key=lambda e: (e["tm"], e["k"]))
    report = {
        "dataset": dataset,
        "seed": cfg.seed,
        "similarity_normalization": cfg.similarity_normalization,
        "has_labels": have_labels,
        "rows": rows,
        "top_words": top_words,
    }

    with open(outdir / "sweep.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(outdir / "sweep.csv", "w", encoding="utf-8") as fh:
        fh.write("dataset,tm,k,c_v,s,cov,cov_ratio\n")
        for row in rows:
            f = _format_row(row)
            fh.write(
                f"{f['dataset']},{f['tm']},{f['k']},{f['c_v']},{f['s']},"
                f"{f['cov']},{f['cov_ratio']}\n"
            )
    with open(outdir / "sweep.txt", "w", encoding="utf-8") as fh:
        fh.write(_sweep_text_table(rows))
    return report


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = build_run_config(args)
    report = run_sweep(cfg)
    print(_sweep_text_table(report["rows"]), end="")
    return 0


def cmd_topics(args: argparse.Namespace) -> int:
    model = model_io.load_model(args.model)
    if model.kind == "hdp":
        ordered = [tid for tid, _ in model.topic_weights()]
    else:
        ordered = list(range(model.num_topics))
    if args.limit is not None:
        ordered = ordered[: args.limit]
    for tid in ordered:
        words = model.top_words(tid, args.n)
        print(f"{tid}: {', '.join(words)}")
    return 0


class _Parser(argparse.ArgumentParser):
    # Usage problems are exit code 1, not argparse's default 2.
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_common_corpus_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML config file (flat keys)")
    p.add_argument("--input", help="input CSV (id,text,labels,group)")
    p.add_argument("--stopwords", help="stopword list, one term per line")
    p.add_argument("--geo-words", dest="geo_words", help="geographic word list")
    p.add_argument("--min-token-len", dest="min_token_len", type=int)
    p.add_argument("--bigram-min-count", dest="bigram_min_count", type=int)
    p.add_argument("--bigram-threshold", dest="bigram_threshold", type=float)
    p.add_argument("--bigram-mode", dest="bigram_mode", choices=["append", "replace"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="topicscope", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a planted-topic corpus CSV")
    p_synth.add_argument("--out", required=True, help="output CSV path")
    p_synth.add_argument("--num-topics", dest="num_topics", type=int, default=5)
    p_synth.add_argument("--vocab-size", dest="vocab_size", type=int, default=200)
    p_synth.add_argument("--num-docs", dest="num_docs", type=int, default=500)
    p_synth.add_argument("--doc-len-mean", dest="doc_len_mean", type=float, default=60.0)
    p_synth.add_argument(
        "--doc-topic-alpha", dest="doc_topic_alpha", type=float, default=0.1
    )
    p_synth.add_argument(
        "--topic-concentration", dest="topic_concentration", type=float, default=0.05
    )
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.set_defaults(func=cmd_synth)

    p_stats = sub.add_parser("stats", help="corpus summary statistics")
    _add_common_corpus_flags(p_stats)
    p_stats.add_argument(
        "--group-by", dest="group_by", action="store_true", help="per-group table"
    )
    p_stats.add_argument("--json", help="also write the stats as JSON here")
    p_stats.set_defaults(func=cmd_stats)

    p_sweep = sub.add_parser("sweep", help="fit models across K and report")
    _add_common_corpus_flags(p_sweep)
    p_sweep.add_argument("--output-dir", dest="output_dir")
    p_sweep.add_argument("--dataset-tag", dest="dataset_tag")
    p_sweep.add_argument("--models", help="comma list from {lda,hdp}")
    p_sweep.add_argument("--k-list", dest="k_list", help="comma list of sweep K values")
    p_sweep.add_argument("--seed", type=int)
    p_sweep.add_argument("--lda-alpha", dest="lda_alpha", type=float)
    p_sweep.add_argument("--lda-eta", dest="lda_eta", type=float)
    p_sweep.add_argument("--lda-passes", dest="lda_passes", type=int)
    p_sweep.add_argument("--lda-minibatch-size", dest="lda_minibatch_size", type=int)
    p_sweep.add_argument("--lda-tau0", dest="lda_tau0", type=float)
    p_sweep.add_argument("--lda-kappa", dest="lda_kappa", type=float)
    p_sweep.add_argument("--hdp-max-topics", dest="hdp_max_topics", type=int)
    p_sweep.add_argument(
        "--hdp-doc-max-topics", dest="hdp_doc_max_topics", type=int
    )
    p_sweep.add_argument("--hdp-gamma", dest="hdp_gamma", type=float)
    p_sweep.add_argument("--hdp-alpha0", dest="hdp_alpha0", type=float)
    p_sweep.add_argument("--hdp-eta", dest="hdp_eta", type=float)
    p_sweep.add_argument("--hdp-tau0", dest="hdp_tau0", type=float)
    p_sweep.add_argument("--hdp-kappa", dest="hdp_kappa", type=float)
    p_sweep.add_argument("--hdp-passes", dest="hdp_passes", type=int)
    p_sweep.add_argument("--hdp-minibatch-size", dest="hdp_minibatch_size", type=int)
    p_sweep.add_argument("--window-size", dest="window_size", type=int)
    p_sweep.add_argument("--top-n", dest="top_n", type=int)
    p_sweep.add_argument(
        "--similarity-normalization",
        dest="similarity_normalization",
        choices=["cosine", "raw"],
    )
    p_sweep.set_defaults(func=cmd_sweep)

    p_topics = sub.add_parser("topics", help="print top words of a saved model")
    p_topics.add_argument("--model", required=True, help="model artifact path")
    p_topics.add_argument("--n", type=int, default=10)
    p_topics.add_argument("--limit", type=int, help="show at most this many topics")
    p_topics.set_defaults(func=cmd_topics)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits directly for --help (0) and usage errors (1).
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"topicscope: config error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"topicscope: data error: {exc}", file=sys.stderr)
        return 2
    except TopicScopeError as exc:
        print(f"topicscope: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
