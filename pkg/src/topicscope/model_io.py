"""Versioned model artifacts.

A model is stored as a single JSON file: config, vocabulary, counters,
and every float64 parameter array as base64-encoded raw bytes. Raw bytes
round-trip bit-exactly, and the encoder is fully deterministic, so two
identical models serialize to identical files.
"""

from __future__ import annotations

import base64
import dataclasses
import hashlib
import json
from pathlib import Path
from typing import Union

import numpy as np

from .errors import DataError
from .hdp import HdpConfig, HdpModel
from .lda import LdaConfig, LdaModel

FORMAT_NAME = "topicscope.model"
FORMAT_VERSION = 1

Model = Union[LdaModel, HdpModel]


def _encode_array(arr: np.ndarray) -> dict:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    return {
        "dtype": "float64",
        "shape": list(arr.shape),
        "data": base64.b64encode(arr.tobytes()).decode("ascii"),
    }


def _decode_array(payload: dict) -> np.ndarray:
    raw = base64.b64decode(payload["data"])
    arr = np.frombuffer(raw, dtype=payload["dtype"]).copy()
    return arr.reshape(payload["shape"])


def vocabulary_hash(terms: list[str]) -> str:
    return hashlib.sha256("\n".join(terms).encode("utf-8")).hexdigest()


def save_model(model: Model, path: str | Path) -> None:
    """Write a model artifact; overwrites any existing file."""
    envelope: dict = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": model.kind,
        "config": dataclasses.asdict(model.config),
        "update_count": model.update_count,
        "population_size": model.population_size,
        "vocabulary": model.terms,
        "vocab_sha256": vocabulary_hash(model.terms),
        "arrays": {"topic_word_params": _encode_array(model.lam)},
    }
    if isinstance(model, HdpModel):
        envelope["arrays"]["stick_a"] = _encode_array(model.stick_a)
        envelope["arrays"]["stick_b"] = _encode_array(model.stick_b)
        envelope["arrays"]["table_mass"] = _encode_array(model.table_mass)
    else:
        envelope["elbo_trace"] = model.elbo_trace
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(envelope, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_model(path: str | Path) -> Model:
    """Read a model artifact written by ``save_model``."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"model artifact not found: {path}")
    try:
        with open(path, encoding="utf-8") as fh:
            envelope = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"unreadable model artifact {path}: {exc}") from exc
    if envelope.get("format") != FORMAT_NAME:
        raise DataError(f"{path} is not a {FORMAT_NAME} artifact")
    if envelope.get("version") != FORMAT_VERSION:
        raise DataError(
            f"{path} has unsupported artifact version {envelope.get('version')}"
        )
    kind = envelope.get("kind")
    terms = envelope["vocabulary"]
    if envelope.get("vocab_sha256") != vocabulary_hash(terms):
        raise DataError(f"{path}: vocabulary hash mismatch, artifact corrupted")
    arrays = envelope["arrays"]
    if kind == "lda":
        return LdaModel(
            config=LdaConfig(**envelope["config"]),
            lam=_decode_array(arrays["topic_word_params"]),
            terms=terms,
            population_size=envelope["population_size"],
            update_count=envelope["update_count"],
            elbo_trace=list(envelope.get("elbo_trace", [])),
        )
    if kind == "hdp":
        return HdpModel(
            config=HdpConfig(**envelope["config"]),
            lam=_decode_array(arrays["topic_word_params"]),
            stick_a=_decode_array(arrays["stick_a"]),
            stick_b=_decode_array(arrays["stick_b"]),
            table_mass=_decode_array(arrays["table_mass"]),
            terms=terms,
            population_size=envelope["population_size"],
            update_count=envelope["update_count"],
        )
    raise DataError(f"{path}: unknown model kind {kind!r}")
