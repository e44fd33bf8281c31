"""JSON encoding of channels, configs, and analysis bundles.

Complex scalars serialize as two-element arrays [re, im]; complex matrices as
row-major nested arrays of such pairs; real matrices as plain nested floats.
Channel documents are self-describing:

    {"kind": "kraus" | "choi" | "super" | "stochastic", "dim": d, "data": ...}

Floats round-trip bit-exactly through json (shortest-repr encoding).
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .channels import (
    Channel,
    ChoiMatrix,
    KrausSet,
    Superoperator,
    from_choi,
    from_kraus,
    from_stochastic,
    from_superoperator,
)
from .config import Config
from .errors import DimensionError
from .lift import CandidateLift


def encode_complex(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def encode_complex_matrix(m) -> list:
    a = np.asarray(m, dtype=complex)
    return [[encode_complex(z) for z in row] for row in a]


def decode_complex_matrix(data) -> np.ndarray:
    rows = []
    for row in data:
        rows.append([complex(entry[0], entry[1]) for entry in row])
    return np.array(rows, dtype=complex)


def encode_real_matrix(m) -> list:
    return [[float(x) for x in row] for row in np.asarray(m, dtype=float)]


def channel_to_document(ch: Channel, kind: str = "super") -> dict:
    if kind == "kraus":
        if ch.kraus is None:
            raise ValueError("channel has no Kraus representation")
        data = [encode_complex_matrix(k) for k in ch.kraus.operators]
    elif kind == "super":
        data = encode_complex_matrix(ch.super.matrix)
    elif kind == "choi":
        data = encode_complex_matrix(ch.choi().matrix)
    else:
        raise ValueError(f"cannot emit channel as kind {kind!r}")
    return {"kind": kind, "dim": ch.dim, "data": data}


def document_to_channel(doc: dict, config: Config) -> Channel:
    """Build a channel from a parsed document; raises on malformed input."""
    if isinstance(doc, list):
        # Bare nested real array: accepted as a stochastic matrix.
        return from_stochastic(np.asarray(doc, dtype=float), config)
    if not isinstance(doc, dict):
        raise DimensionError("channel document must be an object or a nested array")
    kind = doc.get("kind")
    dim = int(doc.get("dim", 0))
    data = doc.get("data")
    if kind == "kraus":
        ops = tuple(decode_complex_matrix(k) for k in data)
        return from_kraus(KrausSet(dim, ops), config)
    if kind == "super":
        return from_superoperator(Superoperator(dim, decode_complex_matrix(data)), config)
    if kind == "choi":
        return from_choi(ChoiMatrix(dim, decode_complex_matrix(data)), config)
    if kind == "stochastic":
        return from_stochastic(np.asarray(data, dtype=float), config)
    raise DimensionError(f"unknown channel kind {kind!r}")


def stochastic_matrix_from_document(doc) -> np.ndarray:
    """Accept either a wrapped stochastic document or a bare nested array."""
    if isinstance(doc, dict):
        if doc.get("kind") != "stochastic":
            raise DimensionError("expected a stochastic channel document")
        return np.asarray(doc["data"], dtype=float)
    return np.asarray(doc, dtype=float)


def candidate_from_document(doc: dict) -> CandidateLift:
    """Candidate lift document: {"basis": [...], "alpha": [[..]], "images": [...]}.

    ``images[i] = E(basis[i])``; omitted images mean E is the inclusion.
    """
    basis = tuple(decode_complex_matrix(b) for b in doc["basis"])
    alpha = decode_complex_matrix(doc["alpha"])
    if "images" in doc and doc["images"] is not None:
        images = tuple(decode_complex_matrix(b) for b in doc["images"])
    else:
        images = basis
    return CandidateLift(basis=basis, alpha=alpha, images=images)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.complexfloating, complex)):
        return encode_complex(complex(obj))
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return encode_complex_matrix(obj) if obj.ndim == 2 else [
                encode_complex(z) for z in obj
            ]
        return obj.tolist()
    return obj


def dumps(obj: Any, indent: int | None = 2) -> str:
    return json.dumps(_jsonable(obj), indent=indent)


def load_json(path: str) -> Any:
    with open(path) as fh:
        return json.load(fh)
