"""Versioned binary model file: fixed header, JSON manifest, f32 payload.

Layout: magic ``SWDE`` (4 bytes), format version (u32 LE), manifest length
(u64 LE), manifest (UTF-8 JSON, canonical key order), then every tensor as
little-endian 32-bit floats at contiguous offsets. Weights live as f64 in
memory and f32 at rest; reloading and saving again is byte-identical because
the in-memory values are already exactly representable in f32.
"""

from __future__ import annotations

import json

import numpy as np

from swde.corpus import CharVocab, TokenVocab
from swde.doc2vec import Doc2VecModel, _noise_table
from swde.errors import ConfigError, ContainerError, DegenerateInputError
from swde.model import ModelDims, TrainedModel, param_shapes, params_from_tensors
from swde.numerics import Tensor

MAGIC = b"SWDE"
VERSION = 1
_HEADER_LEN = 4 + 4 + 8


def _ordered_arrays(tm: TrainedModel) -> list[tuple[str, np.ndarray]]:
    arrays = [(name, t.data) for name, t in tm.params.named().items()]
    arrays.append(("doc_vectors", tm.d2v.doc_vectors))
    arrays.append(("word_output_vectors", tm.d2v.word_output_vectors))
    return arrays


def save_model(tm: TrainedModel, path) -> None:
    arrays = _ordered_arrays(tm)
    tensors = []
    chunks = []
    offset = 0
    for name, arr in arrays:
        raw = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        tensors.append(
            {"name": name, "shape": list(arr.shape), "dtype": "f32", "offset": offset}
        )
        chunks.append(raw)
        offset += len(raw)

    dims = tm.dims
    manifest = {
        "config": tm.config_echo,
        "char_vocab": tm.char_vocab.ordered_chars(),
        "dims": {
            "char_vocab_size": dims.char_vocab_size,
            "k": dims.k,
            "l_char": dims.l_char,
            "d_char": dims.d_char,
            "channels": list(dims.channels),
            "widths": list(dims.widths),
            "d_h": dims.d_h,
            "d_a": dims.d_a,
            "d_t": dims.d_t,
            "d1": dims.d1,
            "d2": dims.d2,
            "doc_dim": dims.doc_dim,
        },
        "doc_ids": list(tm.d2v.doc_ids),
        "doc2vec": {
            "negative": tm.d2v.negative,
            "alpha": tm.d2v.alpha,
            "min_alpha": tm.d2v.min_alpha,
            "epoch_losses": list(tm.d2v.epoch_losses),
        },
        "k": dims.k,
        "tensors": tensors,
        "token_counts": tm.d2v.vocab.counts[1:],
        "tokens": tm.d2v.vocab.ordered_tokens(),
    }
    encoded = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")

    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(VERSION.to_bytes(4, "little"))
        fh.write(len(encoded).to_bytes(8, "little"))
        fh.write(encoded)
        for raw in chunks:
            fh.write(raw)


def _read_exact(blob: bytes, what: str) -> bytes:
    if len(blob) < _HEADER_LEN:
        raise ContainerError(f"bad container: truncated before {what}")
    return blob


def load_model(path) -> TrainedModel:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise ContainerError(f"cannot read model container {path}: {exc}") from exc

    if len(blob) < _HEADER_LEN:
        raise ContainerError("bad container: file shorter than the fixed header")
    if blob[:4] != MAGIC:
        raise ContainerError(f"bad container: magic bytes {blob[:4]!r}")
    version = int.from_bytes(blob[4:8], "little")
    if version != VERSION:
        raise ContainerError(f"bad container: unsupported format version {version}")
    manifest_len = int.from_bytes(blob[8:16], "little")
    if _HEADER_LEN + manifest_len > len(blob):
        raise ContainerError("bad container: manifest length exceeds file size")
    try:
        manifest = json.loads(blob[16 : 16 + manifest_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ContainerError(f"bad container: manifest is not valid JSON ({exc})") from exc

    required = {
        "config", "char_vocab", "dims", "doc_ids", "doc2vec", "k",
        "tensors", "token_counts", "tokens",
    }
    missing = sorted(required - set(manifest))
    if missing:
        raise ContainerError(f"bad container: manifest lacks {', '.join(missing)}")

    payload = blob[16 + manifest_len :]
    arrays: dict[str, np.ndarray] = {}
    expected_offset = 0
    for entry in manifest["tensors"]:
        name, shape, dtype, offset = (
            entry.get("name"), entry.get("shape"), entry.get("dtype"), entry.get("offset"),
        )
        if dtype != "f32":
            raise ContainerError(f"bad container: tensor {name} has dtype {dtype}")
        if offset != expected_offset:
            raise ContainerError(
                f"bad container: tensor {name} at offset {offset}, expected {expected_offset}"
            )
        count = int(np.prod(shape, dtype=np.int64)) if shape else 0
        nbytes = 4 * count
        if offset + nbytes > len(payload):
            raise ContainerError(f"bad container: tensor {name} overruns the payload")
        flat = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        arrays[name] = flat.astype(np.float64).reshape(shape)
        expected_offset += nbytes
    if expected_offset != len(payload):
        raise ContainerError(
            f"bad container: payload holds {len(payload)} bytes, manifest covers {expected_offset}"
        )

    try:
        raw_dims = dict(manifest["dims"])
        raw_dims["channels"] = tuple(raw_dims["channels"])
        raw_dims["widths"] = tuple(raw_dims["widths"])
        dims = ModelDims(**raw_dims)
        dims.validate()

        named = {
            name: Tensor(arrays[name])
            for name in param_shapes(dims)
            if name in arrays
        }
        params = params_from_tensors(dims, named)

        char_vocab = CharVocab(manifest["char_vocab"])
        vocab = TokenVocab(manifest["tokens"], manifest["token_counts"])
        dist, cum = _noise_table(vocab)
        d2v = Doc2VecModel(
            doc_ids=list(manifest["doc_ids"]),
            doc_vectors=arrays["doc_vectors"],
            word_output_vectors=arrays["word_output_vectors"],
            noise_distribution=dist,
            cum_table=cum,
            vocab=vocab,
            negative=int(manifest["doc2vec"]["negative"]),
            alpha=float(manifest["doc2vec"]["alpha"]),
            min_alpha=float(manifest["doc2vec"]["min_alpha"]),
            epoch_losses=list(manifest["doc2vec"]["epoch_losses"]),
        )
    except (ConfigError, DegenerateInputError, KeyError, TypeError, ValueError) as exc:
        raise ContainerError(f"bad container: inconsistent contents ({exc})") from exc

    if char_vocab.size != dims.char_vocab_size:
        raise ContainerError(
            f"bad container: char vocab size {char_vocab.size} does not match "
            f"dims {dims.char_vocab_size}"
        )
    if d2v.doc_vectors.shape != (len(d2v.doc_ids), dims.doc_dim):
        raise ContainerError(
            f"bad container: doc vectors shaped {d2v.doc_vectors.shape} for "
            f"{len(d2v.doc_ids)} ids"
        )

    return TrainedModel(
        dims=dims,
        params=params,
        char_vocab=char_vocab,
        d2v=d2v,
        config_echo=dict(manifest["config"]),
    )
