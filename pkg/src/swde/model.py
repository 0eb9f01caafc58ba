"""Architecture dimensions, the named-parameter registry, and full forward.

The wiring: character grid -> subword conv features r_1..r_K -> BiLSTM
annotations -> attention context -> title head; in parallel the record's
title and body document vectors are multiplied element-wise; both halves are
concatenated and pushed through the dense stack to a probability.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from swde.classifier import ClassifierParams, classify, enrich
from swde.corpus import CharVocab, EncodedTitle, Post, encode_title, tokenize
from swde.doc2vec import DIM as DOC_DIM
from swde.doc2vec import Doc2VecModel, infer_vector
from swde.errors import ConfigError, DegenerateInputError
from swde.numerics import Tensor
from swde.recurrent import (
    AttentionParams,
    LstmDirectionParams,
    attention,
    bilstm,
    title_head,
)
from swde.subword import SubwordEncoderParams, check_grid_width
from swde.subword import encode_title as encode_grid


@dataclass(frozen=True)
class ModelDims:
    char_vocab_size: int
    k: int
    l_char: int = 16
    d_char: int = 32
    channels: tuple[int, int, int] = (64, 64, 128)
    widths: tuple[int, int, int] = (3, 3, 3)
    d_h: int = 64
    d_a: int = 64
    d_t: int = 64
    d1: int = 128
    d2: int = 64
    doc_dim: int = DOC_DIM

    def validate(self) -> None:
        if len(self.channels) != 3 or len(self.widths) != 3:
            raise ConfigError(
                f"conv stack is three layers; got channels {self.channels}, "
                f"widths {self.widths}"
            )
        positive = {
            "char_vocab_size": self.char_vocab_size,
            "k": self.k,
            "l_char": self.l_char,
            "d_char": self.d_char,
            "d_h": self.d_h,
            "d_a": self.d_a,
            "d_t": self.d_t,
            "d1": self.d1,
            "d2": self.d2,
        }
        for name, value in positive.items():
            if value < 1:
                raise ConfigError(f"{name} must be >= 1, got {value}")
        if any(c < 1 for c in self.channels) or any(w < 1 for w in self.widths):
            raise ConfigError(f"conv channels/widths must be >= 1: {self.channels}, {self.widths}")
        if self.char_vocab_size < 2:
            raise ConfigError("character vocabulary must include PAD and UNK")
        if self.doc_dim != DOC_DIM:
            raise ConfigError(f"document vectors are fixed at {DOC_DIM} dimensions")
        check_grid_width(self.l_char, self.widths)


def param_shapes(dims: ModelDims) -> dict[str, tuple[int, ...]]:
    """Name -> shape for every learnable tensor, in a stable order."""
    c1, c2, c3 = dims.channels
    w1, w2, w3 = dims.widths
    shapes: dict[str, tuple[int, ...]] = {
        "char_embeddings": (dims.char_vocab_size, dims.d_char),
        "conv1_filters": (c1, dims.d_char, w1),
        "conv1_bias": (c1,),
        "conv2_filters": (c2, c1, w2),
        "conv2_bias": (c2,),
        "conv3_filters": (c3, c2, w3),
        "conv3_bias": (c3,),
    }
    for direction in ("fwd", "bwd"):
        shapes[f"lstm_{direction}_W"] = (3 * dims.d_h, dims.d_h + c3)
        shapes[f"lstm_{direction}_b"] = (3 * dims.d_h,)
        shapes[f"lstm_{direction}_V"] = (dims.d_h, dims.d_h + c3)
        shapes[f"lstm_{direction}_d"] = (dims.d_h,)
    shapes.update(
        {
            "attn_W": (dims.d_a, 2 * dims.d_h),
            "attn_b": (dims.d_a,),
            "attn_u": (dims.d_a,),
            "title_w": (dims.d_t, 2 * dims.d_h),
            "title_b": (dims.d_t,),
            "dense1_w": (dims.d1, dims.d_t + dims.doc_dim),
            "dense1_b": (dims.d1,),
            "dense2_w": (dims.d2, dims.d1),
            "dense2_b": (dims.d2,),
            "out_w": (1, dims.d2),
            "out_b": (1,),
        }
    )
    return shapes


@dataclass
class ModelParams:
    subword: SubwordEncoderParams
    fwd: LstmDirectionParams
    bwd: LstmDirectionParams
    attn: AttentionParams
    title_w: Tensor
    title_b: Tensor
    cls: ClassifierParams

    def named(self) -> dict[str, Tensor]:
        out = {"char_embeddings": self.subword.char_embeddings}
        for i, (filters, bias) in enumerate(
            zip(self.subword.conv_filters, self.subword.conv_biases), start=1
        ):
            out[f"conv{i}_filters"] = filters
            out[f"conv{i}_bias"] = bias
        for direction, p in (("fwd", self.fwd), ("bwd", self.bwd)):
            out[f"lstm_{direction}_W"] = p.W
            out[f"lstm_{direction}_b"] = p.b
            out[f"lstm_{direction}_V"] = p.V
            out[f"lstm_{direction}_d"] = p.d
        out["attn_W"] = self.attn.W_a
        out["attn_b"] = self.attn.b_a
        out["attn_u"] = self.attn.u_a
        out["title_w"] = self.title_w
        out["title_b"] = self.title_b
        out["dense1_w"] = self.cls.dense1_w
        out["dense1_b"] = self.cls.dense1_b
        out["dense2_w"] = self.cls.dense2_w
        out["dense2_b"] = self.cls.dense2_b
        out["out_w"] = self.cls.out_w
        out["out_b"] = self.cls.out_b
        return out


def params_from_tensors(dims: ModelDims, tensors: Mapping[str, Tensor]) -> ModelParams:
    expected = param_shapes(dims)
    missing = sorted(set(expected) - set(tensors))
    if missing:
        raise ConfigError(f"missing parameter tensors: {', '.join(missing)}")
    for name, shape in expected.items():
        if tuple(tensors[name].shape) != shape:
            raise ConfigError(
                f"parameter {name} has shape {tensors[name].shape}, expected {shape}"
            )
    return ModelParams(
        subword=SubwordEncoderParams(
            char_embeddings=tensors["char_embeddings"],
            conv_filters=[tensors[f"conv{i}_filters"] for i in (1, 2, 3)],
            conv_biases=[tensors[f"conv{i}_bias"] for i in (1, 2, 3)],
        ),
        fwd=LstmDirectionParams(
            W=tensors["lstm_fwd_W"],
            b=tensors["lstm_fwd_b"],
            V=tensors["lstm_fwd_V"],
            d=tensors["lstm_fwd_d"],
        ),
        bwd=LstmDirectionParams(
            W=tensors["lstm_bwd_W"],
            b=tensors["lstm_bwd_b"],
            V=tensors["lstm_bwd_V"],
            d=tensors["lstm_bwd_d"],
        ),
        attn=AttentionParams(
            W_a=tensors["attn_W"], b_a=tensors["attn_b"], u_a=tensors["attn_u"]
        ),
        title_w=tensors["title_w"],
        title_b=tensors["title_b"],
        cls=ClassifierParams(
            dense1_w=tensors["dense1_w"],
            dense1_b=tensors["dense1_b"],
            dense2_w=tensors["dense2_w"],
            dense2_b=tensors["dense2_b"],
            out_w=tensors["out_w"],
            out_b=tensors["out_b"],
        ),
    )


def forward(params: ModelParams, grid: EncodedTitle, enrichment: Tensor) -> Tensor:
    """Probability tensor of shape (1,) for one encoded post."""
    if grid.valid_token_count < 1:
        raise DegenerateInputError("cannot score a title with no tokens")
    rs = encode_grid(grid, params.subword)
    annotations = bilstm(rs, params.fwd, params.bwd)
    context, _ = attention(annotations, grid.valid_token_count, params.attn)
    title_vec = title_head(context, params.title_w, params.title_b)
    return classify(title_vec, enrichment, params.cls)


@dataclass
class TrainedModel:
    """Everything needed to score posts: weights, vocabularies, doc vectors."""

    dims: ModelDims
    params: ModelParams
    char_vocab: CharVocab
    d2v: Doc2VecModel
    config_echo: dict = field(default_factory=dict)


def _doc_vector(tm: TrainedModel, doc_id: str, tokens: list[str], infer_steps: int) -> np.ndarray:
    stored = tm.d2v.vector_for(doc_id)
    if stored is not None:
        return stored
    seed = zlib.crc32(doc_id.encode("utf-8"))
    return infer_vector(tm.d2v, tokens, steps=infer_steps, seed=seed, doc_id=doc_id).values


def doc_vectors_for(
    tm: TrainedModel, post: Post, infer_steps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """The post's (title, body) document vectors.

    Documents seen at training time use their stored vectors; unseen ones are
    inferred with a seed derived from the document id, so repeat calls agree.
    """
    title_vec = _doc_vector(tm, f"title:{post.id}", tokenize(post.title), infer_steps)
    body_vec = _doc_vector(tm, f"body:{post.id}", tokenize(post.body), infer_steps)
    return title_vec, body_vec


def enrichment_for(tm: TrainedModel, post: Post, infer_steps: int = 100) -> Tensor:
    """Element-wise product of the post's title and body document vectors."""
    title_vec, body_vec = doc_vectors_for(tm, post, infer_steps)
    return enrich(Tensor(title_vec), Tensor(body_vec))


def score_post(tm: TrainedModel, post: Post, infer_steps: int = 100) -> float:
    """Clickbait probability for one post."""
    grid = encode_title(post.title, tm.char_vocab, tm.dims.k, tm.dims.l_char)
    return forward(tm.params, grid, enrichment_for(tm, post, infer_steps)).item()
