"""Supervised training: initialization, the optimizer, and the epoch loop.

The document-vector model is fit first (unsupervised) and stays frozen; the
classifier then trains on batches with one optimizer step per batch. The
returned parameters are the ones from the epoch with the best validation
loss, not necessarily the last.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, fields
from typing import Sequence

import numpy as np

from swde.corpus import (
    CharVocab,
    EncodedTitle,
    Post,
    build_char_vocab,
    build_token_vocab,
    compute_k,
    encode_title,
    split_train_val,
)
from swde.doc2vec import Doc2VecConfig, build_documents, train_doc2vec
from swde.errors import (
    ConfigError,
    DegenerateInputError,
    NumericError,
    UnlabeledPostsError,
)
from swde.model import (
    ModelDims,
    ModelParams,
    TrainedModel,
    forward,
    param_shapes,
    params_from_tensors,
)
from swde.numerics import Tape, Tensor, ops

PAD_ROW = 0


@dataclass
class TrainConfig:
    epochs: int = 20
    batch_size: int = 256
    seed: int = 0
    adadelta_rho: float = 0.95
    adadelta_eps: float = 1e-6
    grad_clip: float | None = None  # optional global-norm ceiling
    k_cap: int = 30
    l_char: int = 16
    d_char: int = 32
    channels: tuple[int, int, int] = (64, 64, 128)
    widths: tuple[int, int, int] = (3, 3, 3)
    d_h: int = 64
    d_a: int = 64
    d_t: int = 64
    d1: int = 128
    d2: int = 64
    char_min_count: int = 5
    token_min_count: int = 2
    doc2vec_epochs: int = 20
    doc2vec_negative: int = 5
    doc2vec_alpha: float = 0.025
    doc2vec_min_alpha: float = 1e-4
    infer_steps: int = 100
    # stop once training accuracy reaches this level (None = never check)
    target_train_accuracy: float | None = None

    def validate(self) -> None:
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 < self.adadelta_rho < 1.0:
            raise ConfigError(f"adadelta_rho must be in (0, 1), got {self.adadelta_rho}")
        if self.adadelta_eps <= 0.0:
            raise ConfigError(f"adadelta_eps must be > 0, got {self.adadelta_eps}")
        if self.grad_clip is not None and self.grad_clip <= 0.0:
            raise ConfigError(f"grad_clip must be > 0 when set, got {self.grad_clip}")
        if self.k_cap < 1:
            raise ConfigError(f"k_cap must be >= 1, got {self.k_cap}")
        if len(self.channels) != 3:
            raise ConfigError(f"channels must have three entries, got {self.channels}")
        if len(self.widths) != 3:
            raise ConfigError(f"widths must have three entries, got {self.widths}")
        if self.char_min_count < 1:
            raise ConfigError(f"char_min_count must be >= 1, got {self.char_min_count}")
        if self.token_min_count < 1:
            raise ConfigError(f"token_min_count must be >= 1, got {self.token_min_count}")
        if self.infer_steps < 1:
            raise ConfigError(f"infer_steps must be >= 1, got {self.infer_steps}")
        if self.target_train_accuracy is not None and not 0.0 < self.target_train_accuracy <= 1.0:
            raise ConfigError(
                f"target_train_accuracy must be in (0, 1], got {self.target_train_accuracy}"
            )

    @classmethod
    def from_dict(cls, raw: dict) -> "TrainConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(raw) - set(known))
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
        values = dict(raw)
        for key in ("channels", "widths"):
            if key in values:
                if not isinstance(values[key], (list, tuple)):
                    raise ConfigError(f"{key} must be a list of three integers")
                values[key] = tuple(values[key])
        config = cls(**values)
        config.validate()
        return config

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    def dims_for(self, char_vocab_size: int, k: int) -> ModelDims:
        return ModelDims(
            char_vocab_size=char_vocab_size,
            k=k,
            l_char=self.l_char,
            d_char=self.d_char,
            channels=self.channels,
            widths=self.widths,
            d_h=self.d_h,
            d_a=self.d_a,
            d_t=self.d_t,
            d1=self.d1,
            d2=self.d2,
        )


def glorot_init(shape: Sequence[int], rng: np.random.Generator, fan_in: int | None = None,
                fan_out: int | None = None) -> Tensor:
    """Uniform init in +/- sqrt(6 / (fan_in + fan_out)).

    For 2-D shapes the fans default to (columns, rows); conv filters pass
    their receptive-field fans explicitly.
    """
    if fan_in is None or fan_out is None:
        if len(shape) != 2:
            raise DegenerateInputError(
                f"fans must be given explicitly for shape {tuple(shape)}"
            )
        fan_out, fan_in = shape
    if fan_in < 1 or fan_out < 1:
        raise DegenerateInputError(f"fans must be >= 1, got fan_in={fan_in}, fan_out={fan_out}")
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    return Tensor(rng.uniform(-bound, bound, size=tuple(shape)))


def init_params(dims: ModelDims, seed: int) -> ModelParams:
    """Fresh parameters: Glorot for weights, zeros for biases.

    Character embeddings start uniform in +/-0.1 with the PAD row zeroed;
    that row also never receives updates (see train()).
    """
    dims.validate()
    rng = np.random.default_rng(seed)
    tensors: dict[str, Tensor] = {}
    for name, shape in param_shapes(dims).items():
        if name == "char_embeddings":
            emb = rng.uniform(-0.1, 0.1, size=shape)
            emb[PAD_ROW] = 0.0
            tensors[name] = Tensor(emb)
        elif name.endswith(("_bias", "_b")) or name in ("lstm_fwd_d", "lstm_bwd_d", "out_b"):
            tensors[name] = Tensor(np.zeros(shape))
        elif name.endswith("_filters"):
            c_out, c_in, width = shape
            tensors[name] = glorot_init(
                shape, rng, fan_in=c_in * width, fan_out=c_out * width
            )
        elif name == "attn_u":
            tensors[name] = glorot_init(shape, rng, fan_in=shape[0], fan_out=1)
        else:
            tensors[name] = glorot_init(shape, rng)
    return params_from_tensors(dims, tensors)


class Adadelta:
    """Accumulator-based steps; no global learning rate.

    Per entry: Eg <- rho*Eg + (1-rho)*g^2; dx = -sqrt(Ex+eps)/sqrt(Eg+eps)*g;
    Ex <- rho*Ex + (1-rho)*dx^2; x <- x + dx.
    """

    def __init__(self, named: dict[str, Tensor], rho: float = 0.95, eps: float = 1e-6):
        if not 0.0 < rho < 1.0:
            raise ConfigError(f"rho must be in (0, 1), got {rho}")
        if eps <= 0.0:
            raise ConfigError(f"eps must be > 0, got {eps}")
        self.named = named
        self.rho = rho
        self.eps = eps
        self.sq_grad = {name: np.zeros_like(t.data) for name, t in named.items()}
        self.sq_step = {name: np.zeros_like(t.data) for name, t in named.items()}

    def step(self, grads: dict[str, np.ndarray]) -> None:
        rho, eps = self.rho, self.eps
        for name, tensor in self.named.items():
            g = grads[name]
            if g.shape != tensor.data.shape:
                raise NumericError(
                    f"gradient for {name} has shape {g.shape}, expected {tensor.data.shape}"
                )
            if not np.isfinite(g).all():
                raise NumericError(f"non-finite gradient for {name}")
            eg = self.sq_grad[name]
            ex = self.sq_step[name]
            eg *= rho
            eg += (1.0 - rho) * g * g
            dx = -np.sqrt(ex + eps) / np.sqrt(eg + eps) * g
            ex *= rho
            ex += (1.0 - rho) * dx * dx
            tensor.data += dx


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most max_norm."""
    total = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if total > max_norm and total > 0.0:
        factor = max_norm / total
        for g in grads.values():
            g *= factor
    return total


@dataclass
class EpochRow:
    epoch: int
    train_loss: float
    val_loss: float


@dataclass
class _Prepared:
    grid: EncodedTitle
    enrichment: np.ndarray
    label: float


def _require_labels(posts: Sequence[Post]) -> None:
    unlabeled = [p.id for p in posts if p.label is None]
    if unlabeled:
        raise UnlabeledPostsError(unlabeled)


def _prepare(posts, char_vocab, d2v, k, l_char) -> list[_Prepared]:
    prepared = []
    for post in posts:
        grid = encode_title(post.title, char_vocab, k, l_char)
        title_vec = d2v.vector_for(f"title:{post.id}")
        body_vec = d2v.vector_for(f"body:{post.id}")
        assert title_vec is not None and body_vec is not None
        prepared.append(
            _Prepared(grid=grid, enrichment=title_vec * body_vec, label=float(post.label))
        )
    return prepared


def _mean_loss(params: ModelParams, prepared: Sequence[_Prepared]) -> float:
    total = 0.0
    for item in prepared:
        p = forward(params, item.grid, Tensor(item.enrichment))
        total += ops.bce(p, item.label).item()
    return total / len(prepared)


def _accuracy(params: ModelParams, prepared: Sequence[_Prepared]) -> float:
    hits = 0
    for item in prepared:
        p = forward(params, item.grid, Tensor(item.enrichment)).item()
        hits += int((p >= 0.5) == (item.label >= 0.5))
    return hits / len(prepared)


@dataclass
class TrainResult:
    model: TrainedModel
    trace: list[EpochRow] = field(default_factory=list)


def train(posts: Sequence[Post], config: TrainConfig) -> TrainResult:
    """Full pipeline: split 4:1, then fit on the resulting splits."""
    config.validate()
    _require_labels(posts)
    train_posts, val_posts = split_train_val(posts, config.seed)
    return train_on_splits(train_posts, val_posts, config)


def train_on_splits(
    train_posts: Sequence[Post], val_posts: Sequence[Post], config: TrainConfig
) -> TrainResult:
    """Fit with caller-chosen splits (vocabularies still from train only)."""
    config.validate()
    _require_labels(train_posts)
    _require_labels(val_posts)
    if not train_posts or not val_posts:
        raise DegenerateInputError("both splits must be non-empty")

    k = compute_k(train_posts, cap=config.k_cap)
    char_vocab = build_char_vocab((p.title for p in train_posts), config.char_min_count)
    token_vocab = build_token_vocab(
        (tokens for _, tokens in build_documents(train_posts)), config.token_min_count
    )
    # document vectors cover both splits (one shared unsupervised fit); the
    # vocabulary still comes from the training split alone
    train_ids = {p.id for p in train_posts}
    extra_val = [p for p in val_posts if p.id not in train_ids]
    d2v = train_doc2vec(
        build_documents(list(train_posts) + extra_val),
        token_vocab,
        Doc2VecConfig(
            epochs=config.doc2vec_epochs,
            negative=config.doc2vec_negative,
            alpha=config.doc2vec_alpha,
            min_alpha=config.doc2vec_min_alpha,
            seed=config.seed,
        ),
    )

    dims = config.dims_for(char_vocab.size, k)
    params = init_params(dims, config.seed)
    named = params.named()
    optimizer = Adadelta(named, rho=config.adadelta_rho, eps=config.adadelta_eps)

    train_set = _prepare(train_posts, char_vocab, d2v, k, config.l_char)
    val_set = _prepare(val_posts, char_vocab, d2v, k, config.l_char)

    shuffler = random.Random(config.seed)
    order = list(range(len(train_set)))
    trace: list[EpochRow] = []
    best_val = math.inf
    best_state: dict[str, np.ndarray] = {}

    for epoch in range(1, config.epochs + 1):
        shuffler.shuffle(order)
        epoch_loss = 0.0
        for at in range(0, len(order), config.batch_size):
            batch = [train_set[i] for i in order[at : at + config.batch_size]]
            with Tape() as tape:
                losses = []
                for item in batch:
                    p = forward(params, item.grid, Tensor(item.enrichment))
                    losses.append(ops.bce(p, item.label))
                stacked = losses[0] if len(losses) == 1 else ops.concat_rows(*losses)
                batch_loss = ops.scale(ops.sum_all(stacked), 1.0 / len(batch))
            tape.backward(batch_loss)
            grads = {name: tape.grad(t) for name, t in named.items()}
            grads["char_embeddings"][PAD_ROW] = 0.0  # PAD stays a true zero
            if config.grad_clip is not None:
                clip_gradients(grads, config.grad_clip)
            optimizer.step(grads)
            epoch_loss += batch_loss.item() * len(batch)

        val_loss = _mean_loss(params, val_set)
        trace.append(
            EpochRow(epoch=epoch, train_loss=epoch_loss / len(train_set), val_loss=val_loss)
        )
        if val_loss < best_val:
            best_val = val_loss
            best_state = {name: t.data.copy() for name, t in named.items()}
        if (
            config.target_train_accuracy is not None
            and _accuracy(params, train_set) >= config.target_train_accuracy
        ):
            # the point of the target is the current parameters; don't let the
            # best-validation restore below roll them back
            best_state = {name: t.data.copy() for name, t in named.items()}
            break

    if best_state:
        for name, tensor in named.items():
            tensor.data[...] = best_state[name]

    model = TrainedModel(
        dims=dims,
        params=params,
        char_vocab=char_vocab,
        d2v=d2v,
        config_echo=config.as_dict(),
    )
    return TrainResult(model=model, trace=trace)
