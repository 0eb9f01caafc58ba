"""Distributed bag-of-words paragraph vectors with negative sampling.

Each corpus record contributes two documents, ``title:<id>`` and
``body:<id>``, trained jointly in one 300-dimensional space so the
element-wise product of a record's two vectors is meaningful.

Document token ids are sorted before training, which makes the pair stream a
function of the token multiset only: permuting a document's words cannot
change the learned vector at a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from swde.corpus import Post, TokenVocab, tokenize
from swde.errors import ConfigError, DegenerateInputError, DimensionError
from swde.numerics import backend
from swde.numerics.rng import shuffle_in_place

DIM = 300
_DOMAIN = 2**31
_MASK64 = (1 << 64) - 1


@dataclass
class Doc2VecConfig:
    epochs: int = 20
    negative: int = 5
    alpha: float = 0.025
    min_alpha: float = 1e-4
    seed: int = 0


@dataclass
class DocVector:
    doc_id: str
    values: np.ndarray  # (DIM,)
    oov: bool = False  # no in-vocabulary tokens backed this vector


@dataclass
class Doc2VecModel:
    doc_ids: list[str]
    doc_vectors: np.ndarray  # (num_docs, DIM)
    word_output_vectors: np.ndarray  # (vocab_size, DIM)
    noise_distribution: np.ndarray  # (vocab_size,), sums to 1
    cum_table: np.ndarray  # uint64 cumulative sampling table
    vocab: TokenVocab
    negative: int
    alpha: float
    min_alpha: float
    epoch_losses: list[float] = field(default_factory=list)
    dim: int = DIM

    def __post_init__(self):
        self.doc_index = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}

    def vector_for(self, doc_id: str) -> np.ndarray | None:
        row = self.doc_index.get(doc_id)
        return None if row is None else self.doc_vectors[row]


def build_documents(posts: Sequence[Post]) -> list[tuple[str, list[str]]]:
    docs: list[tuple[str, list[str]]] = []
    for post in posts:
        docs.append((f"title:{post.id}", tokenize(post.title)))
        docs.append((f"body:{post.id}", tokenize(post.body)))
    return docs


def _noise_table(vocab: TokenVocab) -> tuple[np.ndarray, np.ndarray]:
    # unigram counts raised to 3/4; the reserved index 0 has count 0 and
    # therefore zero draw probability
    weights = np.asarray(vocab.counts, dtype=np.float64) ** 0.75
    total = weights.sum()
    if total <= 0.0:
        raise DegenerateInputError("token vocabulary is empty")
    dist = weights / total
    cum = np.cumsum(dist)
    cum[-1] = 1.0
    table = np.round(cum * _DOMAIN).astype(np.uint64)
    table[-1] = _DOMAIN
    return dist, table


def _init_doc_vectors(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return (rng.random((n, DIM)) - 0.5) / DIM


def _doc_token_ids(tokens: Sequence[str], vocab: TokenVocab) -> list[int]:
    # out-of-vocabulary tokens are dropped; sorting fixes the pair order
    return sorted(vocab.id_of(t) for t in tokens if t in vocab)


def train_doc2vec(
    docs: Sequence[tuple[str, Sequence[str]]],
    vocab: TokenVocab,
    config: Doc2VecConfig,
) -> Doc2VecModel:
    """Fit document vectors by SGD over (document, word) pairs.

    Documents with no in-vocabulary tokens are tolerated: they generate no
    training pairs and come out as exact zero vectors, so downstream products
    with them vanish instead of injecting initialization noise.
    """
    if config.epochs < 1:
        raise ConfigError(f"doc2vec epochs must be >= 1, got {config.epochs}")
    if config.negative < 1:
        raise ConfigError(f"doc2vec negative sample count must be >= 1, got {config.negative}")
    if not docs:
        raise DegenerateInputError("no documents to train on")

    dist, cum_table = _noise_table(vocab)

    doc_ids = [doc_id for doc_id, _ in docs]
    if len(set(doc_ids)) != len(doc_ids):
        raise DegenerateInputError("duplicate document ids")
    ids_per_doc = [_doc_token_ids(tokens, vocab) for _, tokens in docs]
    offsets = np.zeros(len(docs) + 1, dtype=np.int64)
    for i, ids in enumerate(ids_per_doc):
        offsets[i + 1] = offsets[i] + len(ids)
    word_ids = np.fromiter(
        (w for ids in ids_per_doc for w in ids), dtype=np.int32, count=int(offsets[-1])
    )
    pairs_per_epoch = int(offsets[-1])
    if pairs_per_epoch == 0:
        raise DegenerateInputError("no in-vocabulary tokens in any document")

    doc_vectors = _init_doc_vectors(len(docs), config.seed)
    word_output_vectors = np.zeros((vocab.size, DIM))

    state = config.seed & _MASK64
    pair_index = 0
    total_pairs = config.epochs * pairs_per_epoch
    epoch_losses: list[float] = []
    order = list(range(len(docs)))
    for _ in range(config.epochs):
        state = shuffle_in_place(order, state)
        loss_sum, pair_index, state = backend.pvdbow_epoch(
            doc_vectors,
            word_output_vectors,
            word_ids,
            offsets,
            np.asarray(order, dtype=np.int64),
            cum_table,
            config.negative,
            config.alpha,
            config.min_alpha,
            pair_index,
            total_pairs,
            state,
        )
        epoch_losses.append(loss_sum / pairs_per_epoch)

    for i, ids in enumerate(ids_per_doc):
        if not ids:
            doc_vectors[i] = 0.0

    return Doc2VecModel(
        doc_ids=doc_ids,
        doc_vectors=doc_vectors,
        word_output_vectors=word_output_vectors,
        noise_distribution=dist,
        cum_table=cum_table,
        vocab=vocab,
        negative=config.negative,
        alpha=config.alpha,
        min_alpha=config.min_alpha,
        epoch_losses=epoch_losses,
    )


def infer_vector(
    model: Doc2VecModel,
    tokens: Sequence[str],
    steps: int = 100,
    seed: int = 0,
    doc_id: str = "",
) -> DocVector:
    """Fit a fresh vector for unseen text against frozen word vectors."""
    if steps < 1:
        raise ConfigError(f"inference steps must be >= 1, got {steps}")
    ids = _doc_token_ids(tokens, model.vocab)
    if not ids:
        return DocVector(doc_id=doc_id, values=np.zeros(DIM), oov=True)
    vec = _init_doc_vectors(1, seed)[0]
    backend.pvdbow_infer(
        vec,
        model.word_output_vectors,
        np.asarray(ids, dtype=np.int32),
        steps,
        model.cum_table,
        model.negative,
        model.alpha,
        model.min_alpha,
        seed & _MASK64,
    )
    return DocVector(doc_id=doc_id, values=vec)


def cosine(a, b) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm."""
    va = a.values if isinstance(a, DocVector) else np.asarray(a, dtype=np.float64)
    vb = b.values if isinstance(b, DocVector) else np.asarray(b, dtype=np.float64)
    if va.shape != vb.shape:
        raise DimensionError(f"cosine: dimension mismatch: {va.shape} and {vb.shape}")
    na = float(np.linalg.norm(va))
    nb = float(np.linalg.norm(vb))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(va, vb) / (na * nb))
