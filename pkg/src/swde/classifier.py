"""Fusion of the title head with the document-vector enrichment, and the
final dense stack producing the clickbait probability."""

from __future__ import annotations

from dataclasses import dataclass

from swde.errors import DimensionError
from swde.numerics import Tensor, ops


@dataclass
class ClassifierParams:
    dense1_w: Tensor  # (d1, d_t + 300)
    dense1_b: Tensor  # (d1,)
    dense2_w: Tensor  # (d2, d1)
    dense2_b: Tensor  # (d2,)
    out_w: Tensor  # (1, d2)
    out_b: Tensor  # (1,)


def enrich(title_vec: Tensor, body_vec: Tensor) -> Tensor:
    """Element-wise product of a record's two document vectors."""
    if title_vec.ndim != 1 or body_vec.ndim != 1:
        raise DimensionError(
            f"enrich expects vectors, got {title_vec.shape} and {body_vec.shape}"
        )
    return ops.multiply(title_vec, body_vec)


def classify(title_head_out: Tensor, enrichment: Tensor, p: ClassifierParams) -> Tensor:
    """Probability, shape (1,), that the post is clickbait.

    Extreme logits round to exactly 0.0 or 1.0 in float64; the training
    loss clamps separately, so no clamping happens here.
    """
    x = ops.concat_rows(title_head_out, enrichment)
    h1 = ops.relu(ops.add(ops.matmul(p.dense1_w, x), p.dense1_b))
    h2 = ops.relu(ops.add(ops.matmul(p.dense2_w, h1), p.dense2_b))
    z = ops.add(ops.matmul(p.out_w, h2), p.out_b)
    return ops.sigmoid(z)
