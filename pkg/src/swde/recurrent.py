"""Bidirectional LSTM over token features, additive attention, title head.

Gate weights are stacked (forget, input, output) in one matrix per
direction; the candidate transform has its own matrix. The recurrence:

    [f, i, o] = sigmoid(W [h_prev, r_t] + b)
    l         = tanh(V [h_prev, r_t] + d)
    c_t       = f * c_prev + i * l
    h_t       = o * tanh(c_t)

Attention scores each annotation with u . tanh(W_a h_j + b_a); positions
past ``valid_count`` never enter the computation, so their weights are
exactly zero and padding cannot leak into the context vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from swde.errors import DegenerateInputError, DimensionError
from swde.numerics import Tensor, ops, zeros


@dataclass
class LstmDirectionParams:
    W: Tensor  # (3*d_h, d_h + d_in), rows stacked (f, i, o)
    b: Tensor  # (3*d_h,)
    V: Tensor  # (d_h, d_h + d_in)
    d: Tensor  # (d_h,)

    @property
    def hidden_dim(self) -> int:
        return self.d.shape[0]


@dataclass
class LstmState:
    c: Tensor
    h: Tensor


@dataclass
class AttentionParams:
    W_a: Tensor  # (d_a, 2*d_h)
    b_a: Tensor  # (d_a,)
    u_a: Tensor  # (d_a,)


def initial_state(d_h: int) -> LstmState:
    return LstmState(c=zeros(d_h), h=zeros(d_h))


def lstm_cell(prev: LstmState, r_t: Tensor, p: LstmDirectionParams) -> LstmState:
    d_h = p.hidden_dim
    if p.W.shape[0] != 3 * d_h or p.b.shape != (3 * d_h,) or p.V.shape[0] != d_h:
        raise DimensionError(
            f"inconsistent gate shapes: W {p.W.shape}, b {p.b.shape}, "
            f"V {p.V.shape}, d {p.d.shape}"
        )
    x = ops.concat_rows(prev.h, r_t)
    gates = ops.sigmoid(ops.add(ops.matmul(p.W, x), p.b))
    f = ops.rows(gates, 0, d_h)
    i = ops.rows(gates, d_h, 2 * d_h)
    o = ops.rows(gates, 2 * d_h, 3 * d_h)
    l = ops.tanh(ops.add(ops.matmul(p.V, x), p.d))
    c_t = ops.add(ops.multiply(f, prev.c), ops.multiply(i, l))
    h_t = ops.multiply(o, ops.tanh(c_t))
    return LstmState(c=c_t, h=h_t)


def bilstm(
    rs: Sequence[Tensor], fwd: LstmDirectionParams, bwd: LstmDirectionParams
) -> list[Tensor]:
    """Annotations h_1..h_K, each the concat of forward and backward states."""
    if not rs:
        raise DegenerateInputError("bilstm needs at least one input vector")
    state = initial_state(fwd.hidden_dim)
    forward = []
    for r in rs:
        state = lstm_cell(state, r, fwd)
        forward.append(state.h)
    state = initial_state(bwd.hidden_dim)
    backward = [None] * len(rs)
    for t in range(len(rs) - 1, -1, -1):
        state = lstm_cell(state, rs[t], bwd)
        backward[t] = state.h
    return [ops.concat_rows(fh, bh) for fh, bh in zip(forward, backward)]


def attention(
    annotations: Sequence[Tensor], valid_count: int, ap: AttentionParams
) -> tuple[Tensor, Tensor]:
    """Weighted summary of the first ``valid_count`` annotations.

    Returns (context, weights); ``weights`` spans all positions, with exact
    zeros past valid_count.
    """
    k = len(annotations)
    if not 1 <= valid_count <= k:
        raise DegenerateInputError(
            f"valid_count must be in [1, {k}], got {valid_count}"
        )
    d_a = ap.u_a.shape[0]
    u_row = ops.reshape(ap.u_a, (1, d_a))
    scores = []
    for j in range(valid_count):
        hidden = ops.tanh(ops.add(ops.matmul(ap.W_a, annotations[j]), ap.b_a))
        scores.append(ops.matmul(u_row, hidden))  # (1,)
    e = scores[0] if valid_count == 1 else ops.concat_rows(*scores)
    alpha = ops.softmax(e)
    stacked = ops.concat_rows(
        *[ops.reshape(annotations[j], (1, annotations[j].shape[0])) for j in range(valid_count)]
    )
    context = ops.matmul(ops.transpose2d(stacked), alpha)
    if valid_count < k:
        alpha = ops.concat_rows(alpha, zeros(k - valid_count))
    return context, alpha


def title_head(context: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    return ops.relu(ops.add(ops.matmul(weight, context), bias))
