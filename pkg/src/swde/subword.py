"""Character-level token encoder: embeddings into a 3-layer 1D conv stack.

Every title token is encoded independently from its character index row:
embed -> conv/ReLU x3 -> global max pool, yielding one feature vector per
title position for the recurrent layer. Parameters are shared across tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from swde.corpus import EncodedTitle
from swde.errors import ConfigError
from swde.numerics import Tensor, ops


@dataclass
class SubwordEncoderParams:
    char_embeddings: Tensor  # (char_vocab_size, d_char); row 0 = PAD, kept zero
    conv_filters: list[Tensor]  # each (c_out, c_in, width)
    conv_biases: list[Tensor]  # each (c_out,)

    @property
    def out_dim(self) -> int:
        return self.conv_filters[-1].shape[0]


def min_token_length(widths: Sequence[int]) -> int:
    """Shortest character row the conv stack can reduce without vanishing."""
    return sum(w - 1 for w in widths) + 1


def check_grid_width(l_char: int, widths: Sequence[int]) -> None:
    need = min_token_length(widths)
    if l_char < need:
        raise ConfigError(
            f"l_char={l_char} is too small for conv widths {tuple(widths)}; "
            f"need at least {need}"
        )


def encode_token(char_row, params: SubwordEncoderParams) -> Tensor:
    """One token's character indices -> one feature vector of c3 entries."""
    emb = ops.embedding_lookup(params.char_embeddings, np.asarray(char_row))
    signal = ops.transpose2d(emb)  # (d_char, L_char)
    for filters, bias in zip(params.conv_filters, params.conv_biases):
        signal = ops.relu(ops.conv1d(signal, filters, bias))
    return ops.global_max_pool(signal)


def encode_title(grid: EncodedTitle, params: SubwordEncoderParams) -> list[Tensor]:
    """Feature vectors r_1..r_K, one per grid row, shared parameters."""
    return [encode_token(grid.grid[row], params) for row in range(grid.grid.shape[0])]
