"""Character-level token encoder tests.

The invariance cases use constructed parameters (all-ones filters, zero
biases, equal character embeddings) so that the pooled maximum provably
sits inside the token text and exact equality can be asserted.
"""

import numpy as np
import pytest
from helpers import random_params, tiny_dims, zero_params

from swde.corpus import EncodedTitle
from swde.errors import ConfigError
from swde.numerics import Tape, Tensor, grad_check, ops
from swde.subword import (
    SubwordEncoderParams,
    check_grid_width,
    encode_title,
    encode_token,
    min_token_length,
)

DIMS = tiny_dims()


def ones_params(d_char=2, channels=(2, 2, 3), widths=(2, 2, 2), vocab=6):
    emb = np.ones((vocab, d_char))
    emb[0] = 0.0  # PAD
    filters = []
    biases = []
    c_in = d_char
    for c_out, w in zip(channels, widths):
        filters.append(Tensor(np.ones((c_out, c_in, w))))
        biases.append(Tensor(np.zeros(c_out)))
        c_in = c_out
    return SubwordEncoderParams(Tensor(emb), filters, biases)


class TestMinTokenLength:
    def test_widths_3_3_3(self):
        assert min_token_length((3, 3, 3)) == 7

    def test_widths_2_2_2(self):
        assert min_token_length((2, 2, 2)) == 4

    def test_single_width_one(self):
        assert min_token_length((1,)) == 1

    def test_check_grid_width_rejects_small(self):
        with pytest.raises(ConfigError, match="l_char=3"):
            check_grid_width(3, (2, 2, 2))

    def test_check_grid_width_accepts_exact(self):
        check_grid_width(4, (2, 2, 2))


class TestEncodeToken:
    def test_output_shape_is_last_channel_count(self):
        params = random_params(DIMS).subword
        out = encode_token(np.array([1, 2, 3, 0, 0]), params)
        assert out.shape == (DIMS.channels[-1],)

    def test_all_pad_row_with_zero_bias_gives_zero_vector(self):
        # PAD embedding row is zero, so the conv stack sees a zero signal;
        # with zero biases every activation is exactly zero.
        params = random_params(DIMS).subword
        for b in params.conv_biases:
            b.data[:] = 0.0
        out = encode_token(np.zeros(5, dtype=np.int64), params)
        assert np.array_equal(out.data, np.zeros(DIMS.channels[-1]))

    def test_deterministic(self):
        params = random_params(DIMS).subword
        row = np.array([2, 5, 1, 0, 0])
        a = encode_token(row, params)
        b = encode_token(row, params)
        assert np.array_equal(a.data, b.data)

    def test_trailing_pad_invariance_on_constructed_case(self):
        # With all-ones filters, zero biases, and identical character
        # embeddings, a window's value grows with the number of real
        # characters it covers, so the max pools from inside the text and
        # extra trailing PADs cannot change it.
        params = ones_params()
        text = [1, 2, 3, 4]  # exactly the receptive field minimum
        short = encode_token(np.array(text), params)
        padded = encode_token(np.array(text + [0, 0, 0]), params)
        assert np.array_equal(short.data, padded.data)

    def test_distinct_rows_encode_differently(self):
        params = random_params(DIMS).subword
        a = encode_token(np.array([1, 2, 3, 0, 0]), params)
        b = encode_token(np.array([3, 2, 1, 0, 0]), params)
        assert not np.array_equal(a.data, b.data)


class TestEncodeTitle:
    def grid(self, rows):
        return EncodedTitle(
            grid=np.array(rows, dtype=np.int64), valid_token_count=len(rows)
        )

    def test_one_vector_per_row(self):
        params = random_params(DIMS).subword
        vecs = encode_title(self.grid([[1, 2, 3, 0, 0], [4, 5, 0, 0, 0], [0] * 5]), params)
        assert len(vecs) == 3
        assert all(v.shape == (DIMS.channels[-1],) for v in vecs)

    def test_rows_encoded_independently(self):
        # Changing one row must leave the other rows' vectors bit-identical.
        params = random_params(DIMS).subword
        base = self.grid([[1, 2, 3, 0, 0], [4, 5, 0, 0, 0]])
        changed = self.grid([[1, 2, 3, 0, 0], [5, 4, 2, 1, 0]])
        v0 = encode_title(base, params)
        v1 = encode_title(changed, params)
        assert np.array_equal(v0[0].data, v1[0].data)
        assert not np.array_equal(v0[1].data, v1[1].data)

    def test_identical_rows_share_parameters(self):
        params = random_params(DIMS).subword
        vecs = encode_title(self.grid([[1, 2, 0, 0, 0], [1, 2, 0, 0, 0]]), params)
        assert np.array_equal(vecs[0].data, vecs[1].data)


class TestGradients:
    def test_conv_stack_gradients(self):
        params = random_params(DIMS, seed=3).subword
        row = np.array([1, 2, 3, 4, 5])
        checked = [params.char_embeddings] + params.conv_filters + params.conv_biases

        def loss(_):
            return ops.sum_all(encode_token(row, params))

        assert grad_check(loss, checked) < 1e-4

    def test_pad_row_gets_no_gradient_from_real_chars(self):
        params = random_params(DIMS, seed=4).subword
        with Tape() as tape:
            loss = ops.sum_all(encode_token(np.array([1, 2, 3, 4, 5]), params))
            tape.backward(loss)
            g = tape.grad(params.char_embeddings)
        assert np.array_equal(g[0], np.zeros(DIMS.d_char))
