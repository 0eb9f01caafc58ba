"""Recurrent layer tests: gated cell, both directions, attention summary.

The zero-parameter cases rely on exact IEEE values (sigmoid(0) is exactly
0.5, tanh(0) is exactly 0.0), so they assert equality rather than closeness.
"""

import numpy as np
import pytest

from swde.errors import DegenerateInputError, DimensionError
from swde.numerics import Tape, Tensor, grad_check, ops, zeros
from swde.recurrent import (
    AttentionParams,
    LstmDirectionParams,
    LstmState,
    attention,
    bilstm,
    initial_state,
    lstm_cell,
    title_head,
)


def direction(d_h: int, d_in: int, seed: int = 0, scale: float = 0.3):
    rng = np.random.default_rng(seed)
    return LstmDirectionParams(
        W=Tensor(rng.normal(scale=scale, size=(3 * d_h, d_h + d_in))),
        b=Tensor(rng.normal(scale=scale, size=3 * d_h)),
        V=Tensor(rng.normal(scale=scale, size=(d_h, d_h + d_in))),
        d=Tensor(rng.normal(scale=scale, size=d_h)),
    )


def zero_direction(d_h: int, d_in: int):
    return LstmDirectionParams(
        W=Tensor(np.zeros((3 * d_h, d_h + d_in))),
        b=Tensor(np.zeros(3 * d_h)),
        V=Tensor(np.zeros((d_h, d_h + d_in))),
        d=Tensor(np.zeros(d_h)),
    )


def attn(d_a: int, d_ann: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    return AttentionParams(
        W_a=Tensor(rng.normal(scale=0.3, size=(d_a, d_ann))),
        b_a=Tensor(rng.normal(scale=0.3, size=d_a)),
        u_a=Tensor(rng.normal(scale=0.3, size=d_a)),
    )


class TestLstmCell:
    def test_zero_params_zero_state_gives_zero_state(self):
        p = zero_direction(3, 4)
        out = lstm_cell(initial_state(3), Tensor(np.array([1.0, -2.0, 3.0, 0.5])), p)
        assert np.array_equal(out.c.data, np.zeros(3))
        assert np.array_equal(out.h.data, np.zeros(3))

    def test_zero_params_halve_carried_cell(self):
        # All gates are sigmoid(0) = 0.5 exactly and the candidate is
        # tanh(0) = 0, so c_t = 0.5 * c_prev and h_t = 0.5 * tanh(c_t).
        p = zero_direction(3, 2)
        c_prev = np.array([2.0, -4.0, 0.25])
        prev = LstmState(c=Tensor(c_prev), h=Tensor(np.zeros(3)))
        out = lstm_cell(prev, Tensor(np.zeros(2)), p)
        assert np.array_equal(out.c.data, 0.5 * c_prev)
        assert np.array_equal(out.h.data, 0.5 * np.tanh(0.5 * c_prev))

    def test_saturated_forget_gate_carries_memory(self):
        # Forget bias +20, input bias -20: the cell keeps its value to
        # within microscopic leakage.
        d_h, d_in = 3, 2
        p = zero_direction(d_h, d_in)
        p.b.data[0:d_h] = 20.0
        p.b.data[d_h : 2 * d_h] = -20.0
        v = np.array([1.5, -0.75, 2.0])
        prev = LstmState(c=Tensor(v), h=Tensor(np.zeros(d_h)))
        out = lstm_cell(prev, Tensor(np.ones(d_in)), p)
        assert np.max(np.abs(out.c.data - v)) < 1e-3

    def test_cell_growth_is_bounded(self):
        # |c_t| <= f*|c_prev| + i*|l| <= |c_prev| + 1 elementwise, for any
        # parameters and inputs.
        rng = np.random.default_rng(7)
        for _ in range(50):
            d_h = int(rng.integers(1, 5))
            d_in = int(rng.integers(1, 5))
            p = direction(d_h, d_in, seed=int(rng.integers(0, 2**31)), scale=5.0)
            c_prev = rng.uniform(-100, 100, d_h)
            prev = LstmState(c=Tensor(c_prev), h=Tensor(rng.normal(size=d_h)))
            out = lstm_cell(prev, Tensor(rng.normal(size=d_in)), p)
            assert np.all(np.abs(out.c.data) <= np.abs(c_prev) + 1.0 + 1e-12)

    def test_inconsistent_shapes_rejected(self):
        p = zero_direction(3, 2)
        p.b = Tensor(np.zeros(7))  # not 3*d_h
        with pytest.raises(DimensionError):
            lstm_cell(initial_state(3), Tensor(np.zeros(2)), p)

    def test_gradients(self):
        p = direction(2, 3, seed=5)
        r = Tensor(np.array([0.3, -0.2, 0.6]))
        prev = LstmState(c=Tensor(np.array([0.4, -0.1])), h=Tensor(np.array([0.2, 0.3])))

        def loss(_):
            out = lstm_cell(prev, r, p)
            return ops.sum_all(ops.concat_rows(out.c, out.h))

        assert grad_check(loss, [p.W, p.b, p.V, p.d, r, prev.c, prev.h]) < 1e-4


class TestBilstm:
    def test_annotation_dims_are_doubled(self):
        anns = bilstm(
            [Tensor(np.ones(4)), Tensor(np.zeros(4))], direction(3, 4), direction(3, 4, seed=1)
        )
        assert len(anns) == 2
        assert all(a.shape == (6,) for a in anns)

    def test_single_step_matches_two_cells(self):
        fwd, bwd = direction(3, 4, seed=2), direction(3, 4, seed=3)
        r = Tensor(np.array([0.5, -1.0, 0.25, 2.0]))
        ann = bilstm([r], fwd, bwd)[0]
        fh = lstm_cell(initial_state(3), r, fwd).h
        bh = lstm_cell(initial_state(3), r, bwd).h
        assert np.array_equal(ann.data, np.concatenate([fh.data, bh.data]))

    def test_reversing_input_swaps_direction_halves(self):
        # Running the reversed sequence with swapped direction parameters
        # must produce the mirrored annotations with halves exchanged,
        # bit for bit: the two runs execute identical cell updates.
        d_h = 3
        fwd, bwd = direction(d_h, 2, seed=4), direction(d_h, 2, seed=5)
        rng = np.random.default_rng(6)
        rs = [Tensor(rng.normal(size=2)) for _ in range(5)]
        a = bilstm(rs, fwd, bwd)
        b = bilstm(list(reversed(rs)), bwd, fwd)
        for t in range(5):
            mirrored = b[len(rs) - 1 - t]
            assert np.array_equal(a[t].data[:d_h], mirrored.data[d_h:])
            assert np.array_equal(a[t].data[d_h:], mirrored.data[:d_h])

    def test_empty_sequence_rejected(self):
        with pytest.raises(DegenerateInputError):
            bilstm([], direction(2, 2), direction(2, 2))

    def test_gradients(self):
        fwd, bwd = direction(2, 2, seed=8), direction(2, 2, seed=9)
        rng = np.random.default_rng(10)
        rs = [Tensor(rng.normal(scale=0.5, size=2)) for _ in range(3)]

        def loss(_):
            return ops.sum_all(ops.concat_rows(*bilstm(rs, fwd, bwd)))

        checked = [fwd.W, fwd.b, fwd.V, fwd.d, bwd.W, bwd.b, bwd.V, bwd.d, *rs]
        assert grad_check(loss, checked) < 1e-4


class TestAttention:
    def annotations(self, k=4, d=6, seed=0):
        rng = np.random.default_rng(seed)
        return [Tensor(rng.normal(size=d)) for _ in range(k)]

    def test_zero_score_vector_averages_annotations(self):
        anns = self.annotations()
        ap = attn(3, 6)
        ap.u_a.data[:] = 0.0
        context, alpha = attention(anns, 3, ap)
        mean = np.mean([a.data for a in anns[:3]], axis=0)
        assert np.max(np.abs(context.data - mean)) < 1e-12
        assert np.max(np.abs(alpha.data[:3] - 1.0 / 3.0)) < 1e-12

    def test_weights_sum_to_one_over_valid_prefix(self):
        for seed in range(5):
            anns = self.annotations(seed=seed)
            _, alpha = attention(anns, 3, attn(3, 6, seed=seed))
            assert abs(float(np.sum(alpha.data)) - 1.0) < 1e-9

    def test_masked_positions_are_exact_zeros(self):
        _, alpha = attention(self.annotations(k=5), 2, attn(3, 6))
        assert alpha.shape == (5,)
        assert alpha.data[2] == 0.0
        assert alpha.data[3] == 0.0
        assert alpha.data[4] == 0.0

    def test_single_valid_position_takes_all_weight(self):
        anns = self.annotations(k=3)
        context, alpha = attention(anns, 1, attn(3, 6))
        assert np.array_equal(alpha.data, np.array([1.0, 0.0, 0.0]))
        assert np.array_equal(context.data, anns[0].data)

    def test_masked_annotations_cannot_influence_output(self):
        anns = self.annotations(k=4)
        ap = attn(3, 6, seed=11)
        context, alpha = attention(anns, 2, ap)
        anns[2].data[:] = 1e6
        anns[3].data[:] = -1e6
        context2, alpha2 = attention(anns, 2, ap)
        assert np.array_equal(context.data, context2.data)
        assert np.array_equal(alpha.data, alpha2.data)

    def test_valid_count_bounds(self):
        anns = self.annotations(k=3)
        ap = attn(3, 6)
        with pytest.raises(DegenerateInputError):
            attention(anns, 0, ap)
        with pytest.raises(DegenerateInputError):
            attention(anns, 4, ap)

    def test_gradients(self):
        anns = self.annotations(k=3, d=4, seed=12)
        ap = attn(2, 4, seed=13)

        def loss(_):
            context, _ = attention(anns, 2, ap)
            return ops.sum_all(context)

        assert grad_check(loss, [ap.W_a, ap.b_a, ap.u_a, anns[0], anns[1]]) < 1e-4

    def test_masked_annotation_gets_zero_gradient(self):
        anns = self.annotations(k=3, d=4, seed=14)
        ap = attn(2, 4, seed=15)
        with Tape() as tape:
            context, _ = attention(anns, 2, ap)
            tape.backward(ops.sum_all(context))
            assert np.array_equal(tape.grad(anns[2]), np.zeros(4))


class TestTitleHead:
    def test_zero_params_give_zero_vector(self):
        out = title_head(Tensor(np.ones(4)), Tensor(np.zeros((3, 4))), Tensor(np.zeros(3)))
        assert np.array_equal(out.data, np.zeros(3))

    def test_negative_preactivations_clipped(self):
        w = Tensor(-np.eye(3))
        out = title_head(Tensor(np.array([1.0, 2.0, 3.0])), w, Tensor(np.zeros(3)))
        assert np.array_equal(out.data, np.zeros(3))

    def test_gradients_through_full_title_path(self):
        fwd, bwd = direction(2, 3, seed=20), direction(2, 3, seed=21)
        ap = attn(2, 4, seed=22)
        rng = np.random.default_rng(23)
        rs = [Tensor(rng.normal(scale=0.5, size=3)) for _ in range(3)]
        w = Tensor(rng.normal(scale=0.5, size=(3, 4)))
        b = Tensor(rng.normal(scale=0.5, size=3))

        def loss(_):
            anns = bilstm(rs, fwd, bwd)
            context, _ = attention(anns, 2, ap)
            return ops.sum_all(title_head(context, w, b))

        checked = [fwd.W, fwd.b, fwd.V, fwd.d, bwd.W, bwd.V, ap.W_a, ap.u_a, w, b]
        assert grad_check(loss, checked) < 1e-4
