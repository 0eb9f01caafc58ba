"""Enrichment and dense classification head tests."""

import numpy as np
import pytest

from swde.classifier import ClassifierParams, classify, enrich
from swde.errors import DimensionError
from swde.numerics import Tensor, grad_check, ops


def make_params(d_in: int, d1: int = 5, d2: int = 4, seed: int = 0, scale: float = 0.3):
    rng = np.random.default_rng(seed)
    return ClassifierParams(
        dense1_w=Tensor(rng.normal(scale=scale, size=(d1, d_in))),
        dense1_b=Tensor(rng.normal(scale=scale, size=d1)),
        dense2_w=Tensor(rng.normal(scale=scale, size=(d2, d1))),
        dense2_b=Tensor(rng.normal(scale=scale, size=d2)),
        out_w=Tensor(rng.normal(scale=scale, size=(1, d2))),
        out_b=Tensor(rng.normal(scale=scale, size=1)),
    )


def zero_params(d_in: int, d1: int = 5, d2: int = 4):
    return ClassifierParams(
        dense1_w=Tensor(np.zeros((d1, d_in))),
        dense1_b=Tensor(np.zeros(d1)),
        dense2_w=Tensor(np.zeros((d2, d1))),
        dense2_b=Tensor(np.zeros(d2)),
        out_w=Tensor(np.zeros((1, d2))),
        out_b=Tensor(np.zeros(1)),
    )


class TestEnrich:
    def test_elementwise_product(self):
        out = enrich(Tensor(np.array([1.0, 2.0, 3.0])), Tensor(np.array([4.0, 0.5, -1.0])))
        assert np.array_equal(out.data, np.array([4.0, 1.0, -3.0]))

    def test_ones_are_identity(self):
        v = Tensor(np.array([0.3, -1.2, 7.0]))
        assert np.array_equal(enrich(v, Tensor(np.ones(3))).data, v.data)

    def test_zeros_annihilate(self):
        v = Tensor(np.array([0.3, -1.2, 7.0]))
        assert np.array_equal(enrich(v, Tensor(np.zeros(3))).data, np.zeros(3))

    def test_commutative(self):
        a = Tensor(np.array([1.0, -2.0, 0.25]))
        b = Tensor(np.array([3.0, 5.0, -8.0]))
        assert np.array_equal(enrich(a, b).data, enrich(b, a).data)

    def test_rejects_matrices(self):
        with pytest.raises(DimensionError):
            enrich(Tensor(np.ones((2, 2))), Tensor(np.ones((2, 2))))

    def test_rejects_length_mismatch(self):
        with pytest.raises(DimensionError):
            enrich(Tensor(np.ones(3)), Tensor(np.ones(4)))


class TestClassify:
    def test_zero_params_give_half(self):
        p = zero_params(7)
        out = classify(Tensor(np.ones(3)), Tensor(np.ones(4)), p)
        assert out.shape == (1,)
        assert out.data[0] == 0.5

    def test_moderate_inputs_stay_strictly_inside_unit_interval(self):
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            p = make_params(7, seed=seed, scale=0.5)
            out = classify(
                Tensor(rng.normal(size=3)), Tensor(rng.normal(size=4)), p
            )
            assert 0.0 < out.data[0] < 1.0

    def test_extreme_inputs_stay_inside_closed_unit_interval(self):
        # Saturated logits round to exactly 0.0 or 1.0 in float64; the
        # training loss clamps separately, so the head does not.
        for seed in range(10):
            rng = np.random.default_rng(200 + seed)
            p = make_params(7, seed=seed, scale=2.0)
            out = classify(
                Tensor(rng.normal(scale=3.0, size=3)), Tensor(rng.normal(scale=3.0, size=4)), p
            )
            assert 0.0 <= out.data[0] <= 1.0

    def test_deterministic(self):
        p = make_params(7, seed=1)
        t, e = Tensor(np.ones(3)), Tensor(np.ones(4))
        assert classify(t, e, p).data[0] == classify(t, e, p).data[0]

    def test_small_input_change_moves_output_little(self):
        p = make_params(7, seed=2)
        t = np.array([0.5, -0.3, 0.8])
        e = np.array([0.1, 0.2, -0.4, 0.6])
        base = classify(Tensor(t), Tensor(e), p).data[0]
        bumped = classify(Tensor(t + 1e-6), Tensor(e), p).data[0]
        assert abs(bumped - base) < 1e-3

    def test_gradients(self):
        p = make_params(5, seed=3)
        t = Tensor(np.array([0.4, -0.2]))
        e = Tensor(np.array([0.3, 0.7, -0.5]))

        def loss(_):
            return classify(t, e, p)

        checked = [p.dense1_w, p.dense1_b, p.dense2_w, p.dense2_b, p.out_w, p.out_b, t, e]
        assert grad_check(loss, checked) < 1e-4

    def test_gradient_flows_to_both_inputs(self):
        from swde.numerics import Tape

        p = make_params(5, seed=4)
        t = Tensor(np.array([0.4, -0.2]))
        e = Tensor(np.array([0.3, 0.7, -0.5]))
        with Tape() as tape:
            tape.backward(classify(t, e, p))
            assert np.any(tape.grad(t) != 0.0)
            assert np.any(tape.grad(e) != 0.0)
