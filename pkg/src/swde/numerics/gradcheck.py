"""Central-difference verification of tape gradients.

This is the numeric ground truth for every backward closure in ops.py: run a
scalar-valued function twice per parameter entry with the entry nudged up and
down, and compare the slope against what the tape claims.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from swde.numerics.ops import finite_checks
from swde.numerics.tensor import Tape, Tensor


def grad_check(
    f: Callable[[Sequence[Tensor]], Tensor],
    params: Sequence[Tensor],
    epsilon: float = 1e-5,
) -> float:
    """Return the worst relative error between tape and numeric gradients.

    ``f`` must map ``params`` to a single-element loss tensor and be
    deterministic (same params, same loss). Relative error for a pair
    (analytic a, numeric b) is |a - b| / max(1e-8, |a| + |b|); the max over
    every entry of every parameter is returned. Parameters are perturbed in
    place and restored exactly.
    """
    if not 1e-7 <= epsilon <= 1e-3:
        raise ValueError(f"grad_check: epsilon {epsilon} outside [1e-7, 1e-3]")

    with Tape() as tape:
        with finite_checks():
            loss = f(params)
    tape.backward(loss)
    analytic = [tape.grad(p).copy() for p in params]

    def value() -> float:
        with finite_checks():
            return f(params).item()

    worst = 0.0
    for p, grad in zip(params, analytic):
        flat = p.data.reshape(-1)
        gflat = grad.reshape(-1)
        for i in range(flat.size):
            kept = flat[i]
            flat[i] = kept + epsilon
            f_plus = value()
            flat[i] = kept - epsilon
            f_minus = value()
            flat[i] = kept
            numeric = (f_plus - f_minus) / (2.0 * epsilon)
            a = float(gflat[i])
            rel = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            if rel > worst:
                worst = rel
    return float(worst)
