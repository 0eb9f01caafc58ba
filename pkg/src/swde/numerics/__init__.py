"""Tensor, tape, differentiable ops, and the compiled/numpy kernel backends."""

from swde.numerics import ops
from swde.numerics.backend import BACKEND_NAME, COMPILED
from swde.numerics.gradcheck import grad_check
from swde.numerics.tensor import Tape, Tensor, active_tape, zeros

__all__ = [
    "BACKEND_NAME",
    "COMPILED",
    "Tape",
    "Tensor",
    "active_tape",
    "grad_check",
    "ops",
    "zeros",
]
