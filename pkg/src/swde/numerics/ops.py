"""Differentiable primitives.

Each op validates shapes, computes its forward value, and, when a tape is
recording, registers a backward closure with the adjoints. The set is
deliberately small: everything from the char-CNN to the output sigmoid is a
composition of these.

Conventions fixed here for reproducibility:

* relu gradient at exactly 0 is 0;
* global_max_pool routes its gradient to the first maximum on ties;
* bce clamps the probability to [1e-7, 1 - 1e-7] inside the loss only, and
  its gradient is 0 in the clamped region (consistent with the clamp).
"""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np
from scipy.special import expit

from swde.errors import DegenerateInputError, DimensionError, NumericError
from swde.numerics import backend
from swde.numerics.tensor import Tensor, active_tape

_CHECK_FINITE = False


@contextmanager
def finite_checks():
    """Raise NumericError, naming the op, on any non-finite op output."""
    global _CHECK_FINITE
    prev = _CHECK_FINITE
    _CHECK_FINITE = True
    try:
        yield
    finally:
        _CHECK_FINITE = prev


def _make(op_name: str, arr: np.ndarray) -> Tensor:
    if _CHECK_FINITE and not np.isfinite(arr).all():
        raise NumericError(f"non-finite values in output of {op_name}")
    return Tensor(arr)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product; also accepts a 1-D right operand as a matrix-vector product."""
    A, B = a.data, b.data
    if A.ndim != 2 or B.ndim not in (1, 2) or A.shape[1] != B.shape[0]:
        raise DimensionError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    out = _make("matmul", A @ B)
    tape = active_tape()
    if tape is not None:

        def backward(d, accum):
            if B.ndim == 1:
                accum(a, np.outer(d, B))
            else:
                accum(a, d @ B.T)
            accum(b, A.T @ d)

        tape.record(out, backward)
    return out


def conv1d(signal: Tensor, filters: Tensor, bias: Tensor) -> Tensor:
    """Valid (no padding) cross-correlation along the length axis.

    signal (c_in, L), filters (c_out, c_in, w), bias (c_out,) ->
    (c_out, L - w + 1).
    """
    S, F, B = signal.data, filters.data, bias.data
    if S.ndim != 2 or F.ndim != 3 or B.ndim != 1:
        raise DimensionError(
            f"conv1d: expected signal 2-D, filters 3-D, bias 1-D; got {signal.shape}, "
            f"{filters.shape}, {bias.shape}"
        )
    if F.shape[1] != S.shape[0] or F.shape[0] != B.shape[0]:
        raise DimensionError(
            f"conv1d: channel mismatch between signal {signal.shape}, filters "
            f"{filters.shape}, bias {bias.shape}"
        )
    if S.shape[1] < F.shape[2]:
        raise DegenerateInputError(
            f"conv1d: signal length {S.shape[1]} shorter than filter width {F.shape[2]}"
        )
    out = _make("conv1d", backend.conv1d_forward(S, F, B))
    tape = active_tape()
    if tape is not None:

        def backward(d, accum):
            d_signal, d_filters, d_bias = backend.conv1d_backward(S, F, d)
            accum(signal, d_signal)
            accum(filters, d_filters)
            accum(bias, d_bias)

        tape.record(out, backward)
    return out


def sigmoid(x: Tensor) -> Tensor:
    s = expit(x.data)
    out = _make("sigmoid", s)
    tape = active_tape()
    if tape is not None:
        tape.record(out, lambda d, accum: accum(x, d * s * (1.0 - s)))
    return out


def tanh(x: Tensor) -> Tensor:
    t = np.tanh(x.data)
    out = _make("tanh", t)
    tape = active_tape()
    if tape is not None:
        tape.record(out, lambda d, accum: accum(x, d * (1.0 - t * t)))
    return out


def relu(x: Tensor) -> Tensor:
    X = x.data
    out = _make("relu", np.maximum(X, 0.0))
    tape = active_tape()
    if tape is not None:
        tape.record(out, lambda d, accum: accum(x, d * (X > 0.0)))
    return out


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise DimensionError(f"add: shapes differ: {a.shape} and {b.shape}")
    out = _make("add", a.data + b.data)
    tape = active_tape()
    if tape is not None:

        def backward(d, accum):
            accum(a, d)
            accum(b, d)

        tape.record(out, backward)
    return out


def multiply(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise DimensionError(f"multiply: shapes differ: {a.shape} and {b.shape}")
    A, B = a.data, b.data
    out = _make("multiply", A * B)
    tape = active_tape()
    if tape is not None:

        def backward(d, accum):
            accum(a, d * B)
            accum(b, d * A)

        tape.record(out, backward)
    return out


def concat_rows(*tensors: Tensor) -> Tensor:
    """Concatenate along the leading axis; trailing dimensions must agree."""
    if not tensors:
        raise DegenerateInputError("concat_rows: nothing to concatenate")
    ndim = tensors[0].ndim
    if any(t.ndim != ndim for t in tensors) or ndim not in (1, 2):
        raise DimensionError(
            "concat_rows: operands must all be 1-D or all 2-D, got "
            + ", ".join(str(t.shape) for t in tensors)
        )
    if ndim == 2 and len({t.shape[1] for t in tensors}) != 1:
        raise DimensionError(
            "concat_rows: trailing dimensions differ: "
            + ", ".join(str(t.shape) for t in tensors)
        )
    out = _make("concat_rows", np.concatenate([t.data for t in tensors], axis=0))
    tape = active_tape()
    if tape is not None:
        sizes = [t.shape[0] for t in tensors]

        def backward(d, accum):
            at = 0
            for t, n in zip(tensors, sizes):
                accum(t, d[at : at + n])
                at += n

        tape.record(out, backward)
    return out


def rows(x: Tensor, start: int, stop: int) -> Tensor:
    """Slice [start, stop) along the leading axis. Inverse of concat_rows."""
    n = x.shape[0]
    if not (0 <= start < stop <= n):
        raise DimensionError(f"rows: slice [{start}, {stop}) out of bounds for shape {x.shape}")
    out = _make("rows", x.data[start:stop].copy())
    tape = active_tape()
    if tape is not None:

        def backward(d, accum):
            full = np.zeros_like(x.data)
            full[start:stop] = d
            accum(x, full)

        tape.record(out, backward)
    return out


def global_max_pool(x: Tensor) -> Tensor:
    """Reduce a (channels, length) map to (channels,) by max over length.

    The gradient flows only to the argmax position of each channel (first
    maximum on ties).
    """
    X = x.data
    if X.ndim != 2:
        raise DimensionError(f"global_max_pool: expected 2-D input, got {x.shape}")
    am = np.argmax(X, axis=1)
    out = _make("global_max_pool", X[np.arange(X.shape[0]), am])
    tape = active_tape()
    if tape is not None:

        def backward(d, accum):
            z = np.zeros_like(X)
            z[np.arange(X.shape[0]), am] = d
            accum(x, z)

        tape.record(out, backward)
    return out


def softmax(x: Tensor) -> Tensor:
    """Stable softmax over a vector (max-subtraction before exponentiation)."""
    X = x.data
    if X.ndim != 1:
        raise DimensionError(f"softmax: expected 1-D input, got {x.shape}")
    if not np.isfinite(X).all():
        raise NumericError("softmax: input contains non-finite entries")
    e = np.exp(X - X.max())
    s = e / e.sum()
    out = _make("softmax", s)
    tape = active_tape()
    if tape is not None:
        tape.record(out, lambda d, accum: accum(x, s * (d - float(np.dot(d, s)))))
    return out


def reshape(x: Tensor, shape: tuple[int, ...]) -> Tensor:
    try:
        arr = x.data.reshape(shape)
    except ValueError as exc:
        raise DimensionError(f"reshape: cannot view {x.shape} as {shape}") from exc
    out = _make("reshape", arr)
    tape = active_tape()
    if tape is not None:
        tape.record(out, lambda d, accum: accum(x, d.reshape(x.data.shape)))
    return out


def transpose2d(x: Tensor) -> Tensor:
    if x.ndim != 2:
        raise DimensionError(f"transpose2d: expected 2-D input, got {x.shape}")
    out = _make("transpose2d", x.data.T)
    tape = active_tape()
    if tape is not None:
        tape.record(out, lambda d, accum: accum(x, d.T))
    return out


def sum_all(x: Tensor) -> Tensor:
    out = _make("sum_all", np.array([x.data.sum()]))
    tape = active_tape()
    if tape is not None:
        tape.record(out, lambda d, accum: accum(x, np.full_like(x.data, d[0])))
    return out


def scale(x: Tensor, c: float) -> Tensor:
    c = float(c)
    out = _make("scale", x.data * c)
    tape = active_tape()
    if tape is not None:
        tape.record(out, lambda d, accum: accum(x, d * c))
    return out


def embedding_lookup(table: Tensor, ids) -> Tensor:
    """Gather rows of ``table`` by index; gradient scatter-adds into the table."""
    ids_arr = np.asarray(ids, dtype=np.intp)
    if ids_arr.ndim != 1 or ids_arr.size == 0:
        raise DegenerateInputError("embedding_lookup: need a non-empty 1-D index list")
    if table.ndim != 2:
        raise DimensionError(f"embedding_lookup: table must be 2-D, got {table.shape}")
    if ids_arr.min() < 0 or ids_arr.max() >= table.shape[0]:
        raise DimensionError(
            f"embedding_lookup: index out of range for table with {table.shape[0]} rows"
        )
    out = _make("embedding_lookup", table.data[ids_arr])
    tape = active_tape()
    if tape is not None:

        def backward(d, accum):
            dt = np.zeros_like(table.data)
            np.add.at(dt, ids_arr, d)
            accum(table, dt)

        tape.record(out, backward)
    return out


BCE_CLAMP = 1e-7


def bce(p: Tensor, y: float) -> Tensor:
    """Binary cross-entropy of a scalar probability against a {0, 1} label."""
    if p.size != 1:
        raise DimensionError(f"bce: probability must be scalar, got shape {p.shape}")
    y = float(y)
    if y not in (0.0, 1.0):
        raise DegenerateInputError(f"bce: label must be 0 or 1, got {y}")
    raw = float(p.data.reshape(-1)[0])
    pc = min(max(raw, BCE_CLAMP), 1.0 - BCE_CLAMP)
    loss = -(y * np.log(pc) + (1.0 - y) * np.log(1.0 - pc))
    out = _make("bce", np.array([loss]))
    tape = active_tape()
    if tape is not None:

        def backward(d, accum):
            if BCE_CLAMP < raw < 1.0 - BCE_CLAMP:
                g = (pc - y) / (pc * (1.0 - pc))
            else:
                g = 0.0
            accum(p, np.full_like(p.data, g * d[0]))

        tape.record(out, backward)
    return out
