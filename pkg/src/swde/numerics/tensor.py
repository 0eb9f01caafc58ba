"""Dense f64 tensors and the reverse-mode gradient tape.

Every layer in the model is built from a small set of primitives (see
``swde.numerics.ops``). Each primitive computes its forward value with numpy
(or a compiled kernel) and, when a tape is recording, registers a backward
closure. The reverse pass replays those closures in exact reverse execution
order, which is always a valid topological order of the computation.
"""

from __future__ import annotations

import threading

import numpy as np

from swde.errors import DegenerateInputError, DimensionError, NumericError

_tls = threading.local()


class Tensor:
    """Immutable-by-convention dense array of 64-bit floats.

    ``data`` is always C-contiguous, so its flat iteration order is the
    row-major layout the serializer writes. Values on a live tape are never
    mutated; the optimizer rewrites parameter data in place only between
    training steps, after the step's tape has been discarded.
    """

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.ascontiguousarray(data, dtype=np.float64)
        if arr.size == 0:
            raise DegenerateInputError("tensor must hold at least one element")
        self.data = arr

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(f"item() requires a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def copy(self) -> "Tensor":
        return Tensor(self.data.copy())

    def __repr__(self):
        return f"Tensor(shape={self.shape}, data={self.data!r})"


def zeros(shape) -> Tensor:
    return Tensor(np.zeros(shape, dtype=np.float64))


class Tape:
    """Ordered record of executed primitives, replayed backward.

    Used as a context manager::

        with Tape() as tape:
            loss = ...build graph...
        tape.backward(loss)
        g = tape.grad(some_parameter)

    ``grad`` returns an all-zero array for any tensor that is not on a path
    to the loss. Only one tape may record per thread at a time; a training
    step owns its tape.
    """

    def __init__(self):
        # entry: (output tensor, backward closure)
        self._entries: list[tuple[Tensor, object]] = []
        self._grads: dict[int, np.ndarray] = {}
        self._ran_backward = False

    def __enter__(self) -> "Tape":
        if getattr(_tls, "tape", None) is not None:
            raise RuntimeError("a gradient tape is already recording on this thread")
        _tls.tape = self
        return self

    def __exit__(self, *exc):
        _tls.tape = None
        return False

    def record(self, output: Tensor, backward) -> None:
        self._entries.append((output, backward))

    def __len__(self) -> int:
        return len(self._entries)

    def _accumulate(self, tensor: Tensor, grad: np.ndarray) -> None:
        if grad.shape != tensor.data.shape:
            raise AssertionError(
                f"internal: gradient shape {grad.shape} != tensor shape {tensor.data.shape}"
            )
        buf = self._grads.get(id(tensor))
        if buf is None:
            # Copy: backward closures may hand the same array to several inputs.
            self._grads[id(tensor)] = np.array(grad, dtype=np.float64)
        else:
            buf += grad

    def backward(self, loss: Tensor) -> None:
        """Reverse-accumulate d(loss)/d(tensor) for everything on the tape."""
        if self._ran_backward:
            raise RuntimeError("backward() already ran on this tape")
        self._ran_backward = True
        if loss.size != 1:
            raise DimensionError(f"backward needs a scalar loss, got shape {loss.shape}")
        if not np.isfinite(loss.data).all():
            raise NumericError("backward: loss is not finite")
        self._grads[id(loss)] = np.ones_like(loss.data)
        for output, backward_fn in reversed(self._entries):
            d_out = self._grads.get(id(output))
            if d_out is None:
                continue  # not on any path to the loss
            backward_fn(d_out, self._accumulate)

    def grad(self, tensor: Tensor) -> np.ndarray:
        """Gradient of the loss w.r.t. ``tensor``; zeros if off-path."""
        buf = self._grads.get(id(tensor))
        if buf is None:
            return np.zeros_like(tensor.data)
        return buf


def active_tape() -> Tape | None:
    return getattr(_tls, "tape", None)
