"""Selects the kernel implementation at import time.

The compiled ``_fastops`` extension is preferred for the per-pair SGD
loops, where interpreter overhead dominates; if it is missing (no compiler
at install time) or ``SWDE_PURE_PY=1`` is set, the numpy fallback
``_slowops`` is used instead. Both expose the same four kernels and
consume identical RNG streams.

The convolutions always come from ``_slowops``: its im2col + BLAS form
beats the compiled loop at model-sized inputs (see
benchmarks/bench_backends.py), so the extension only earns its keep where
BLAS cannot be brought to bear.
"""

import os

from swde.numerics import _slowops

FORCE_PURE = os.environ.get("SWDE_PURE_PY", "") not in ("", "0")

if FORCE_PURE:
    _impl = _slowops
    COMPILED = False
else:
    try:
        from swde.numerics import _fastops as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        _impl = _slowops
        COMPILED = False

BACKEND_NAME = "compiled" if COMPILED else "numpy"

conv1d_forward = _slowops.conv1d_forward
conv1d_backward = _slowops.conv1d_backward
pvdbow_epoch = _impl.pvdbow_epoch
pvdbow_infer = _impl.pvdbow_infer
