"""Pure numpy/Python kernels: the fallback twin of ``_fastops``.

Same signatures, same algorithms, same RNG streams as the compiled module.
The convolution uses im2col so numpy's BLAS does the heavy lifting; the
PV-DBOW loop is a faithful per-pair translation and is the slow path the
compiled kernels exist for (see benchmarks/bench_backends.py).
"""

from __future__ import annotations

import math

import numpy as np

from swde.numerics.rng import splitmix64_next


def conv1d_forward(signal, filters, bias):
    """Valid cross-correlation. signal (c_in, L), filters (c_out, c_in, w)."""
    c_out, c_in, w = filters.shape
    l_out = signal.shape[1] - w + 1
    cols = np.lib.stride_tricks.sliding_window_view(signal, w, axis=1)
    cols = cols.transpose(0, 2, 1).reshape(c_in * w, l_out)
    out = filters.reshape(c_out, c_in * w) @ cols + bias[:, None]
    return np.ascontiguousarray(out)


def conv1d_backward(signal, filters, d_out):
    """Adjoints of conv1d_forward w.r.t. signal, filters, and bias."""
    c_out, c_in, w = filters.shape
    l_out = signal.shape[1] - w + 1
    cols = np.lib.stride_tricks.sliding_window_view(signal, w, axis=1)
    cols = cols.transpose(0, 2, 1).reshape(c_in * w, l_out)

    d_bias = d_out.sum(axis=1)
    d_filters = (d_out @ cols.T).reshape(c_out, c_in, w)
    d_cols = (filters.reshape(c_out, c_in * w).T @ d_out).reshape(c_in, w, l_out)
    d_signal = np.zeros_like(signal)
    for t in range(w):
        d_signal[:, t : t + l_out] += d_cols[:, t, :]
    return d_signal, d_filters, d_bias


def _sigmoid(x: float) -> float:
    # Branchy form mirrors the C kernel exactly, overflow-free on both sides.
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _draw_negative(cum_table, domain, target, rng_state):
    tries = 0
    while True:
        rng_state, z = splitmix64_next(rng_state)
        idx = int(np.searchsorted(cum_table, z % domain, side="right"))
        tries += 1
        # The retry cap keeps degenerate single-word vocabularies from hanging.
        if idx != target or tries >= 8:
            return idx, rng_state


def pvdbow_epoch(
    doc_vecs,
    word_vecs,
    word_ids,
    doc_offsets,
    doc_order,
    cum_table,
    negative,
    alpha0,
    alpha_min,
    pair_index,
    total_pairs,
    rng_state,
):
    """One pass over the documents in ``doc_order``; updates vectors in place.

    For each (document, word) pair the document vector is pushed toward the
    observed word's output vector and away from ``negative`` sampled noise
    words. Returns ``(loss_sum, pair_index, rng_state)`` where loss_sum is
    the summed negative log-likelihood of the processed pairs.
    """
    loss_sum = 0.0
    domain = int(cum_table[-1])
    for di in doc_order:
        d = doc_vecs[di]
        start, stop = int(doc_offsets[di]), int(doc_offsets[di + 1])
        for k in range(start, stop):
            target = int(word_ids[k])
            alpha = alpha0 - (alpha0 - alpha_min) * (pair_index / total_pairs)
            if alpha < alpha_min:
                alpha = alpha_min
            pair_index += 1
            neu = np.zeros_like(d)
            for j in range(negative + 1):
                if j == 0:
                    wi, label = target, 1.0
                else:
                    wi, rng_state = _draw_negative(cum_table, domain, target, rng_state)
                    label = 0.0
                w = word_vecs[wi]
                f = _sigmoid(float(np.dot(d, w)))
                g = (label - f) * alpha
                if j == 0:
                    loss_sum -= math.log(max(f, 1e-12))
                else:
                    loss_sum -= math.log(max(1.0 - f, 1e-12))
                neu += g * w
                word_vecs[wi] += g * d
            d += neu
    return loss_sum, pair_index, rng_state


def pvdbow_infer(
    doc_vec,
    word_vecs,
    word_ids,
    steps,
    cum_table,
    negative,
    alpha0,
    alpha_min,
    rng_state,
):
    """Fit a single fresh document vector against frozen word vectors."""
    domain = int(cum_table[-1])
    total_pairs = steps * len(word_ids)
    pair_index = 0
    for _ in range(steps):
        for k in range(len(word_ids)):
            target = int(word_ids[k])
            alpha = alpha0 - (alpha0 - alpha_min) * (pair_index / total_pairs)
            if alpha < alpha_min:
                alpha = alpha_min
            pair_index += 1
            neu = np.zeros_like(doc_vec)
            for j in range(negative + 1):
                if j == 0:
                    wi, label = target, 1.0
                else:
                    wi, rng_state = _draw_negative(cum_table, domain, target, rng_state)
                    label = 0.0
                w = word_vecs[wi]
                f = _sigmoid(float(np.dot(doc_vec, w)))
                neu += ((label - f) * alpha) * w
            doc_vec += neu
    return rng_state
