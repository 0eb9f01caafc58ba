# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: the hot twin of ``_slowops``.

Same signatures, same algorithms, same splitmix64 streams as the fallback,
so the two backends stay interchangeable (floating-point rounding aside).
"""

import numpy as np

from libc.math cimport exp, fmax, log
from libc.stdint cimport int32_t, int64_t, uint64_t


cdef inline uint64_t _next(uint64_t *state) nogil:
    cdef uint64_t z
    state[0] = state[0] + <uint64_t>0x9E3779B97F4A7C15
    z = state[0]
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline double _sigmoid(double x) nogil:
    cdef double e
    if x >= 0.0:
        return 1.0 / (1.0 + exp(-x))
    e = exp(x)
    return e / (1.0 + e)


cdef inline Py_ssize_t _bisect_right(const uint64_t[::1] table, uint64_t r) nogil:
    cdef Py_ssize_t lo = 0, hi = table.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if table[mid] <= r:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline Py_ssize_t _draw_negative(
    const uint64_t[::1] table, uint64_t domain, Py_ssize_t target, uint64_t *state
) nogil:
    cdef Py_ssize_t idx
    cdef int tries = 0
    while True:
        idx = _bisect_right(table, _next(state) % domain)
        tries += 1
        if idx != target or tries >= 8:
            return idx


def conv1d_forward(double[:, ::1] signal, double[:, :, ::1] filters, double[::1] bias):
    cdef Py_ssize_t c_out = filters.shape[0]
    cdef Py_ssize_t c_in = filters.shape[1]
    cdef Py_ssize_t w = filters.shape[2]
    cdef Py_ssize_t l_out = signal.shape[1] - w + 1
    out_arr = np.empty((c_out, l_out), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t o, p, c, t
    cdef double acc
    with nogil:
        for o in range(c_out):
            for p in range(l_out):
                acc = bias[o]
                for c in range(c_in):
                    for t in range(w):
                        acc += filters[o, c, t] * signal[c, p + t]
                out[o, p] = acc
    return out_arr


def conv1d_backward(double[:, ::1] signal, double[:, :, ::1] filters, double[:, ::1] d_out):
    cdef Py_ssize_t c_out = filters.shape[0]
    cdef Py_ssize_t c_in = filters.shape[1]
    cdef Py_ssize_t w = filters.shape[2]
    cdef Py_ssize_t l_out = signal.shape[1] - w + 1
    d_signal_arr = np.zeros((signal.shape[0], signal.shape[1]), dtype=np.float64)
    d_filters_arr = np.zeros((c_out, c_in, w), dtype=np.float64)
    d_bias_arr = np.zeros(c_out, dtype=np.float64)
    cdef double[:, ::1] d_signal = d_signal_arr
    cdef double[:, :, ::1] d_filters = d_filters_arr
    cdef double[::1] d_bias = d_bias_arr
    cdef Py_ssize_t o, p, c, t
    cdef double d
    with nogil:
        for o in range(c_out):
            for p in range(l_out):
                d = d_out[o, p]
                d_bias[o] += d
                for c in range(c_in):
                    for t in range(w):
                        d_filters[o, c, t] += d * signal[c, p + t]
                        d_signal[c, p + t] += d * filters[o, c, t]
    return d_signal_arr, d_filters_arr, d_bias_arr


def pvdbow_epoch(
    double[:, ::1] doc_vecs,
    double[:, ::1] word_vecs,
    int32_t[::1] word_ids,
    int64_t[::1] doc_offsets,
    int64_t[::1] doc_order,
    uint64_t[::1] cum_table,
    int negative,
    double alpha0,
    double alpha_min,
    long long pair_index,
    long long total_pairs,
    rng_state,
):
    cdef uint64_t state = rng_state
    cdef uint64_t domain = cum_table[cum_table.shape[0] - 1]
    cdef Py_ssize_t dim = doc_vecs.shape[1]
    cdef double[::1] neu = np.empty(dim, dtype=np.float64)
    cdef double loss_sum = 0.0
    cdef Py_ssize_t oi, di, k, j, m, wi, target, start, stop
    cdef double alpha, x, f, g, label
    with nogil:
        for oi in range(doc_order.shape[0]):
            di = doc_order[oi]
            start = doc_offsets[di]
            stop = doc_offsets[di + 1]
            for k in range(start, stop):
                target = word_ids[k]
                alpha = alpha0 - (alpha0 - alpha_min) * (<double>pair_index / <double>total_pairs)
                if alpha < alpha_min:
                    alpha = alpha_min
                pair_index += 1
                for m in range(dim):
                    neu[m] = 0.0
                for j in range(negative + 1):
                    if j == 0:
                        wi = target
                        label = 1.0
                    else:
                        wi = _draw_negative(cum_table, domain, target, &state)
                        label = 0.0
                    x = 0.0
                    for m in range(dim):
                        x += doc_vecs[di, m] * word_vecs[wi, m]
                    f = _sigmoid(x)
                    g = (label - f) * alpha
                    if j == 0:
                        loss_sum -= log(fmax(f, 1e-12))
                    else:
                        loss_sum -= log(fmax(1.0 - f, 1e-12))
                    for m in range(dim):
                        neu[m] += g * word_vecs[wi, m]
                    for m in range(dim):
                        word_vecs[wi, m] += g * doc_vecs[di, m]
                for m in range(dim):
                    doc_vecs[di, m] += neu[m]
    return loss_sum, pair_index, state


def pvdbow_infer(
    double[::1] doc_vec,
    double[:, ::1] word_vecs,
    int32_t[::1] word_ids,
    int steps,
    uint64_t[::1] cum_table,
    int negative,
    double alpha0,
    double alpha_min,
    rng_state,
):
    cdef uint64_t state = rng_state
    cdef uint64_t domain = cum_table[cum_table.shape[0] - 1]
    cdef Py_ssize_t dim = doc_vec.shape[0]
    cdef double[::1] neu = np.empty(dim, dtype=np.float64)
    cdef long long total_pairs = steps * word_ids.shape[0]
    cdef long long pair_index = 0
    cdef Py_ssize_t s, k, j, m, wi, target
    cdef double alpha, x, f, g, label
    with nogil:
        for s in range(steps):
            for k in range(word_ids.shape[0]):
                target = word_ids[k]
                alpha = alpha0 - (alpha0 - alpha_min) * (<double>pair_index / <double>total_pairs)
                if alpha < alpha_min:
                    alpha = alpha_min
                pair_index += 1
                for m in range(dim):
                    neu[m] = 0.0
                for j in range(negative + 1):
                    if j == 0:
                        wi = target
                        label = 1.0
                    else:
                        wi = _draw_negative(cum_table, domain, target, &state)
                        label = 0.0
                    x = 0.0
                    for m in range(dim):
                        x += doc_vec[m] * word_vecs[wi, m]
                    f = _sigmoid(x)
                    g = (label - f) * alpha
                    for m in range(dim):
                        neu[m] += g * word_vecs[wi, m]
                for m in range(dim):
                    doc_vec[m] += neu[m]
    return state
