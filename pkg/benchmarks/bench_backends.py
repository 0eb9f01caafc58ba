"""Times the compiled kernels against the numpy fallback.

Both backends are imported directly, so the comparison runs regardless of
which one the package selected at import time. Each kernel is checked for
agreement on identical inputs before it is timed; the timing loop reports
the best per-call figure over several measurement rounds.

Run:  python3 benchmarks/bench_backends.py [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from swde.numerics import _slowops

try:
    from swde.numerics import _fastops
except ImportError:
    _fastops = None

# (c_in, length, c_out, width): the three conv layers of the title encoder
# at default dimensions, with the length shrinking per valid layer.
CONV_LAYERS = [(32, 16, 64, 3), (64, 14, 64, 3), (64, 12, 128, 3)]


def best_time(fn, inner: int, rounds: int) -> float:
    """Best per-call seconds over ``rounds`` measurements of ``inner`` calls."""
    fn()  # warm up
    best = float("inf")
    for _ in range(rounds):
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - start) / inner)
    return best


def make_pvdbow_case(rng, docs: int, doc_len: int, vocab: int, dim: int):
    word_ids = rng.integers(0, vocab, size=docs * doc_len).astype(np.int32)
    doc_offsets = np.arange(docs + 1, dtype=np.int64) * doc_len
    doc_order = np.arange(docs, dtype=np.int64)
    weights = rng.random(vocab) + 0.05
    cum_table = np.cumsum(weights / weights.sum() * 2**31).astype(np.uint64)
    doc_vecs = rng.normal(scale=0.01, size=(docs, dim))
    word_vecs = np.zeros((vocab, dim))
    return {
        "doc_vecs": doc_vecs,
        "word_vecs": word_vecs,
        "word_ids": word_ids,
        "doc_offsets": doc_offsets,
        "doc_order": doc_order,
        "cum_table": cum_table,
    }


def run_epoch(impl, case, negative=5):
    doc_vecs = case["doc_vecs"].copy()
    word_vecs = case["word_vecs"].copy()
    out = impl.pvdbow_epoch(
        doc_vecs, word_vecs, case["word_ids"], case["doc_offsets"], case["doc_order"],
        case["cum_table"], negative, 0.025, 1e-4, 0, len(case["word_ids"]), 9,
    )
    return out, doc_vecs, word_vecs


def run_infer(impl, case, dim, steps=100, negative=5):
    doc_vec = np.full(dim, 0.001)
    state = impl.pvdbow_infer(
        doc_vec, case["word_vecs"], case["word_ids"][:40], steps,
        case["cum_table"], negative, 0.025, 1e-4, 7,
    )
    return state, doc_vec


def check_agreement(case, dim) -> None:
    rng = np.random.default_rng(0)
    for c_in, length, c_out, width in CONV_LAYERS:
        signal = rng.normal(size=(c_in, length))
        filters = rng.normal(size=(c_out, c_in, width))
        bias = rng.normal(size=c_out)
        fast = _fastops.conv1d_forward(signal, filters, bias)
        slow = _slowops.conv1d_forward(signal, filters, bias)
        assert np.allclose(fast, slow, rtol=1e-10, atol=1e-12), "conv1d_forward disagrees"
        d_out = rng.normal(size=fast.shape)
        for a, b in zip(
            _fastops.conv1d_backward(signal, filters, d_out),
            _slowops.conv1d_backward(signal, filters, d_out),
        ):
            assert np.allclose(a, b, rtol=1e-10, atol=1e-12), "conv1d_backward disagrees"

    (loss_f, pairs_f, state_f), docs_f, words_f = run_epoch(_fastops, case)
    (loss_s, pairs_s, state_s), docs_s, words_s = run_epoch(_slowops, case)
    assert (pairs_f, state_f) == (pairs_s, state_s), "pvdbow_epoch RNG streams diverge"
    assert abs(loss_f - loss_s) < 1e-6 * max(1.0, abs(loss_s)), "pvdbow_epoch loss disagrees"
    assert np.allclose(docs_f, docs_s, rtol=1e-9, atol=1e-12), "doc vectors disagree"
    assert np.allclose(words_f, words_s, rtol=1e-9, atol=1e-12), "word vectors disagree"

    state_f, vec_f = run_infer(_fastops, case, dim)
    state_s, vec_s = run_infer(_slowops, case, dim)
    assert state_f == state_s, "pvdbow_infer RNG streams diverge"
    assert np.allclose(vec_f, vec_s, rtol=1e-9, atol=1e-12), "inferred vectors disagree"
    print("agreement: all four kernels match across backends")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true", help="smaller sizes, fewer rounds")
    args = parser.parse_args()

    if _fastops is None:
        print("compiled backend not built; nothing to compare (numpy fallback is active)")
        return

    rng = np.random.default_rng(1)
    docs, doc_len, vocab, dim = (60, 30, 500, 100) if args.quick else (200, 50, 2000, 300)
    inner, rounds = (200, 3) if args.quick else (1000, 5)
    case = make_pvdbow_case(rng, docs, doc_len, vocab, dim)
    check_agreement(case, dim)

    rows = []
    for c_in, length, c_out, width in CONV_LAYERS:
        signal = rng.normal(size=(c_in, length))
        filters = rng.normal(size=(c_out, c_in, width))
        bias = rng.normal(size=c_out)
        d_out = rng.normal(size=(c_out, length - width + 1))
        label = f"conv1d_forward {c_in}x{length}->{c_out}"
        fast = best_time(lambda: _fastops.conv1d_forward(signal, filters, bias), inner, rounds)
        slow = best_time(lambda: _slowops.conv1d_forward(signal, filters, bias), inner, rounds)
        rows.append((label, fast, slow))
        label = f"conv1d_backward {c_in}x{length}->{c_out}"
        fast = best_time(lambda: _fastops.conv1d_backward(signal, filters, d_out), inner, rounds)
        slow = best_time(lambda: _slowops.conv1d_backward(signal, filters, d_out), inner, rounds)
        rows.append((label, fast, slow))

    label = f"pvdbow_epoch {docs} docs x {doc_len} tokens, dim {dim}"
    fast = best_time(lambda: run_epoch(_fastops, case), 1, 3)
    slow = best_time(lambda: run_epoch(_slowops, case), 1, 3)
    rows.append((label, fast, slow))

    label = f"pvdbow_infer 40 tokens x 100 steps, dim {dim}"
    fast = best_time(lambda: run_infer(_fastops, case, dim), 1, 3)
    slow = best_time(lambda: run_infer(_slowops, case, dim), 1, 3)
    rows.append((label, fast, slow))

    width_label = max(len(r[0]) for r in rows)
    print(f"\n{'kernel':<{width_label}}  {'compiled':>12}  {'numpy':>12}  {'speedup':>8}")
    for label, fast, slow in rows:
        print(
            f"{label:<{width_label}}  {fast * 1e6:>10.1f}us  {slow * 1e6:>10.1f}us"
            f"  {slow / fast:>7.1f}x"
        )


if __name__ == "__main__":
    main()
