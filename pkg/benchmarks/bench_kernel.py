"""Benchmark the compiled score-buffer kernel against the pure fallback.

Two views of the same hot path:
  * micro: raw push + quantile throughput on a growing buffer, which is
    exactly the per-decision work of the dynamic threshold;
  * end-to-end: a full margin-cascade replay with each backend selected.

Usage:
    python benchmarks/bench_kernel.py [--stream 200000] [--replay 50000]
"""

from __future__ import annotations

import argparse
import random
import time

from cascadegate import _kernel
from cascadegate._kernel.pure import ScoreBuffer as PureBuffer
from cascadegate.policy import MARGIN_CASCADE, PolicyConfig
from cascadegate.replay import run_replay
from cascadegate.synth import generate

try:
    from cascadegate._kernel._fastbuf import ScoreBuffer as CompiledBuffer
except ImportError:
    CompiledBuffer = None


def bench_stream(buffer_cls, scores, p=0.3):
    buf = buffer_cls()
    started = time.perf_counter()
    for s in scores:
        buf.quantile(p) if len(buf) else None
        buf.push(s)
    return time.perf_counter() - started


def bench_replay(records, backend):
    original = _kernel.ScoreBuffer
    _kernel.ScoreBuffer = backend
    try:
        started = time.perf_counter()
        trace = run_replay(records, PolicyConfig(MARGIN_CASCADE, probability=0.3))
        elapsed = time.perf_counter() - started
    finally:
        _kernel.ScoreBuffer = original
    return elapsed, trace.accuracy


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--stream", type=int, default=200_000, help="scores in the micro bench")
    parser.add_argument("--replay", type=int, default=50_000, help="records in the replay bench")
    args = parser.parse_args()

    if CompiledBuffer is None:
        print("compiled kernel not built; run `python setup.py build_ext --inplace` first")
        return

    rng = random.Random(0)
    scores = [rng.random() for _ in range(args.stream)]
    pure_s = bench_stream(PureBuffer, scores)
    fast_s = bench_stream(CompiledBuffer, scores)
    print(f"stream push+quantile x{args.stream}:")
    print(f"  pure     {pure_s:8.3f}s  ({args.stream / pure_s / 1e6:.2f} M ops/s)")
    print(f"  compiled {fast_s:8.3f}s  ({args.stream / fast_s / 1e6:.2f} M ops/s)")
    print(f"  speedup  {pure_s / fast_s:8.2f}x")

    records = generate(args.replay, seed=1)
    pure_r, acc_pure = bench_replay(records, PureBuffer)
    fast_r, acc_fast = bench_replay(records, CompiledBuffer)
    assert acc_pure == acc_fast, "backends disagree"
    print(f"margin-cascade replay x{args.replay}:")
    print(f"  pure     {pure_r:8.3f}s  ({args.replay / pure_r / 1e3:.0f} k decisions/s)")
    print(f"  compiled {fast_r:8.3f}s  ({args.replay / fast_r / 1e3:.0f} k decisions/s)")
    print(f"  speedup  {pure_r / fast_r:8.2f}x  (identical accuracy {acc_fast:.6f})")


if __name__ == "__main__":
    main()
