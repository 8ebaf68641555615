"""Time the cycle kernel backends (and the phase engine) on one batch workload.

    python3 benchmarks/bench_kernels.py --rows 1024 --cols 32 --batches 20
"""

import argparse
import time

import numpy as np

from fastsram import kernels
from fastsram.array import ArrayGeometry, FastArray
from fastsram.logic import FULL_ADDER


def time_batches(geo, mode, batches, seed):
    rng = np.random.default_rng(seed)
    arr = FastArray(geo, mode=mode)
    arr.load([int(v) for v in rng.integers(0, 1 << geo.cols, geo.rows, dtype=np.uint64)])
    ops = [[int(v) for v in rng.integers(0, 1 << geo.cols, geo.rows, dtype=np.uint64)]
           for _ in range(batches)]
    mask = (1 << geo.rows) - 1
    t0 = time.perf_counter()
    for o in ops:
        arr.batch_op(mask, operands=o)
    return time.perf_counter() - t0, arr.image.copy()


def time_kernel(name, geo, batches, seed):
    """The kernel call alone, without operand packing or bookkeeping."""
    rng = np.random.default_rng(seed)
    R, C = geo.rows, geo.cols
    w = geo.base_width
    cells = rng.integers(0, 2, (R, C), dtype=np.uint8)
    opsig = rng.integers(0, 2, (R, C), dtype=np.uint8)
    heads = np.arange(C - w, -1, -w, dtype=np.intp)
    fa = FULL_ADDER
    args = (opsig, np.arange(R, dtype=np.intp), heads, heads + w - 1,
            np.full(len(heads), kernels.ALU, np.uint8), np.array(fa.out_table, np.uint8),
            np.array(fa.state_table, np.uint8))
    carry = np.zeros((R, len(heads)), np.uint8)
    fn = kernels.get(name)
    t0 = time.perf_counter()
    for _ in range(batches):
        fn(cells, *args, carry, w)
    return time.perf_counter() - t0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=1024)
    ap.add_argument("--cols", type=int, default=32)
    ap.add_argument("--alu-sites", type=int, default=1)
    ap.add_argument("--batches", type=int, default=20)
    ap.add_argument("--phase-batches", type=int, default=1,
                    help="batches for the phase engine (slow); 0 to skip")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    geo = ArrayGeometry(args.rows, args.cols, args.alu_sites)
    q = geo.base_width
    row_cycles = args.rows * q
    print(f"geometry {geo.rows}x{geo.cols}, q={q}, {args.batches} batches")
    results = {}
    for name in kernels.available():
        kernels.use_backend(name)
        secs, image = time_batches(geo, "cycle", args.batches, args.seed)
        results[name] = image
        rate = args.batches * row_cycles / secs
        ksecs = time_kernel(name, geo, args.batches, args.seed)
        krate = args.batches * row_cycles / ksecs
        print(f"{name:>9}: batch_op {secs * 1e3:9.2f} ms  {rate / 1e6:8.2f} M row-cycles/s"
              f" | kernel only {ksecs * 1e3:9.2f} ms  {krate / 1e6:8.2f} M row-cycles/s")
    kernels.use_backend("auto")
    if len(results) == 2:
        same = (results["python"] == results["compiled"]).all()
        print(f"backends agree: {bool(same)}")
    if args.phase_batches:
        secs, _ = time_batches(geo, "phase", args.phase_batches, args.seed)
        rate = args.phase_batches * row_cycles / secs
        print(f"{'phase':>9}: batch_op {secs * 1e3:9.2f} ms  {rate / 1e6:8.3f} M row-cycles/s "
              f"({args.phase_batches} batch)")


if __name__ == "__main__":
    main()
