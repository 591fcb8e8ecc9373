"""Compare the numba and numpy gate kernels on QFT circuits.

    python3 benchmarks/bench_kernels.py [--n 10 14 18] [--batch 1 16] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from oqft import _kernels
from oqft.qftlib import exact_qft, optimistic_qft


def bench(circ, batch, kernels, repeat):
    rng = np.random.default_rng(0)
    psi = rng.normal(size=(1 << circ.n, batch)) + 1j * rng.normal(size=(1 << circ.n, batch))
    compiled = circ.compiled
    _kernels.apply_gates(psi.copy(), *compiled, kernels=kernels)  # warm up / compile
    work = psi.copy()
    return min(timeit.repeat(lambda: _kernels.apply_gates(work, *compiled, kernels=kernels), number=1, repeat=repeat))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[10, 14, 18])
    p.add_argument("--batch", type=int, nargs="+", default=[1, 16])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    if _kernels.NUMBA_KERNELS is None:
        raise SystemExit("numba is not installed")

    print(f"{'circuit':<22}{'batch':>6}{'gates':>7}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}")
    for n in args.n:
        for name, circ in (("exact", exact_qft(n)), ("optimistic m=3", optimistic_qft(n, 3))):
            for batch in args.batch:
                if (1 << n) * batch > 1 << 22:
                    continue
                t_np = bench(circ, batch, _kernels.NUMPY_KERNELS, args.repeat)
                t_nb = bench(circ, batch, _kernels.NUMBA_KERNELS, args.repeat)
                label = f"{name} n={n}"
                print(f"{label:<22}{batch:>6}{len(circ):>7}{t_np * 1e3:>11.2f}{t_nb * 1e3:>11.2f}{t_np / t_nb:>9.1f}")


if __name__ == "__main__":
    main()
