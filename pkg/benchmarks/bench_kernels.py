"""Time the numba and numpy kernel backends on the same inputs.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]

Numba timings exclude the first (compiling) call.  Results are also checked
for agreement so a fast but wrong backend shows up here.
"""
import argparse
import timeit

import numpy as np

from oscidyn.kernels import BACKENDS
from oscidyn.matrix import combinations


def cases(rng):
    out = []
    for n in (4, 6, 8, 10):
        A = rng.standard_normal((n, n))
        r = n // 2
        rc = combinations(n, r)
        out.append((f"minor_values n={n} order={r} ({len(rc) ** 2} minors)",
                    "minor_values", (A, rc, rc)))
    Y = rng.choice([-1.0, 0.0, 1.0], size=(20_000, 12)) * rng.random((20_000, 12))
    out.append(("sign_counts 20000 x 12", "sign_counts", (Y, 1e-12)))
    out.append(("det 10x10", "det", (rng.standard_normal((10, 10)),)))
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    names = [b for b in ("numpy", "numba") if b in BACKENDS]
    print(f"{'case':<44}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}  agree")
    for label, fn, inputs in cases(rng):
        times, results = {}, {}
        for name in names:
            impl = getattr(BACKENDS[name], fn)
            results[name] = impl(*inputs)          # warm-up / compile
            times[name] = min(timeit.repeat(lambda: impl(*inputs), number=1,
                                            repeat=args.repeat))
        agree = all(np.allclose(np.asarray(results[n], dtype=float),
                                np.asarray(results[names[0]], dtype=float), rtol=1e-9, atol=1e-12)
                    for n in names)
        speed = times["numpy"] / times["numba"] if "numba" in times else float("nan")
        print(f"{label:<44}" + "".join(f"{times[n] * 1e3:>10.3f}ms" for n in names)
              + f"{speed:>9.1f}x  {agree}")


if __name__ == "__main__":
    main()
