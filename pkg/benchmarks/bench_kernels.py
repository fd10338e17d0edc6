"""Time the compiled and numpy kernel backends on representative inputs.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from gmespin import kernels
from gmespin.gme import ALIGNED


def cases(rng):
    m0 = rng.normal(size=8) + 1j * rng.normal(size=8)
    m1 = rng.normal(size=8) + 1j * rng.normal(size=8)
    th = np.linspace(0, np.pi, 64)
    ph = np.linspace(0, 2 * np.pi, 128, endpoint=False)
    params = rng.uniform(0, 2 * np.pi, 12)
    v = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    w = v / np.linalg.norm(v)
    ops = np.array(ALIGNED.spin_restrictions())
    psi = rng.normal(size=2**10) + 1j * rng.normal(size=2**10)
    psi /= np.linalg.norm(psi)
    return {
        "overlap_grid 64x128, d=8": lambda k: k.overlap_grid(m0, m1, th, ph),
        "overlap_point": lambda k: k.overlap_point(m0, m1, 0.3, 1.2),
        "isometry m=4": lambda k: k.isometry(params, 4),
        "roof_objective m=4": lambda k: k.roof_objective(params, w, ops, 4),
        "ising chain n=10": lambda k: k.apply_ising_chain(psi, 10, 0.8, 0.6),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = kernels.backends()
    names = sorted(backends)
    print(f"{'kernel':28s}" + "".join(f"{n:>14s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for label, fn in cases(np.random.default_rng(0)).items():
        times = []
        for name in names:
            k = backends[name]
            number, _ = timeit.Timer(lambda: fn(k)).autorange()
            best = min(timeit.repeat(lambda: fn(k), number=number, repeat=args.repeat)) / number
            times.append(best)
        row = f"{label:28s}" + "".join(f"{t * 1e6:12.2f}us" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
