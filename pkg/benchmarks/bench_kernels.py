"""Compiled versus pure-Python kernels.

    python benchmarks/bench_kernels.py            # kernel micro-benchmarks
    python benchmarks/bench_kernels.py --search   # also a full 96.230 search per backend

Prints one line per case with the best of ``--repeat`` timings and the ratio.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from dsets import _pykernels, kernels, search
from dsets.automorphisms import automorphism_group
from dsets.group_ring import DesignParameters
from dsets.groups import chief_series, quotient
from dsets.library import get_group


def best(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def square_case(label: str, k: int, seed: int = 0):
    G = get_group(label)
    rng = np.random.default_rng(seed)
    c = np.zeros(G.order, dtype=np.int64)
    c[rng.choice(G.order, k, replace=False)] = 1
    return f"ring_square {label} k={k}", lambda impl: (lambda: impl.ring_square(G.mul, G.inv, c))


def lift_case(label: str):
    """A lift from the first proper quotient to the next one in the chief series."""
    G = get_group(label)
    terms = chief_series(G).terms
    top, nxt = quotient(G, terms[1]), quotient(G, terms[2])
    Q = nxt.target
    # fibre of each element of top.target inside nxt.target
    proj = np.zeros(Q.order, dtype=np.int64)
    for x in range(G.order):
        proj[nxt.image_of[x]] = top.image_of[x]
    fibres = np.array([np.flatnonzero(proj == y) for y in range(top.target.order)], dtype=np.int32)
    p = DesignParameters(96, 20, 4)
    U = terms[2].order
    counts = [8, 12] if top.target.order == 2 else [p.k // top.target.order] * top.target.order
    t_id, t_off = p.k - p.lam + p.lam * U, p.lam * U
    args = (Q.mul, Q.inv, Q.identity, fibres, counts, U, t_id, t_off)
    return f"lift_preimages {label} |Q|={Q.order}", lambda impl: (lambda: impl.lift_preimages(*args))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--search", action="store_true", help="time a full 96.230 enumeration on both backends")
    args = ap.parse_args(argv)

    if kernels.compiled is None:
        print("compiled kernels unavailable; build with `pip install -e . --no-build-isolation`")
        return 1
    impls = {"cython": kernels.compiled, "python": _pykernels}

    cases = [square_case("16.8", 6), square_case("96.230", 20), square_case("96.230", 48), lift_case("96.230")]
    print(f"{'case':40s} {'cython':>10s} {'python':>10s} {'speedup':>8s}")
    for name, make in cases:
        t = {k: best(make(impl), args.repeat) for k, impl in impls.items()}
        print(f"{name:40s} {t['cython'] * 1e3:9.3f}ms {t['python'] * 1e3:9.3f}ms {t['python'] / t['cython']:7.1f}x")

    if args.search:
        G = get_group("96.230")
        A = automorphism_group(G)
        p = DesignParameters(96, 20, 4)
        t = {}
        for name, impl in impls.items():
            kernels.lift_preimages, kernels.ring_square = impl.lift_preimages, impl.ring_square
            t0 = time.perf_counter()
            n = len(search.enumerate_difference_sets(G, p, A=A))
            t[name] = time.perf_counter() - t0
        print(f"{'search 96.230 (' + str(n) + ' classes)':40s} {t['cython']:9.2f}s  {t['python']:9.2f}s  {t['python'] / t['cython']:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
