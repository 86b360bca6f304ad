"""Compare the numba and pure-numpy kernel paths on the large fixtures.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

For each workload the pipeline ``layer_decompose -> residual ->
frequency_series`` runs under both backends; the best wall time of
``--repeat`` runs is reported, and the two resulting N(k) series are checked
to be bit-identical.  Graph construction is excluded from the timings.
"""

import argparse
import time

import numpy as np

from discrete_almgren import _kernels
from discrete_almgren.almgren import frequency_series
from discrete_almgren.generators import gen_lattice
from discrete_almgren.graph import layer_decompose
from discrete_almgren.harmonic import lattice_polynomial_field, residual, solve_dirichlet, tree_example_field
from discrete_almgren.polynomial import parse_polynomial


def tree_case(depth):
    g, root, f = tree_example_field(depth)
    return f"tree depth {depth}", g, root, f


def lattice_case(dim, radius, poly):
    g, o = gen_lattice(dim, radius)
    return f"lattice {dim}D r={radius}", g, o, lattice_polynomial_field(g, parse_polynomial(poly, dim))


def pipeline(g, base, f, backend):
    dec = layer_decompose(g, base, backend=backend)
    residual(g, f, backend=backend)
    return frequency_series(dec, f, backend=backend)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="smaller fixtures")
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if _kernels.NUMBA_AVAILABLE else [])
    cases = ([tree_case(14), lattice_case(2, 60, "x*y")] if args.quick else
             [tree_case(18), tree_case(20), lattice_case(2, 400, "x*y"), lattice_case(3, 40, "x*y*z")])

    # warm the JIT so compilation is not timed
    small = tree_case(4)
    for b in backends:
        pipeline(*small[1:], b)

    print(f"{'workload':<22}{'vertices':>11}" + "".join(f"{b:>12}" for b in backends)
          + ("   speedup" if len(backends) == 2 else ""))
    for name, g, base, f in cases:
        results = {b: best_of(lambda: pipeline(g, base, f, b), args.repeat) for b in backends}
        series = [r[1].N for r in results.values()]
        assert all(np.array_equal(series[0], s) for s in series), "backends disagree"
        line = f"{name:<22}{g.vertex_count:>11,}" + "".join(f"{results[b][0]:>11.3f}s" for b in backends)
        if len(backends) == 2:
            line += f"{results['numpy'][0] / results['numba'][0]:>9.1f}x"
        print(line)

    # Dirichlet solve: CG is numpy-level in both paths, Gauss-Seidel is the sequential kernel
    g, o = gen_lattice(2, 12 if args.quick else 30)
    coords = g.coords
    outer = np.flatnonzero(np.abs(coords).sum(axis=1) == g.truncated_at)
    vals = coords[outer, 0] * coords[outer, 1] * 1.0
    for method in ("cg", "gauss-seidel"):
        for b in backends:
            if method == "gauss-seidel" and b == "numpy" and not args.quick:
                continue  # interpreted sweeps take minutes at this size
            t, f = best_of(lambda: solve_dirichlet(g, (outer, vals), method=method, backend=b), 1)
            print(f"solve {method:<13} {g.vertex_count:>9,} vertices  {b:<6}{t:>8.3f}s  "
                  f"{f.iterations} iterations")


if __name__ == "__main__":
    main()
