"""Compare the compiled kernels with the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Each row reports the best wall time over ``--repeat`` runs for both
backends, their ratio and the largest output difference: absolute for the
log-valued kernels, relative for the quadrature sums.
"""
import argparse
import importlib
import timeit

import numpy as np

from student_levy import _pykernels
from student_levy.config import DEFAULT_CONFIG
from student_levy.transforms import _fourier_rule, fourier_truncation


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def abs_diff(a, b):
    return float(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


def rel_diff(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def cases():
    u = np.concatenate([np.geomspace(1e-6, 1.0, 20_000), np.linspace(1.0, 200.0, 80_000)])
    for nu in (0.75, 1.5, 2.3):
        yield f"log_char_kernel nu={nu} (n={u.size})", lambda m, nu=nu: m.log_char_kernel(nu, u), abs_diff
    for nu in (0.3, 4.1):
        yield f"log_besselk nu={nu} (n={u.size})", lambda m, nu=nu: m.log_besselk(nu, u), abs_diff
    for nu, c, x in ((1.5, 2.0, 3.0), (1.0, 2.5, 40.0)):
        U = fourier_truncation(nu, c, DEFAULT_CONFIG)
        nodes, weights = _fourier_rule(x, U, DEFAULT_CONFIG)
        label = f"cos_quadrature nu={nu} c={c} x={x} (nodes={nodes.size})"
        yield label, lambda m, a=(nu, c, x, nodes, weights): m.cos_quadrature(*a), rel_diff


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    try:
        ck = importlib.import_module("student_levy._ckernels")
    except ImportError:
        print("compiled extension not built; reinstall without STUDENT_LEVY_NO_EXT")
        return 1
    print(f"{'case':58s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s} {'max diff':>10s}")
    for label, fn, diff_fn in cases():
        tp = best_time(lambda: fn(_pykernels), args.repeat)
        tc = best_time(lambda: fn(ck), args.repeat)
        diff = diff_fn(fn(ck), fn(_pykernels))
        print(f"{label:58s} {tp * 1e3:12.3f} {tc * 1e3:12.3f} {tp / tc:8.1f} {diff:10.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
