"""Compare the compiled kernels against their pure-Python twins.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-``repeat`` wall times per kernel and backend, then times a
full default-quadrature sphere integral under each backend (in a fresh
interpreter, since the backend is chosen at import).
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from topospec import _kernels_py as pure

try:
    from topospec import _kernels as compiled
except ImportError:
    compiled = None


def cases(rng):
    vals = rng.normal(size=200_000) * 1e3
    A = rng.normal(size=(20_000, 4, 4))
    g = np.einsum("kij,klj->kil", A, A) + 0.1 * np.eye(4)
    e = np.eye(4)[None] + 0.1 * rng.normal(size=(20_000, 4, 4))
    de = rng.normal(size=(20_000, 4, 4, 4))
    eta = np.array([-1.0, 1.0, 1.0, 1.0])
    return {
        "neumaier_sum (200k)": lambda m: m.neumaier_sum(vals, 0.0, 0.0),
        "ldl_coframe (20k x 4x4)": lambda m: m.ldl_coframe(g, np.ones(4), 1e-12),
        "spin_connection (20k, n=4)": lambda m: m.spin_connection(e, de, eta),
    }


SPHERE = ("import time; from topospec.configurations import sphere_config; "
          "t=time.perf_counter(); r=sphere_config(1.0).invariant(); "
          "print(time.perf_counter()-t, repr(r.value))")


def sphere_time(pure_python: bool, repeat: int):
    env = dict(os.environ, TOPOSPEC_PURE_PYTHON="1" if pure_python else "0")
    best, value = float("inf"), None
    for _ in range(repeat):
        out = subprocess.run([sys.executable, "-c", SPHERE], env=env, capture_output=True, text=True, check=True)
        t, value = out.stdout.split()
        best = min(best, float(t))
    return best, value


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<30}{'cython [s]':>12}{'python [s]':>12}{'speedup':>10}")
    for name, fn in cases(rng).items():
        tp = min(timeit.repeat(lambda: fn(pure), number=1, repeat=args.repeat))
        if compiled is None:
            print(f"{name:<30}{'n/a':>12}{tp:>12.4f}{'':>10}")
            continue
        tc = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat))
        print(f"{name:<30}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")
    tp, vp = sphere_time(True, args.repeat)
    if compiled is not None:
        tc, vc = sphere_time(False, args.repeat)
        print(f"{'sphere euler2 (default quad)':<30}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x")
        print(f"values: cython {vc}  python {vp}")
    else:
        print(f"{'sphere euler2 (default quad)':<30}{'n/a':>12}{tp:>12.4f}")


if __name__ == "__main__":
    main()
