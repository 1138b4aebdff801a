#!/usr/bin/env python3
"""Time the compiled contact kernel against the pure-Python twin.

Usage: python benchmarks/bench_backends.py [n_substeps]
"""

import sys
import time

import numpy as np

from tendbench.simenv import SceneConfig
from tendbench.simenv import _simcore_py

try:
    from tendbench.simenv import _simcore
except ImportError:
    _simcore = None


def run(kernel, n):
    scene = SceneConfig()
    par = scene.pack_params()
    state = np.zeros(26)
    state[0:3] = (0.0, 0.0, -0.004)
    state[6:9] = state[0:3]
    fdes = np.array([10.0, -10.0, 10.0])
    gains = np.full(3, 0.002)
    qd = np.full(3, 0.05)
    qlo = np.full(3, -0.5)
    qhi = np.full(3, 0.5)
    t0 = time.perf_counter()
    kernel.step_n(par, state, np.zeros(3), fdes, np.ones(3), gains, qd, qlo, qhi, 0.0, n)
    dt = time.perf_counter() - t0
    return dt, state


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
    t_py, s_py = run(_simcore_py, n)
    print(f"pure python : {n} substeps in {t_py:8.3f} s  ({t_py / n * 1e6:7.3f} us/substep)")
    if _simcore is None:
        print("compiled    : extension not built (pip install -e . or python setup.py build_ext --inplace)")
        return
    t_c, s_c = run(_simcore, n)
    print(f"compiled    : {n} substeps in {t_c:8.3f} s  ({t_c / n * 1e6:7.3f} us/substep)")
    print(f"speedup     : {t_py / t_c:8.1f} x")
    print(f"bit-identical end states: {bool(np.array_equal(s_py, s_c))}")


if __name__ == "__main__":
    main()
