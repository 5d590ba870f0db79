"""Benchmark the compiled propagation kernel against the Python fallback.

Run as ``python -m udw_cavity.benchmark [--tau MAX] [--repeats N]``.
Both backends integrate the same accelerated two-detector system (40
modes, 84-dimensional phase space) and are timed over identical lattices.
"""

from __future__ import annotations

import argparse
import importlib
import math
import time

import numpy as np

from . import _kernel_py
from .evolution import _lattice_samples
from .runner import get_scenario


def _load_compiled():
    try:
        return importlib.import_module("udw_cavity._kernel")
    except ImportError:
        return None


def run_benchmark(tau_max: float = 1.5, repeats: int = 3, acceleration: float = 0.2):
    scenario = get_scenario("fig1a")
    system = scenario.system_for(acceleration)
    wl = system.detectors[0].worldline
    t_max = wl.coordinate_time(tau_max)
    h = 1e-3
    times = np.array([t_max])
    ks, deltas = _lattice_samples(times, h)
    steps = int(ks[-1])
    low = _kernel_py.lower_system(system)

    backends = [("python", _kernel_py)]
    compiled = _load_compiled()
    if compiled is not None:
        backends.insert(0, ("compiled", compiled))

    print(f"system: {system.dim}-dimensional phase space, {steps} RK4 steps (h={h:g})")
    results = {}
    reference = None
    for name, backend in backends:
        best = math.inf
        out = None
        for _ in range(repeats):
            start = time.perf_counter()
            out = backend.integrate_rk4(low, h, ks, deltas)
            best = min(best, time.perf_counter() - start)
        results[name] = best
        if reference is None:
            reference = out
        else:
            diff = float(np.max(np.abs(out - reference)))
            print(f"max |S_python - S_compiled| = {diff:.3e}")
        print(f"{name:9s} best of {repeats}: {best:8.3f}s  ({steps / best:,.0f} steps/s)")
    if compiled is not None:
        print(f"speedup: {results['python'] / results['compiled']:.1f}x")
    else:
        print("compiled kernel not built; only the Python fallback was timed")
    return results


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tau", type=float, default=1.5, help="proper-time horizon")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)
    run_benchmark(tau_max=args.tau, repeats=args.repeats)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
