"""Timing comparison of the numba-compiled hot kernels vs their NumPy
references, on workloads shaped like a real run (21x21 grid, a few agents,
tours of a few dozen waypoints).

Run:

    python benchmarks/benchmark_numba.py

If numba is unavailable (or MF_COVERAGE_NUMBA=0), only the NumPy path is
timed and a note is printed.
"""

import statistics
import time

import numpy as np

from mfcoverage import accel


def make_workloads(seed=42):
    rng = np.random.default_rng(seed)
    grid_pts = np.stack(np.meshgrid(
        (np.arange(21) + 0.5) / 21, (np.arange(21) + 0.5) / 21), -1).reshape(-1, 2)
    samples = rng.uniform(0, 1, (120, 2))
    sites = rng.uniform(0, 1, (4, 2))
    labels = accel.nearest_site_numpy(grid_pts, sites)
    density = rng.uniform(0, 10, grid_pts.shape[0])
    tour_start = rng.uniform(0, 1, 2)
    tour_pts = rng.uniform(0, 1, (30, 2))
    return {
        "sqexp_cross 441x120": (
            lambda f: f(grid_pts, samples, 10.0, 0.03),
            accel.sqexp_cross_numpy,
            getattr(accel, "sqexp_cross_numba", None)),
        "nearest_site 441x4": (
            lambda f: f(grid_pts, sites),
            accel.nearest_site_numpy,
            getattr(accel, "nearest_site_numba", None)),
        "cell_moments 441": (
            lambda f: f(grid_pts, labels, density, 4),
            accel.cell_moments_numpy,
            getattr(accel, "cell_moments_numba", None)),
        "weighted_sqdist 441": (
            lambda f: f(grid_pts, labels, sites, density),
            accel.weighted_sqdist_sum_numpy,
            getattr(accel, "weighted_sqdist_sum_numba", None)),
        "two_opt 30 pts": (
            lambda f: f(tour_start, tour_pts),
            accel.two_opt_order_numpy,
            getattr(accel, "two_opt_order_numba", None)),
    }


def time_call(call, impl, repeats=200):
    durations = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        call(impl)
        durations.append(time.perf_counter() - t0)
    return statistics.mean(durations), statistics.pstdev(durations)


def as_arrays(result):
    if isinstance(result, tuple):
        return [np.asarray(r) for r in result]
    return [np.asarray(result)]


def main():
    workloads = make_workloads()
    have_numba = accel.USING_NUMBA
    if not have_numba:
        print("[info] numba path inactive (not installed or MF_COVERAGE_NUMBA=0); "
              "timing NumPy only.")
    else:
        # one unmeasured pass per kernel to absorb JIT compilation
        for call, _, numba_impl in workloads.values():
            call(numba_impl)

    header = f"{'kernel':24s} {'numpy (us)':>12s} {'numba (us)':>12s} {'speedup':>8s}  match"
    print(header)
    print("-" * len(header))
    for name, (call, np_impl, nb_impl) in workloads.items():
        np_mean, _ = time_call(call, np_impl)
        row = f"{name:24s} {np_mean * 1e6:12.1f}"
        if have_numba:
            nb_mean, _ = time_call(call, nb_impl)
            agree = all(
                np.allclose(a, b, rtol=1e-12, atol=1e-12)
                for a, b in zip(as_arrays(call(np_impl)), as_arrays(call(nb_impl))))
            row += f" {nb_mean * 1e6:12.1f} {np_mean / nb_mean:7.1f}x  {agree}"
        else:
            row += f" {'-':>12s} {'-':>8s}  -"
        print(row)


if __name__ == "__main__":
    main()
