"""Hot numeric loops, compiled with numba when available.

Every kernel exists in two interchangeable flavors: a ``*_numpy`` reference
implementation and (when numba imports and the env flag allows it) an
``@njit``-compiled twin. The active set is chosen once at import time; set
``MF_COVERAGE_NUMBA=0`` (also accepts false/off/no) to force the NumPy path.
``USING_NUMBA`` records which path won. ``benchmarks/benchmark_numba.py``
times the two paths against each other.
"""

import os

import numpy as np

_TWO_OPT_MIN_GAIN = 1e-12


def _numba_requested():
    flag = os.environ.get("MF_COVERAGE_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "off", "no")


# ---------------------------------------------------------------------------
# NumPy reference implementations
# ---------------------------------------------------------------------------

def sqexp_cross_numpy(xa, xb, variance, lengthscale_sq):
    """Squared-exponential kernel matrix, shape (len(xa), len(xb))."""
    d2 = ((xa[:, None, :] - xb[None, :, :]) ** 2).sum(axis=2)
    return variance * np.exp(-d2 / (2.0 * lengthscale_sq))


def nearest_site_numpy(points, sites):
    """Index of the nearest site for each point; ties go to the lowest index."""
    d2 = ((points[:, None, :] - sites[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1).astype(np.int64)


def cell_moments_numpy(points, labels, density, n_cells):
    """Per-cell accumulators: density mass, density-weighted and plain
    coordinate sums, and point counts."""
    mass = np.bincount(labels, weights=density, minlength=n_cells)
    wx = np.bincount(labels, weights=density * points[:, 0], minlength=n_cells)
    wy = np.bincount(labels, weights=density * points[:, 1], minlength=n_cells)
    sx = np.bincount(labels, weights=points[:, 0], minlength=n_cells)
    sy = np.bincount(labels, weights=points[:, 1], minlength=n_cells)
    count = np.bincount(labels, minlength=n_cells)
    return mass, wx, wy, sx, sy, count.astype(np.int64)


def weighted_sqdist_sum_numpy(points, labels, sites, density):
    """sum_j density_j * ||points_j - sites[labels_j]||^2 (no quadrature weight)."""
    diff = points - sites[labels]
    return float(((diff ** 2).sum(axis=1) * density).sum())


def two_opt_order_numpy(start, waypoints):
    """2-opt pass over an open path anchored at ``start``.

    Scans (i, j) pairs lexicographically, accepts the first reversal that
    shortens the path by more than a fixed threshold, and restarts until no
    move improves. Returns the visit order as indices into ``waypoints``.
    """
    m = waypoints.shape[0]
    order = np.arange(m, dtype=np.int64)
    if m < 3:
        return order

    def seg(a, b):
        dx = a[0] - b[0]
        dy = a[1] - b[1]
        return (dx * dx + dy * dy) ** 0.5

    improved = True
    while improved:
        improved = False
        for i in range(m - 1):
            prev = start if i == 0 else waypoints[order[i - 1]]
            for j in range(i + 1, m):
                a = waypoints[order[i]]
                b = waypoints[order[j]]
                delta = seg(prev, b) - seg(prev, a)
                if j < m - 1:
                    nxt = waypoints[order[j + 1]]
                    delta += seg(a, nxt) - seg(b, nxt)
                if delta < -_TWO_OPT_MIN_GAIN:
                    order[i:j + 1] = order[i:j + 1][::-1]
                    improved = True
                    break
            if improved:
                break
    return order


# ---------------------------------------------------------------------------
# numba twins
# ---------------------------------------------------------------------------

USING_NUMBA = False
if _numba_requested():
    try:
        from numba import njit
        USING_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass

if USING_NUMBA:

    @njit(cache=True)
    def sqexp_cross_numba(xa, xb, variance, lengthscale_sq):
        n, m = xa.shape[0], xb.shape[0]
        out = np.empty((n, m))
        inv = 1.0 / (2.0 * lengthscale_sq)
        for i in range(n):
            for j in range(m):
                dx = xa[i, 0] - xb[j, 0]
                dy = xa[i, 1] - xb[j, 1]
                out[i, j] = variance * np.exp(-(dx * dx + dy * dy) * inv)
        return out

    @njit(cache=True)
    def nearest_site_numba(points, sites):
        n, k = points.shape[0], sites.shape[0]
        labels = np.empty(n, dtype=np.int64)
        for i in range(n):
            best = np.inf
            arg = 0
            for j in range(k):
                dx = points[i, 0] - sites[j, 0]
                dy = points[i, 1] - sites[j, 1]
                d2 = dx * dx + dy * dy
                if d2 < best:
                    best = d2
                    arg = j
            labels[i] = arg
        return labels

    @njit(cache=True)
    def cell_moments_numba(points, labels, density, n_cells):
        mass = np.zeros(n_cells)
        wx = np.zeros(n_cells)
        wy = np.zeros(n_cells)
        sx = np.zeros(n_cells)
        sy = np.zeros(n_cells)
        count = np.zeros(n_cells, dtype=np.int64)
        for i in range(points.shape[0]):
            c = labels[i]
            mass[c] += density[i]
            wx[c] += density[i] * points[i, 0]
            wy[c] += density[i] * points[i, 1]
            sx[c] += points[i, 0]
            sy[c] += points[i, 1]
            count[c] += 1
        return mass, wx, wy, sx, sy, count

    @njit(cache=True)
    def weighted_sqdist_sum_numba(points, labels, sites, density):
        total = 0.0
        for i in range(points.shape[0]):
            c = labels[i]
            dx = points[i, 0] - sites[c, 0]
            dy = points[i, 1] - sites[c, 1]
            total += density[i] * (dx * dx + dy * dy)
        return total

    @njit(cache=True)
    def two_opt_order_numba(start, waypoints):
        m = waypoints.shape[0]
        order = np.arange(m, dtype=np.int64)
        if m < 3:
            return order
        improved = True
        while improved:
            improved = False
            for i in range(m - 1):
                if i == 0:
                    px, py = start[0], start[1]
                else:
                    px, py = waypoints[order[i - 1], 0], waypoints[order[i - 1], 1]
                for j in range(i + 1, m):
                    ax, ay = waypoints[order[i], 0], waypoints[order[i], 1]
                    bx, by = waypoints[order[j], 0], waypoints[order[j], 1]
                    delta = ((px - bx) ** 2 + (py - by) ** 2) ** 0.5 \
                        - ((px - ax) ** 2 + (py - ay) ** 2) ** 0.5
                    if j < m - 1:
                        nx, ny = waypoints[order[j + 1], 0], waypoints[order[j + 1], 1]
                        delta += ((ax - nx) ** 2 + (ay - ny) ** 2) ** 0.5 \
                            - ((bx - nx) ** 2 + (by - ny) ** 2) ** 0.5
                    if delta < -1e-12:
                        lo, hi = i, j
                        while lo < hi:
                            tmp = order[lo]
                            order[lo] = order[hi]
                            order[hi] = tmp
                            lo += 1
                            hi -= 1
                        improved = True
                        break
                if improved:
                    break
        return order

    sqexp_cross = sqexp_cross_numba
    nearest_site = nearest_site_numba
    cell_moments = cell_moments_numba
    weighted_sqdist_sum = weighted_sqdist_sum_numba
    two_opt_order = two_opt_order_numba
else:
    sqexp_cross = sqexp_cross_numpy
    nearest_site = nearest_site_numpy
    cell_moments = cell_moments_numpy
    weighted_sqdist_sum = weighted_sqdist_sum_numpy
    two_opt_order = two_opt_order_numpy
