"""Short open tours through sampling targets.

Tours start at the agent's position, visit every target once, and do not
return. Construction is greedy nearest-neighbor; two_opt_improve then
applies 2-opt reversals until no move shortens the path.
"""

from dataclasses import dataclass

import numpy as np

from . import accel


@dataclass(frozen=True)
class Tour:
    start: np.ndarray       # (2,)
    waypoints: np.ndarray   # (m, 2), visit order
    length: float


def path_length(start, waypoints):
    waypoints = np.asarray(waypoints, dtype=float).reshape(-1, 2)
    if waypoints.shape[0] == 0:
        return 0.0
    full = np.vstack([np.asarray(start, dtype=float), waypoints])
    return float(np.linalg.norm(np.diff(full, axis=0), axis=1).sum())


def nearest_neighbor_tour(start, points):
    """Greedy tour: repeatedly visit the nearest unvisited point; distance
    ties go to the lowest input index."""
    start = np.asarray(start, dtype=float).ravel()
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    remaining = list(range(pts.shape[0]))
    order = []
    current = start
    while remaining:
        dists = np.linalg.norm(pts[remaining] - current, axis=1)
        k = int(np.argmin(dists))
        order.append(remaining.pop(k))
        current = pts[order[-1]]
    waypoints = pts[order] if order else np.empty((0, 2))
    return Tour(start, waypoints, path_length(start, waypoints))


def two_opt_improve(tour):
    """First-improvement 2-opt with lexicographic scan order; the start stays
    fixed and the path stays open. Never lengthens the tour."""
    if tour.waypoints.shape[0] < 3:
        return tour
    order = accel.two_opt_order(tour.start, tour.waypoints)
    waypoints = tour.waypoints[order]
    return Tour(tour.start, waypoints, path_length(tour.start, waypoints))
