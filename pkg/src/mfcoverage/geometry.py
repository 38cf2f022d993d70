"""Discretized planar environment and coverage-control primitives.

The domain is an axis-aligned rectangle discretized into an ``nx * ny``
lattice of cell centers; every integral is a midpoint Riemann sum with the
uniform weight ``area / (nx * ny)``. Density and variance fields are flat
float arrays of length ``nx * ny`` aligned with ``GridEnvironment.points``
(row-major, x fastest). Agents live at arbitrary continuous positions; only
fields live on the grid.
"""

from dataclasses import dataclass

import numpy as np

from . import accel

MASS_EPS = 1e-9


class EmptyCellError(ValueError):
    """A cell contains no grid points but the operation needs one."""


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle; defaults to the unit square."""

    xmin: float = 0.0
    xmax: float = 1.0
    ymin: float = 0.0
    ymax: float = 1.0

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def area(self):
        return (self.xmax - self.xmin) * (self.ymax - self.ymin)

    def contains(self, xy, atol=1e-12):
        xy = np.asarray(xy, dtype=float)
        x, y = xy[..., 0], xy[..., 1]
        return ((x >= self.xmin - atol) & (x <= self.xmax + atol)
                & (y >= self.ymin - atol) & (y <= self.ymax + atol))


@dataclass(frozen=True)
class DensitySpec:
    """Isotropic Gaussian-bump density: peak * exp(-||x - center||^2 / (2 l^2))."""

    variance: float          # peak value (squared amplitude)
    lengthscale_sq: float    # bump width l^2
    center: tuple

    def __post_init__(self):
        if self.variance <= 0 or self.lengthscale_sq <= 0:
            raise ValueError("density variance and lengthscale_sq must be positive")


class GridEnvironment:
    """Cell-centered lattice over a rectangle with midpoint quadrature weight.

    ``points[j]`` is the center of cell j, enumerated row-major with x
    varying fastest; ``cell_weight`` is the area of one cell, so
    ``sum(f(points) * cell_weight)`` approximates the integral of f.
    """

    def __init__(self, nx=21, ny=21, bounds=None):
        if nx < 2 or ny < 2:
            raise ValueError("grid needs at least 2 points per axis")
        self.nx = int(nx)
        self.ny = int(ny)
        self.bounds = bounds if bounds is not None else Rect()
        dx = (self.bounds.xmax - self.bounds.xmin) / self.nx
        dy = (self.bounds.ymax - self.bounds.ymin) / self.ny
        xs = self.bounds.xmin + (np.arange(self.nx) + 0.5) * dx
        ys = self.bounds.ymin + (np.arange(self.ny) + 0.5) * dy
        gx, gy = np.meshgrid(xs, ys)
        self.points = np.column_stack([gx.ravel(), gy.ravel()])
        self.cell_weight = self.bounds.area / (self.nx * self.ny)

    @property
    def n_points(self):
        return self.nx * self.ny

    def __repr__(self):
        return f"GridEnvironment(nx={self.nx}, ny={self.ny}, bounds={self.bounds})"


@dataclass(frozen=True)
class TeamConfiguration:
    """Agent positions plus accumulated Euclidean travel per agent."""

    positions: np.ndarray   # (N, 2)
    travel: np.ndarray      # (N,)

    @classmethod
    def at(cls, positions):
        positions = np.atleast_2d(np.asarray(positions, dtype=float))
        return cls(positions, np.zeros(positions.shape[0]))

    @property
    def n_agents(self):
        return self.positions.shape[0]

    def moved_to(self, new_positions):
        new_positions = np.asarray(new_positions, dtype=float)
        step = np.linalg.norm(new_positions - self.positions, axis=1)
        return TeamConfiguration(new_positions.copy(), self.travel + step)


def voronoi_partition(grid, config):
    """Nearest-site label per grid point; ties go to the lowest agent index.

    ``config`` may be a TeamConfiguration or a bare (N, 2) site array.
    """
    sites = config.positions if isinstance(config, TeamConfiguration) else config
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    if sites.shape[0] < 1:
        raise ValueError("need at least one site")
    return accel.nearest_site(grid.points, sites)


def mass_and_centroid(grid, partition, cell_index, density, agent_position=None):
    """Density mass of one cell and its density-weighted centroid.

    Near-zero mass falls back to the unweighted mean of the cell's points;
    an empty cell falls back to ``agent_position`` (raises EmptyCellError
    when no fallback is given).
    """
    mask = partition == cell_index
    if not mask.any():
        if agent_position is None:
            raise EmptyCellError(f"cell {cell_index} owns no grid points")
        return 0.0, np.asarray(agent_position, dtype=float).copy()
    pts = grid.points[mask]
    dens = np.asarray(density, dtype=float)[mask]
    mass = float(dens.sum() * grid.cell_weight)
    if mass > MASS_EPS:
        centroid = (pts * dens[:, None]).sum(axis=0) * grid.cell_weight / mass
    else:
        centroid = pts.mean(axis=0)
    return mass, centroid


def partition_centroids(grid, partition, density, fallback_positions):
    """Vectorized masses and centroids for all cells, with the same
    zero-mass / empty-cell fallbacks as mass_and_centroid."""
    fallback_positions = np.atleast_2d(np.asarray(fallback_positions, dtype=float))
    n_cells = fallback_positions.shape[0]
    dens = np.asarray(density, dtype=float)
    mass, wx, wy, sx, sy, count = accel.cell_moments(
        grid.points, partition, dens, n_cells)
    mass = mass * grid.cell_weight
    centroids = fallback_positions.copy()
    occupied = count > 0
    weighted = occupied & (mass > MASS_EPS)
    uniform = occupied & ~weighted
    centroids[weighted, 0] = wx[weighted] * grid.cell_weight / mass[weighted]
    centroids[weighted, 1] = wy[weighted] * grid.cell_weight / mass[weighted]
    centroids[uniform, 0] = sx[uniform] / count[uniform]
    centroids[uniform, 1] = sy[uniform] / count[uniform]
    return mass, centroids


def lloyd_step(grid, config, density):
    """One Lloyd update: move every agent to the centroid of its Voronoi cell."""
    partition = voronoi_partition(grid, config)
    _, centroids = partition_centroids(grid, partition, density, config.positions)
    return config.moved_to(centroids)


def coverage_loss(grid, config, partition, density):
    """Density-weighted sum of squared distances from grid points to their
    assigned agent (midpoint quadrature)."""
    positions = config.positions if isinstance(config, TeamConfiguration) else config
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    return accel.weighted_sqdist_sum(
        grid.points, partition, positions, np.asarray(density, dtype=float)
    ) * grid.cell_weight


def instantaneous_regret(grid, config, true_density):
    """Gap between the current coverage loss and the loss after snapping each
    agent to the true centroid of its current cell. Nonnegative up to
    quadrature roundoff; zero at a centroidal configuration."""
    partition = voronoi_partition(grid, config)
    loss_now = coverage_loss(grid, config, partition, true_density)
    _, centroids = partition_centroids(grid, partition, true_density, config.positions)
    loss_centroidal = coverage_loss(grid, centroids, partition, true_density)
    return loss_now - loss_centroidal


def argmax_variance_in_cell(grid, partition, cell_index, variance_field):
    """Grid point of maximal variance inside one cell; ties go to the lowest
    grid index. Raises EmptyCellError for a cell with no grid points."""
    idx = np.nonzero(partition == cell_index)[0]
    if idx.size == 0:
        raise EmptyCellError(f"cell {cell_index} owns no grid points")
    j = idx[int(np.argmax(np.asarray(variance_field)[idx]))]
    return grid.points[j].copy()


def eval_test_density(spec, grid):
    """Evaluate a DensitySpec on all grid points."""
    center = np.asarray(spec.center, dtype=float).reshape(1, 2)
    return accel.sqexp_cross(
        grid.points, center, spec.variance, spec.lengthscale_sq).ravel()


def eval_density_at(spec, xy):
    """Evaluate a DensitySpec at one continuous point."""
    xy = np.asarray(xy, dtype=float)
    d2 = float(((xy - np.asarray(spec.center, dtype=float)) ** 2).sum())
    return spec.variance * float(np.exp(-d2 / (2.0 * spec.lengthscale_sq)))
