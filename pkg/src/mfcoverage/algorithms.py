"""Coverage policies over an online GP estimate of the sensory density.

Three policies share one estimation backbone:

* stochastic sequencing: each iteration every agent flips a coin weighted by
  the normalized maximum posterior variance inside its cell, then either
  samples at that cell's argmax-variance point or drives to its estimated
  centroid;
* deterministic sequencing: epochs alternate a learning phase (acquisition
  points chosen by virtual sampling, visited along 2-opt tours) with a
  geometrically growing run of Lloyd iterations on the estimated density;
* known-density baseline: plain Lloyd iteration on the true density.

Voronoi partitions are always generated from the previous iteration's
estimated centroids (initially the start positions), and centroids are
estimated from the posterior mean clamped at zero.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from . import accel
from .geometry import (
    TeamConfiguration,
    argmax_variance_in_cell,
    lloyd_step,
    partition_centroids,
    voronoi_partition,
)
from .mfgp import MfgpModel, collapse_to_single_fidelity, MfgpHyper
from .planner import nearest_neighbor_tour, two_opt_improve

LEARN = "learn"
COVER = "cover"


class VirtualSamplingError(RuntimeError):
    """Virtual sampling exceeded its safety bound without hitting the target."""


@dataclass(frozen=True)
class AgentAction:
    kind: str              # LEARN or COVER
    target: np.ndarray     # (2,)


@dataclass
class StepOutcome:
    """What one policy step did: per-agent actions (one each per iteration;
    a learning phase lists one per visited waypoint), the real samples taken
    as (fidelity, location, value) triples, per-agent distance increments,
    and the positions afterwards."""

    phase: str             # "iteration" | "learning" | "coverage"
    actions: list          # per agent: list[AgentAction]
    samples: list          # (fidelity, (2,) ndarray, float)
    distance_delta: np.ndarray
    positions: np.ndarray


@dataclass(frozen=True)
class SmlcState:
    model: MfgpModel
    config: TeamConfiguration
    sites: np.ndarray      # previous estimated centroids; seeds the partition
    m0: float              # initial maximum posterior variance, fixed at t=0
    gamma: float = 1.0

    def __post_init__(self):
        if self.m0 <= 0:
            raise ValueError("m0 must be positive")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class DmlcState:
    model: MfgpModel
    config: TeamConfiguration
    sites: np.ndarray
    m0: float
    alpha: float
    beta: float
    first_epoch_len: int
    epoch: int = 1         # 1-based

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.beta <= 1:
            raise ValueError("beta must exceed 1")
        if self.first_epoch_len < 1:
            raise ValueError("first_epoch_len must be >= 1")
        if self.m0 <= 0:
            raise ValueError("m0 must be positive")


def initial_max_variance(model, grid):
    """Maximum posterior variance over the grid; pins the m0 normalizer."""
    _, variances = model.posterior(grid.points)
    return float(variances.max())


def learn_probability(max_cell_var, m0, gamma):
    """Probability of a learning step: (M / m0)^gamma clamped into [0, 1]."""
    u = max(max_cell_var, 0.0) / m0
    return min(max(u ** gamma, 0.0), 1.0)


def estimated_density(model, grid):
    """Posterior mean over the grid, clamped at 0 for use as a density."""
    means, variances = model.posterior(grid.points)
    return np.maximum(means, 0.0), variances


def smlc_iteration(state, grid, sampler, rng):
    """One stochastic learn-or-cover iteration for every agent.

    All agents decide from the iteration-start model; any samples collected
    are folded into the model at the end of the iteration. Returns the new
    state and the step outcome.
    """
    n = state.config.n_agents
    partition = voronoi_partition(grid, state.sites)
    density, variances = estimated_density(state.model, grid)
    _, centroids = partition_centroids(grid, partition, density, state.config.positions)

    learn_points = np.empty((n, 2))
    probs = np.empty(n)
    for i in range(n):
        idx = np.nonzero(partition == i)[0]
        if idx.size == 0:
            learn_points[i] = state.config.positions[i]
            _, max_var = state.model.posterior_at(state.config.positions[i])
        else:
            j = idx[int(np.argmax(variances[idx]))]
            learn_points[i] = grid.points[j]
            max_var = float(variances[idx].max())
        probs[i] = learn_probability(max_var, state.m0, state.gamma)

    draws = rng.random(n)
    new_positions = np.empty((n, 2))
    actions = []
    samples = []
    for i in range(n):
        if draws[i] < probs[i]:
            x = learn_points[i]
            y = float(sampler(x, rng))
            samples.append((state.model.hyper.s, x.copy(), y))
            new_positions[i] = x
            actions.append([AgentAction(LEARN, x.copy())])
        else:
            new_positions[i] = centroids[i]
            actions.append([AgentAction(COVER, centroids[i].copy())])

    new_config = state.config.moved_to(new_positions)
    model = state.model
    for fidelity, x, y in samples:
        model = model.add_observation(fidelity, x, y)
    outcome = StepOutcome(
        "iteration", actions, samples,
        new_config.travel - state.config.travel, new_positions.copy(),
    )
    new_state = replace(state, model=model, config=new_config, sites=centroids)
    return new_state, outcome


def dmlc_virtual_sampling(model, grid, target):
    """Acquisition points that provably push the maximum posterior variance
    at or below ``target``.

    Repeatedly virtually samples the grid's argmax-variance point (posterior
    variance depends on sample locations only, so a placeholder value of 0
    suffices) until the maximum drops to the target. The input model is not
    modified and no virtual value survives. Raises VirtualSamplingError past
    10 points per grid cell, which finite-termination guarantees make
    unreachable in practice.
    """
    if target <= 0:
        raise ValueError("target variance must be positive")
    cap = grid.n_points * 10
    work = model
    acquired = []
    while True:
        _, variances = work.posterior(grid.points)
        if float(variances.max()) <= target:
            break
        if len(acquired) >= cap:
            raise VirtualSamplingError(
                f"variance target {target:.3e} not reached after {cap} virtual samples")
        x = grid.points[int(np.argmax(variances))]
        acquired.append(x.copy())
        work = work.add_observation(model.hyper.s, x, 0.0)
    return np.asarray(acquired).reshape(-1, 2)


def coverage_phase_length(first_epoch_len, beta, epoch):
    """Coverage iterations in the given 1-based epoch: ceil(n0 * beta^(e-1))."""
    return int(math.ceil(first_epoch_len * beta ** (epoch - 1)))


def dmlc_epoch(state, grid, sampler, rng, max_coverage_iters=None):
    """One full epoch: plan and execute the learning phase, then run the
    coverage phase.

    Acquisition points are split by Voronoi ownership of the current sites;
    each agent tours its share (nearest-neighbor order improved by 2-opt),
    accruing travel segment by segment, and may idle on an empty tour. After
    all real samples are folded in, Lloyd iterations run on the estimated
    density for ceil(n0 * beta^(e-1)) steps (optionally capped). Returns the
    next-epoch state and one outcome per phase step.
    """
    n = state.config.n_agents
    epoch = state.epoch
    target = state.alpha ** epoch * state.m0
    acquisition = dmlc_virtual_sampling(state.model, grid, target)
    outcomes = []

    positions = state.config.positions.copy()
    delta = np.zeros(n)
    actions = [[] for _ in range(n)]
    samples = []
    if acquisition.shape[0] > 0:
        owner = voronoi_partition_of_points(acquisition, state.sites)
        for i in range(n):
            mine = acquisition[owner == i]
            if mine.shape[0] == 0:
                continue
            tour = two_opt_improve(nearest_neighbor_tour(positions[i], mine))
            for waypoint in tour.waypoints:
                y = float(sampler(waypoint, rng))
                samples.append((state.model.hyper.s, waypoint.copy(), y))
                delta[i] += float(np.linalg.norm(waypoint - positions[i]))
                positions[i] = waypoint
                actions[i].append(AgentAction(LEARN, waypoint.copy()))
    config = TeamConfiguration(positions.copy(), state.config.travel + delta)
    model = state.model
    for fidelity, x, y in samples:
        model = model.add_observation(fidelity, x, y)
    outcomes.append(StepOutcome("learning", actions, samples, delta, positions.copy()))

    n_cov = coverage_phase_length(state.first_epoch_len, state.beta, epoch)
    if max_coverage_iters is not None:
        n_cov = min(n_cov, max_coverage_iters)
    density, _ = estimated_density(model, grid)
    sites = state.sites
    for _ in range(n_cov):
        partition = voronoi_partition(grid, sites)
        _, centroids = partition_centroids(grid, partition, density, config.positions)
        step = centroids - config.positions
        config = config.moved_to(centroids)
        sites = centroids
        outcomes.append(StepOutcome(
            "coverage",
            [[AgentAction(COVER, centroids[i].copy())] for i in range(n)],
            [], np.linalg.norm(step, axis=1), centroids.copy(),
        ))

    new_state = replace(state, model=model, config=config, sites=sites, epoch=epoch + 1)
    return new_state, outcomes


def voronoi_partition_of_points(points, sites):
    """Nearest-site owner for arbitrary points (same tie-break as the grid)."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    return accel.nearest_site(points, sites)


def known_density_baseline(config, grid, true_density, iterations):
    """Plain Lloyd iteration on the true density. Returns the trajectory of
    configurations, index 0 being the start."""
    trajectory = [config]
    for _ in range(iterations):
        config = lloyd_step(grid, config, true_density)
        trajectory.append(config)
    return trajectory


def single_fidelity_model(datasets, kernel, noise_var, mean=0.0, bounds=None):
    """Single-fidelity variant of the estimation backbone: every dataset is
    collapsed into one and modeled by a plain GP, so lower-fidelity values
    are treated as if they were ground-truth observations."""
    collapsed = collapse_to_single_fidelity(datasets)
    hyper = MfgpHyper((kernel,), (), (noise_var,), (mean,))
    return MfgpModel(hyper, [collapsed], bounds=bounds)
