"""Experiment configuration, seeded batch execution, and metrics persistence.

A run is fully determined by (config, master seed, run index): per-run RNG
streams are spawned from a SeedSequence keyed on the run index, so runs are
independent, order-insensitive, and reproducible byte-for-byte. Metrics are
one row per iteration; a batch writes one long-format CSV of all runs plus
one aggregate CSV of per-iteration means and standard deviations.
"""

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from . import algorithms, geometry, mfgp

SCHEMA_VERSION = 1
ALGORITHMS = ("smlc", "dmlc", "baseline")
FIDELITY_MODES = ("multi", "single")
METRIC_COLUMNS = ("iteration", "regret", "cum_regret", "mse", "max_var",
                  "mean_distance", "run_id", "algorithm", "fidelity_mode")
AGG_METRICS = ("regret", "cum_regret", "mse", "max_var", "mean_distance")


class ConfigError(ValueError):
    """Configuration file failed validation."""


class MetricsParseError(ValueError):
    """A metrics CSV could not be parsed."""


class BatchRunError(RuntimeError):
    """One or more runs of a batch failed."""


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    nx: int = 21
    ny: int = 21
    bounds: tuple = (0.0, 1.0, 0.0, 1.0)   # xmin, xmax, ymin, ymax

    def make(self):
        xmin, xmax, ymin, ymax = self.bounds
        return geometry.GridEnvironment(self.nx, self.ny, geometry.Rect(xmin, xmax, ymin, ymax))


@dataclass(frozen=True)
class LatticeSeedSpec:
    """Pre-deployment low-fidelity samples on a regular lattice spanning the
    domain, endpoints included."""

    nx: int = 5
    ny: int = 5
    noise_var: float = 1.0


@dataclass(frozen=True)
class SmlcParams:
    gamma: float = 1.0


@dataclass(frozen=True)
class DmlcParams:
    alpha: float = 1.0 / math.sqrt(2.0)
    beta: float = 2.0
    first_epoch_len: int = 4


@dataclass(frozen=True)
class PinnedHyper:
    """Resolved hyperparameters for both fidelity modes."""

    multi: mfgp.MfgpHyper
    single_kernel: mfgp.KernelParams
    single_noise_var: float


@dataclass(frozen=True)
class HyperSource:
    mode: str = "pinned"            # "pinned" | "fit"
    pinned: PinnedHyper = None
    training_samples: int = 100     # used when mode == "fit"


@dataclass(frozen=True)
class ExperimentConfig:
    grid: GridSpec = GridSpec()
    agents: int = 4
    iterations: int = 60
    algorithm: str = "smlc"
    fidelity_mode: str = "multi"
    low_density: geometry.DensitySpec = geometry.DensitySpec(5.0, 0.2, (0.5, 0.5))
    high_density: geometry.DensitySpec = geometry.DensitySpec(10.0, 0.05, (0.75, 0.75))
    low_seed: LatticeSeedSpec = LatticeSeedSpec()
    high_noise_var: float = 1.0
    smlc: SmlcParams = SmlcParams()
    dmlc: DmlcParams = DmlcParams()
    hyper: HyperSource = HyperSource()
    runs: int = 50
    master_seed: int = 2024
    schema_version: int = SCHEMA_VERSION

    def validate(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version}")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.agents < 1:
            raise ConfigError("agents must be >= 1")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}")
        if self.fidelity_mode not in FIDELITY_MODES:
            raise ConfigError(f"fidelity_mode must be one of {FIDELITY_MODES}")
        if self.high_noise_var < 0 or self.low_seed.noise_var < 0:
            raise ConfigError("noise variances must be >= 0")
        if self.smlc.gamma <= 0:
            raise ConfigError("smlc.gamma must be > 0")
        if not 0 < self.dmlc.alpha < 1:
            raise ConfigError("dmlc.alpha must lie in (0, 1)")
        if self.dmlc.beta <= 1:
            raise ConfigError("dmlc.beta must be > 1")
        if self.dmlc.first_epoch_len < 1:
            raise ConfigError("dmlc.first_epoch_len must be >= 1")
        if self.hyper.mode not in ("pinned", "fit"):
            raise ConfigError("hyper.mode must be 'pinned' or 'fit'")
        if self.hyper.mode == "pinned" and self.hyper.pinned is None:
            raise ConfigError("hyper.mode 'pinned' requires pinned values")
        if self.hyper.mode == "fit" and self.hyper.training_samples < 4:
            raise ConfigError("hyper.training_samples must be >= 4")
        try:
            self.grid.make()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self


def _kernel_to_dict(k):
    return {"variance": k.variance, "lengthscale_sq": k.lengthscale_sq}


def _kernel_from_dict(d):
    return mfgp.KernelParams(float(d["variance"]), float(d["lengthscale_sq"]))


def _density_to_dict(d):
    return {"variance": d.variance, "lengthscale_sq": d.lengthscale_sq,
            "center": list(d.center)}


def _density_from_dict(d):
    return geometry.DensitySpec(float(d["variance"]), float(d["lengthscale_sq"]),
                                tuple(float(c) for c in d["center"]))


def _pinned_to_dict(p):
    return {
        "multi": {
            "kernels": [_kernel_to_dict(k) for k in p.multi.kernels],
            "rho": list(p.multi.rho),
            "noise_vars": list(p.multi.noise_vars),
            "means": list(p.multi.means),
        },
        "single": {
            "kernel": _kernel_to_dict(p.single_kernel),
            "noise_var": p.single_noise_var,
        },
    }


def _pinned_from_dict(d):
    m = d["multi"]
    multi = mfgp.MfgpHyper(
        tuple(_kernel_from_dict(k) for k in m["kernels"]),
        tuple(float(r) for r in m["rho"]),
        tuple(float(v) for v in m["noise_vars"]),
        tuple(float(x) for x in m.get("means", [0.0] * len(m["kernels"]))),
    )
    s = d["single"]
    return PinnedHyper(multi, _kernel_from_dict(s["kernel"]), float(s["noise_var"]))


def config_to_dict(config):
    out = {
        "schema_version": config.schema_version,
        "grid": {"nx": config.grid.nx, "ny": config.grid.ny,
                 "bounds": list(config.grid.bounds)},
        "agents": config.agents,
        "iterations": config.iterations,
        "algorithm": config.algorithm,
        "fidelity_mode": config.fidelity_mode,
        "low_density": _density_to_dict(config.low_density),
        "high_density": _density_to_dict(config.high_density),
        "low_seed": {"nx": config.low_seed.nx, "ny": config.low_seed.ny,
                     "noise_var": config.low_seed.noise_var},
        "high_noise_var": config.high_noise_var,
        "smlc": {"gamma": config.smlc.gamma},
        "dmlc": {"alpha": config.dmlc.alpha, "beta": config.dmlc.beta,
                 "first_epoch_len": config.dmlc.first_epoch_len},
        "hyper": {"mode": config.hyper.mode,
                  "training_samples": config.hyper.training_samples},
        "runs": config.runs,
        "master_seed": config.master_seed,
    }
    if config.hyper.pinned is not None:
        out["hyper"]["pinned"] = _pinned_to_dict(config.hyper.pinned)
    return out


def config_from_dict(data):
    try:
        hyper_d = data.get("hyper", {})
        pinned = _pinned_from_dict(hyper_d["pinned"]) if "pinned" in hyper_d else None
        grid_d = data.get("grid", {})
        config = ExperimentConfig(
            schema_version=int(data.get("schema_version", SCHEMA_VERSION)),
            grid=GridSpec(int(grid_d.get("nx", 21)), int(grid_d.get("ny", 21)),
                          tuple(float(b) for b in grid_d.get("bounds", (0, 1, 0, 1)))),
            agents=int(data.get("agents", 4)),
            iterations=int(data.get("iterations", 60)),
            algorithm=str(data.get("algorithm", "smlc")).lower(),
            fidelity_mode=str(data.get("fidelity_mode", "multi")).lower(),
            low_density=_density_from_dict(data["low_density"]) if "low_density" in data
            else ExperimentConfig.low_density,
            high_density=_density_from_dict(data["high_density"]) if "high_density" in data
            else ExperimentConfig.high_density,
            low_seed=LatticeSeedSpec(
                int(data.get("low_seed", {}).get("nx", 5)),
                int(data.get("low_seed", {}).get("ny", 5)),
                float(data.get("low_seed", {}).get("noise_var", 1.0))),
            high_noise_var=float(data.get("high_noise_var", 1.0)),
            smlc=SmlcParams(float(data.get("smlc", {}).get("gamma", 1.0))),
            dmlc=DmlcParams(
                float(data.get("dmlc", {}).get("alpha", 1.0 / math.sqrt(2.0))),
                float(data.get("dmlc", {}).get("beta", 2.0)),
                int(data.get("dmlc", {}).get("first_epoch_len", 4))),
            hyper=HyperSource(str(hyper_d.get("mode", "pinned")), pinned,
                              int(hyper_d.get("training_samples", 100))),
            runs=int(data.get("runs", 50)),
            master_seed=int(data.get("master_seed", 2024)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    return config.validate()


def save_config(config, path):
    with open(path, "w") as handle:
        json.dump(config_to_dict(config), handle, indent=2)
        handle.write("\n")


def load_config(path):
    try:
        with open(path) as handle:
            data = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(data)


def default_config():
    """The shipped default configuration (packaged JSON)."""
    text = resources.files("mfcoverage").joinpath("data/default_config.json").read_text()
    return config_from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class MetricsRecord:
    """Per-iteration metric traces for one run."""

    run_id: int
    algorithm: str
    fidelity_mode: str      # "multi" | "single" | "none" (baseline)
    iteration: np.ndarray
    regret: np.ndarray
    cum_regret: np.ndarray
    mse: np.ndarray
    max_var: np.ndarray
    mean_distance: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, MetricsRecord):
            return NotImplemented
        return (self.run_id == other.run_id
                and self.algorithm == other.algorithm
                and self.fidelity_mode == other.fidelity_mode
                and all(np.array_equal(getattr(self, f), getattr(other, f), equal_nan=True)
                        for f in ("iteration", "regret", "cum_regret", "mse",
                                  "max_var", "mean_distance")))


@dataclass
class AggregateMetrics:
    """Per-iteration mean and std across the runs of one batch."""

    algorithm: str
    fidelity_mode: str
    runs: int
    iteration: np.ndarray
    mean: dict              # metric name -> array
    std: dict


def aggregate_metrics(records):
    if not records:
        raise ValueError("cannot aggregate an empty batch")
    records = sorted(records, key=lambda r: r.run_id)
    first = records[0]
    iteration = first.iteration
    for record in records[1:]:
        if not np.array_equal(record.iteration, iteration):
            raise ValueError("records disagree on iteration axis")
    mean, std = {}, {}
    for name in AGG_METRICS:
        stacked = np.vstack([getattr(r, name) for r in records])
        # centering on the first run keeps the mean of R identical runs
        # bit-exact (sum(3x)/3 alone can be off by one ulp)
        centered = stacked - stacked[0]
        mean[name] = stacked[0] + centered.mean(axis=0)
        std[name] = centered.std(axis=0)
    return AggregateMetrics(first.algorithm, first.fidelity_mode, len(records),
                            iteration.copy(), mean, std)


def _fmt(value):
    return repr(float(value))


def write_metrics(records, path, master_seed=None):
    """Long-format CSV, one row per (run, iteration); floats round-trip
    exactly via repr. A leading comment line logs the master seed."""
    with open(path, "w") as handle:
        if master_seed is not None:
            handle.write(f"# master_seed={master_seed}\n")
        handle.write(",".join(METRIC_COLUMNS) + "\n")
        for record in records:
            for k in range(record.iteration.shape[0]):
                handle.write(",".join([
                    str(int(record.iteration[k])),
                    _fmt(record.regret[k]),
                    _fmt(record.cum_regret[k]),
                    _fmt(record.mse[k]),
                    _fmt(record.max_var[k]),
                    _fmt(record.mean_distance[k]),
                    str(record.run_id),
                    record.algorithm,
                    record.fidelity_mode,
                ]) + "\n")


def read_metrics(path):
    """Inverse of write_metrics; raises MetricsParseError naming the line."""
    rows = {}
    order = []
    with open(path) as handle:
        header = None
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = tuple(line.split(","))
                if header != METRIC_COLUMNS:
                    raise MetricsParseError(f"{path}:{lineno}: unexpected header {header}")
                continue
            parts = line.split(",")
            if len(parts) != len(METRIC_COLUMNS):
                raise MetricsParseError(
                    f"{path}:{lineno}: expected {len(METRIC_COLUMNS)} fields, got {len(parts)}")
            try:
                it = int(parts[0])
                values = [float(p) for p in parts[1:6]]
                run_id = int(parts[6])
            except ValueError as exc:
                raise MetricsParseError(f"{path}:{lineno}: {exc}") from exc
            key = (run_id, parts[7], parts[8])
            if key not in rows:
                rows[key] = []
                order.append(key)
            rows[key].append((it, *values))
    if header is None:
        raise MetricsParseError(f"{path}: empty file")
    records = []
    for run_id, algorithm, mode in order:
        data = np.asarray(rows[(run_id, algorithm, mode)], dtype=float)
        records.append(MetricsRecord(
            run_id, algorithm, mode,
            data[:, 0].astype(int), data[:, 1], data[:, 2], data[:, 3],
            data[:, 4], data[:, 5]))
    return records


def write_aggregate(agg, path, master_seed=None):
    columns = ["iteration"]
    for name in AGG_METRICS:
        columns += [f"{name}_mean", f"{name}_std"]
    columns += ["runs", "algorithm", "fidelity_mode"]
    with open(path, "w") as handle:
        if master_seed is not None:
            handle.write(f"# master_seed={master_seed}\n")
        handle.write(",".join(columns) + "\n")
        for k in range(agg.iteration.shape[0]):
            row = [str(int(agg.iteration[k]))]
            for name in AGG_METRICS:
                row += [_fmt(agg.mean[name][k]), _fmt(agg.std[name][k])]
            row += [str(agg.runs), agg.algorithm, agg.fidelity_mode]
            handle.write(",".join(row) + "\n")


# ---------------------------------------------------------------------------
# Experiment execution
# ---------------------------------------------------------------------------

def run_rng(master_seed, run_index):
    """Independent, order-insensitive per-run generator."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(run_index,)))


def seed_low_fidelity(config, rng):
    """Pre-deployment low-fidelity dataset: the lattice samples of the low
    density plus Gaussian noise."""
    xmin, xmax, ymin, ymax = config.grid.bounds
    xs = np.linspace(xmin, xmax, config.low_seed.nx)
    ys = np.linspace(ymin, ymax, config.low_seed.ny)
    gx, gy = np.meshgrid(xs, ys)
    locations = np.column_stack([gx.ravel(), gy.ravel()])
    clean = np.array([geometry.eval_density_at(config.low_density, p) for p in locations])
    noise = rng.normal(0.0, math.sqrt(config.low_seed.noise_var), locations.shape[0])
    return mfgp.FidelityDataset(1, locations, clean + noise)


def make_sampler(density_spec, noise_var):
    """Ground-truth sampler: density value plus Gaussian noise (one draw per
    call even at zero noise, keeping RNG streams aligned)."""
    scale = math.sqrt(noise_var)

    def sampler(x, rng):
        return geometry.eval_density_at(density_spec, x) + rng.normal(0.0, scale)

    return sampler


def fit_training_data(config, per_fidelity=None):
    """Noiseless training samples of the low and high densities at seeded
    uniform locations, used by hyperparameter fitting."""
    total = per_fidelity or config.hyper.training_samples
    n_low = total // 2
    n_high = total - n_low
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.master_seed, spawn_key=(0x0F17,)))
    xmin, xmax, ymin, ymax = config.grid.bounds
    low_x = rng.uniform((xmin, ymin), (xmax, ymax), size=(n_low, 2))
    high_x = rng.uniform((xmin, ymin), (xmax, ymax), size=(n_high, 2))
    low = mfgp.FidelityDataset(
        1, low_x, [geometry.eval_density_at(config.low_density, p) for p in low_x])
    high = mfgp.FidelityDataset(
        2, high_x, [geometry.eval_density_at(config.high_density, p) for p in high_x])
    return low, high


def fit_hyper(config):
    """MLE fit of both fidelity modes on the training data; noise variances
    stay pinned to the experiment's values."""
    low, high = fit_training_data(config)
    init_multi = mfgp.MfgpHyper(
        (mfgp.KernelParams(config.low_density.variance, config.low_density.lengthscale_sq),
         mfgp.KernelParams(config.high_density.variance, config.high_density.lengthscale_sq)),
        (1.0,),
        (config.low_seed.noise_var, config.high_noise_var),
    )
    multi = mfgp.fit_hyperparameters([low, high], init_multi)
    init_single = mfgp.MfgpHyper(
        (mfgp.KernelParams(config.high_density.variance, config.high_density.lengthscale_sq),),
        (), (config.high_noise_var,))
    collapsed = mfgp.collapse_to_single_fidelity([low, high])
    single = mfgp.fit_hyperparameters([collapsed], init_single)
    return PinnedHyper(multi, single.kernels[0], single.noise_vars[0])


def resolve_hyper(config):
    """Config with hyperparameters pinned (fitting first if requested)."""
    if config.hyper.mode == "pinned":
        return config
    pinned = fit_hyper(config)
    return replace(config, hyper=HyperSource("pinned", pinned, config.hyper.training_samples))


def build_model(config, low_data, bounds):
    """Estimation model for the configured fidelity mode, seeded with the
    low-fidelity dataset."""
    pinned = config.hyper.pinned
    if config.fidelity_mode == "multi":
        hyper = replace(pinned.multi,
                        noise_vars=(config.low_seed.noise_var, config.high_noise_var))
        return mfgp.MfgpModel(hyper, [low_data, mfgp.empty_dataset(2)], bounds=bounds)
    return algorithms.single_fidelity_model(
        [low_data], pinned.single_kernel, pinned.single_noise_var, bounds=bounds)


def run_experiment(config, run_index):
    """Execute one seeded run of the configured policy and record metrics
    after every coverage-relevant iteration."""
    config = resolve_hyper(config.validate())
    grid = config.grid.make()
    rng = run_rng(config.master_seed, run_index)
    xmin, xmax, ymin, ymax = config.grid.bounds
    positions = rng.uniform((xmin, ymin), (xmax, ymax), size=(config.agents, 2))
    team = geometry.TeamConfiguration.at(positions)
    true_field = geometry.eval_test_density(config.high_density, grid)
    T = config.iterations

    iteration = np.arange(1, T + 1)
    regret = np.empty(T)
    mse = np.full(T, np.nan)
    max_var = np.full(T, np.nan)
    mean_distance = np.empty(T)

    if config.algorithm == "baseline":
        trajectory = algorithms.known_density_baseline(team, grid, true_field, T)
        for t in range(T):
            cfg_t = trajectory[t + 1]
            regret[t] = max(geometry.instantaneous_regret(grid, cfg_t, true_field), 0.0)
            mean_distance[t] = float(cfg_t.travel.mean())
        return MetricsRecord(run_index, config.algorithm, "none", iteration,
                             regret, np.cumsum(regret), mse, max_var, mean_distance)

    low_data = seed_low_fidelity(config, rng)
    model = build_model(config, low_data, grid.bounds)
    sampler = make_sampler(config.high_density, config.high_noise_var)
    m0 = algorithms.initial_max_variance(model, grid)

    def model_fit_metrics(current):
        means, variances = current.posterior(grid.points)
        return float(((means - true_field) ** 2).mean()), float(variances.max())

    if config.algorithm == "smlc":
        state = algorithms.SmlcState(model, team, positions.copy(), m0, config.smlc.gamma)
        for t in range(T):
            state, _ = algorithms.smlc_iteration(state, grid, sampler, rng)
            regret[t] = max(geometry.instantaneous_regret(grid, state.config, true_field), 0.0)
            mse[t], max_var[t] = model_fit_metrics(state.model)
            mean_distance[t] = float(state.config.travel.mean())
    else:
        state = algorithms.DmlcState(model, team, positions.copy(), m0,
                                     config.dmlc.alpha, config.dmlc.beta,
                                     config.dmlc.first_epoch_len)
        t = 0
        travel = team.travel.copy()
        while t < T:
            state, outcomes = algorithms.dmlc_epoch(
                state, grid, sampler, rng, max_coverage_iters=T - t)
            epoch_mse, epoch_max_var = model_fit_metrics(state.model)
            for outcome in outcomes:
                travel = travel + outcome.distance_delta
                if outcome.phase != "coverage":
                    continue
                cfg_t = geometry.TeamConfiguration(outcome.positions, travel)
                regret[t] = max(geometry.instantaneous_regret(grid, cfg_t, true_field), 0.0)
                mse[t], max_var[t] = epoch_mse, epoch_max_var
                mean_distance[t] = float(travel.mean())
                t += 1

    return MetricsRecord(run_index, config.algorithm, config.fidelity_mode, iteration,
                         regret, np.cumsum(regret), mse, max_var, mean_distance)


def _max_workers(runs):
    cap = os.environ.get("MF_COVERAGE_THREADS", "")
    try:
        cap = int(cap) if cap else (os.cpu_count() or 1)
    except ValueError:
        cap = os.cpu_count() or 1
    return max(1, min(runs, cap))


def run_batch(config):
    """All runs of a config, optionally in parallel (MF_COVERAGE_THREADS
    caps the pool). Returns (records sorted by run index, aggregate)."""
    config = resolve_hyper(config.validate())
    results = {}
    failures = {}

    def one(run_index):
        try:
            results[run_index] = run_experiment(config, run_index)
        except Exception as exc:  # noqa: BLE001 - reported per run index
            failures[run_index] = exc

    workers = _max_workers(config.runs)
    if workers == 1:
        for r in range(config.runs):
            one(r)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(config.runs)))
    if failures:
        detail = "; ".join(f"run {r}: {failures[r]}" for r in sorted(failures))
        raise BatchRunError(f"{len(failures)} of {config.runs} runs failed ({detail})")
    records = [results[r] for r in sorted(results)]
    return records, aggregate_metrics(records)


def batch_name(algorithm, fidelity_mode):
    return "baseline" if algorithm == "baseline" else f"{algorithm}_{fidelity_mode}"


def compare_series(config):
    """The policy grid of the headline comparison: baseline plus each
    algorithm at each fidelity mode."""
    series = [("baseline", "multi")]
    series += [(alg, mode) for alg in ("smlc", "dmlc") for mode in ("multi", "single")]
    return series


def run_compare(config, out_dir):
    """Run every series of the comparison grid and write per-run and
    aggregate CSVs into out_dir. Returns {series name: (runs path, agg path)}."""
    os.makedirs(out_dir, exist_ok=True)
    config = resolve_hyper(config.validate())
    written = {}
    for algorithm, mode in compare_series(config):
        cfg = replace(config, algorithm=algorithm, fidelity_mode=mode)
        records, agg = run_batch(cfg)
        name = batch_name(algorithm, mode)
        runs_path = os.path.join(out_dir, f"{name}.csv")
        agg_path = os.path.join(out_dir, f"{name}_agg.csv")
        write_metrics(records, runs_path, master_seed=config.master_seed)
        write_aggregate(agg, agg_path, master_seed=config.master_seed)
        written[name] = (runs_path, agg_path)
    return written
