"""Multi-fidelity Gaussian-process regression.

Fidelity levels 1..s are linked autoregressively: level f equals a positive
scale times level f-1 plus an independent GP discrepancy, and level s is
ground truth. Observations at every level are fused through one block
covariance system; the posterior of the top level is queried pointwise.

All kernels are squared-exponential, k(x, x') = v^2 exp(-||x-x'||^2 / (2 l^2)),
and prior means are constant per fidelity (0 by default). With a single
fidelity the machinery reduces exactly to a plain GP.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.optimize import minimize

from . import accel

JITTER_SCALE = 1e-10
JITTER_RETRIES = 3


class DegenerateCovarianceError(RuntimeError):
    """The jittered covariance matrix could not be factorized as SPD."""


@dataclass(frozen=True)
class KernelParams:
    """Squared-exponential kernel: signal variance v^2 and lengthscale l^2."""

    variance: float
    lengthscale_sq: float

    def __post_init__(self):
        if self.variance <= 0:
            raise ValueError(f"kernel variance must be > 0, got {self.variance}")
        if self.lengthscale_sq <= 0:
            raise ValueError(
                f"kernel lengthscale_sq must be > 0, got {self.lengthscale_sq}")


def kernel_eval(params, x, x_other):
    """Scalar kernel evaluation k(x, x')."""
    x = np.asarray(x, dtype=float)
    x_other = np.asarray(x_other, dtype=float)
    d2 = float(((x - x_other) ** 2).sum())
    return params.variance * math.exp(-d2 / (2.0 * params.lengthscale_sq))


def kernel_matrix(params, xa, xb):
    """Kernel matrix K(xa, xb), shape (len(xa), len(xb))."""
    xa = np.atleast_2d(np.asarray(xa, dtype=float))
    xb = np.atleast_2d(np.asarray(xb, dtype=float))
    return accel.sqexp_cross(xa, xb, params.variance, params.lengthscale_sq)


@dataclass(frozen=True)
class MfgpHyper:
    """Hyperparameters of an s-fidelity model.

    kernels[f-1] belongs to the level-f discrepancy GP, rho[f-2] scales level
    f-1 into level f (so rho is empty when s == 1), noise_vars[f-1] is the
    sampling noise at level f, and means[f-1] the constant prior mean of the
    level-f discrepancy.
    """

    kernels: tuple
    rho: tuple
    noise_vars: tuple
    means: tuple = None

    def __post_init__(self):
        kernels = tuple(self.kernels)
        rho = tuple(float(r) for r in self.rho)
        noise = tuple(float(v) for v in self.noise_vars)
        means = self.means
        means = (0.0,) * len(kernels) if means is None else tuple(float(m) for m in means)
        object.__setattr__(self, "kernels", kernels)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "noise_vars", noise)
        object.__setattr__(self, "means", means)
        s = len(kernels)
        if s < 1:
            raise ValueError("need at least one fidelity level")
        if len(rho) != s - 1:
            raise ValueError(f"expected {s - 1} rho entries, got {len(rho)}")
        if any(r <= 0 for r in rho):
            raise ValueError("rho entries must be > 0")
        if len(noise) != s or any(v < 0 for v in noise):
            raise ValueError("need one noise variance >= 0 per fidelity")
        if len(means) != s:
            raise ValueError("need one prior mean per fidelity")

    @property
    def s(self):
        return len(self.kernels)

    def rho_prod(self, i, f):
        """rho_{i:f} = prod of rho_i..rho_{f-1} (1-based fidelities, 1 if i == f)."""
        out = 1.0
        for k in range(i, f):
            out *= self.rho[k - 1]
        return out

    def prior_mean(self):
        """Constant prior mean of the top fidelity: sum_i rho_{i:s} mu_i."""
        s = self.s
        return sum(self.rho_prod(i, s) * self.means[i - 1] for i in range(1, s + 1))

    def prior_variance(self):
        """Prior variance of the top fidelity: sum_i rho_{i:s}^2 v_i^2."""
        s = self.s
        return sum(self.rho_prod(i, s) ** 2 * self.kernels[i - 1].variance
                   for i in range(1, s + 1))


@dataclass(frozen=True)
class FidelityDataset:
    """Sample locations and noisy values collected at one fidelity level."""

    fidelity: int
    locations: np.ndarray   # (n, 2)
    values: np.ndarray      # (n,)

    def __post_init__(self):
        locations = np.asarray(self.locations, dtype=float).reshape(-1, 2)
        values = np.asarray(self.values, dtype=float).ravel()
        if locations.shape[0] != values.shape[0]:
            raise ValueError("locations and values must have equal length")
        if self.fidelity < 1:
            raise ValueError("fidelity indices are 1-based")
        object.__setattr__(self, "locations", locations)
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return self.values.shape[0]

    def appended(self, x, y):
        return FidelityDataset(
            self.fidelity,
            np.vstack([self.locations, np.asarray(x, dtype=float).reshape(1, 2)]),
            np.append(self.values, float(y)),
        )


def empty_dataset(fidelity):
    return FidelityDataset(fidelity, np.empty((0, 2)), np.empty(0))


def _normalized_datasets(hyper, datasets):
    """One dataset per fidelity 1..s, in order, filling gaps with empties."""
    by_fid = {}
    for d in datasets or ():
        if d.fidelity > hyper.s:
            raise ValueError(f"dataset fidelity {d.fidelity} exceeds s={hyper.s}")
        if d.fidelity in by_fid:
            raise ValueError(f"duplicate dataset for fidelity {d.fidelity}")
        by_fid[d.fidelity] = d
    return tuple(by_fid.get(f, empty_dataset(f)) for f in range(1, hyper.s + 1))


def assemble_block_covariance(hyper, datasets):
    """Full (sum n_f)-square observation covariance K + Theta.

    Block (f, f') is sum over shared ancestor levels i <= min(f, f') of
    rho_{i:f} rho_{i:f'} K_i(X_f, X_f'); Theta adds the per-fidelity noise
    variance on the diagonal. Exactly symmetric by construction.
    """
    datasets = _normalized_datasets(hyper, datasets)
    sizes = [d.n for d in datasets]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    n = int(offsets[-1])
    kt = np.zeros((n, n))
    for f in range(1, hyper.s + 1):
        if sizes[f - 1] == 0:
            continue
        rf = slice(offsets[f - 1], offsets[f])
        for fp in range(f, hyper.s + 1):
            if sizes[fp - 1] == 0:
                continue
            rfp = slice(offsets[fp - 1], offsets[fp])
            block = np.zeros((sizes[f - 1], sizes[fp - 1]))
            for i in range(1, f + 1):
                scale = hyper.rho_prod(i, f) * hyper.rho_prod(i, fp)
                block += scale * kernel_matrix(
                    hyper.kernels[i - 1],
                    datasets[f - 1].locations,
                    datasets[fp - 1].locations,
                )
            kt[rf, rfp] = block
            if fp != f:
                kt[rfp, rf] = block.T
        kt[rf, rf] += hyper.noise_vars[f - 1] * np.eye(sizes[f - 1])
    return kt


def cross_covariance(hyper, datasets, x):
    """Covariance vector between observations and the top-level process at x."""
    return cross_covariance_matrix(hyper, datasets, np.asarray(x, dtype=float).reshape(1, 2)).ravel()


def cross_covariance_matrix(hyper, datasets, queries):
    """Covariance between all observations and the top-level process at each
    query point, shape (sum n_f, n_queries). Block f is
    sum over i <= f of rho_{i:f} rho_{i:s} K_i(X_f, queries)."""
    datasets = _normalized_datasets(hyper, datasets)
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    s = hyper.s
    blocks = []
    for f in range(1, s + 1):
        d = datasets[f - 1]
        if d.n == 0:
            continue
        block = np.zeros((d.n, queries.shape[0]))
        for i in range(1, f + 1):
            scale = hyper.rho_prod(i, f) * hyper.rho_prod(i, s)
            block += scale * kernel_matrix(hyper.kernels[i - 1], d.locations, queries)
        blocks.append(block)
    if not blocks:
        return np.zeros((0, queries.shape[0]))
    return np.vstack(blocks)


def centered_observations(hyper, datasets):
    """Stacked observation vector minus its prior mean, fidelity order."""
    datasets = _normalized_datasets(hyper, datasets)
    parts = []
    for f in range(1, hyper.s + 1):
        d = datasets[f - 1]
        if d.n == 0:
            continue
        mean_f = sum(hyper.rho_prod(i, f) * hyper.means[i - 1] for i in range(1, f + 1))
        parts.append(d.values - mean_f)
    if not parts:
        return np.zeros(0)
    return np.concatenate(parts)


def _factorize(kt):
    """Cholesky of the jittered covariance; escalating jitter, then failure."""
    n = kt.shape[0]
    base = float(np.mean(np.diag(kt)))
    jitter = JITTER_SCALE * base if base > 0 else JITTER_SCALE
    eye = np.eye(n)
    for _ in range(1 + JITTER_RETRIES):
        try:
            factor = cho_factor(kt + jitter * eye, lower=True)
            return factor
        except (LinAlgError, ValueError):
            jitter *= 10.0
    raise DegenerateCovarianceError(
        f"covariance of size {n} is not positive definite even with jitter {jitter:.3e}")


class MfgpModel:
    """Multi-fidelity GP with a cached factorization of (K + Theta).

    Instances are immutable from the caller's side: ``add_observation``
    returns a new model with caches rebuilt, so models can be shared
    read-only across parallel runs.
    """

    def __init__(self, hyper, datasets=None, bounds=None):
        self.hyper = hyper
        self.datasets = _normalized_datasets(hyper, datasets)
        self.bounds = bounds
        self.n_total = sum(d.n for d in self.datasets)
        self._prior_mean = hyper.prior_mean()
        self._prior_var = hyper.prior_variance()
        if self.n_total > 0:
            kt = assemble_block_covariance(hyper, self.datasets)
            self._factor = _factorize(kt)
            nu = centered_observations(hyper, self.datasets)
            self._weights = cho_solve(self._factor, nu)
        else:
            self._factor = None
            self._weights = None

    def posterior(self, queries, clamp=True):
        """Posterior mean and variance of the top-fidelity process.

        Variances are clamped at 0 unless ``clamp=False``.
        """
        queries = np.atleast_2d(np.asarray(queries, dtype=float))
        nq = queries.shape[0]
        if self.n_total == 0:
            means = np.full(nq, self._prior_mean)
            variances = np.full(nq, self._prior_var)
            return means, variances
        kx = cross_covariance_matrix(self.hyper, self.datasets, queries)
        means = self._prior_mean + kx.T @ self._weights
        solved = cho_solve(self._factor, kx)
        variances = self._prior_var - np.einsum("ij,ij->j", kx, solved)
        if clamp:
            variances = np.maximum(variances, 0.0)
        return means, variances

    def posterior_at(self, x, clamp=True):
        means, variances = self.posterior(np.asarray(x, dtype=float).reshape(1, 2), clamp=clamp)
        return float(means[0]), float(variances[0])

    def add_observation(self, fidelity, x, y):
        """New model with (x, y) appended at the given fidelity."""
        if not 1 <= fidelity <= self.hyper.s:
            raise ValueError(f"fidelity {fidelity} outside 1..{self.hyper.s}")
        x = np.asarray(x, dtype=float).ravel()
        if self.bounds is not None and not bool(self.bounds.contains(x)):
            raise ValueError(f"sample location {x.tolist()} lies outside the domain")
        datasets = list(self.datasets)
        datasets[fidelity - 1] = datasets[fidelity - 1].appended(x, y)
        return MfgpModel(self.hyper, datasets, bounds=self.bounds)

    def __repr__(self):
        ns = ", ".join(f"n{d.fidelity}={d.n}" for d in self.datasets)
        return f"MfgpModel(s={self.hyper.s}, {ns})"


def log_marginal_likelihood(hyper, datasets):
    """Gaussian log evidence of the stacked observations under the model."""
    datasets = _normalized_datasets(hyper, datasets)
    n = sum(d.n for d in datasets)
    if n == 0:
        raise ValueError("log marginal likelihood needs at least one observation")
    kt = assemble_block_covariance(hyper, datasets)
    factor = _factorize(kt)
    nu = centered_observations(hyper, datasets)
    alpha = cho_solve(factor, nu)
    logdet = 2.0 * float(np.log(np.diag(factor[0])).sum())
    return float(-0.5 * nu @ alpha - 0.5 * logdet - 0.5 * n * math.log(2.0 * math.pi))


def collapse_to_single_fidelity(datasets):
    """Concatenate every dataset into one fidelity-1 dataset, lowest fidelity
    first (sample provenance is forgotten)."""
    ordered = sorted(datasets, key=lambda d: d.fidelity)
    if not ordered:
        return empty_dataset(1)
    locations = np.vstack([d.locations for d in ordered])
    values = np.concatenate([d.values for d in ordered])
    return FidelityDataset(1, locations, values)


def _pack_log(hyper, fit_noise):
    theta = []
    for k in hyper.kernels:
        theta.extend([k.variance, k.lengthscale_sq])
    theta.extend(hyper.rho)
    if fit_noise:
        theta.extend(hyper.noise_vars)
    return np.log(np.asarray(theta, dtype=float))


def _unpack_log(theta, template, fit_noise):
    vals = np.exp(np.asarray(theta, dtype=float))
    s = template.s
    kernels = tuple(KernelParams(vals[2 * i], vals[2 * i + 1]) for i in range(s))
    pos = 2 * s
    rho = tuple(vals[pos:pos + s - 1])
    pos += s - 1
    noise = tuple(vals[pos:pos + s]) if fit_noise else template.noise_vars
    return MfgpHyper(kernels, rho, noise, template.means)


def default_fit_bounds(hyper, fit_noise=False):
    """Positive search intervals per packed parameter."""
    bounds = []
    for _ in hyper.kernels:
        bounds.append((1e-6, 1e6))   # variance
        bounds.append((1e-6, 1e2))   # lengthscale_sq
    bounds.extend([(1e-6, 1e3)] * (hyper.s - 1))
    if fit_noise:
        bounds.extend([(1e-12, 1e6)] * hyper.s)
    return bounds


def fit_hyperparameters(datasets, init, bounds=None, fit_noise=False, max_evals=500):
    """Maximize the log marginal likelihood by Nelder-Mead simplex search in
    log-parameter space (kernel variances and lengthscales, then rho, then
    optionally noise variances).

    Deterministic given ``init``; bounded to ``max_evals`` objective
    evaluations. Returns ``init`` unchanged (with a warning) when the search
    finds no strictly improving point, so the result never fits worse than
    the start.
    """
    datasets = [d for d in datasets if d.n > 0]
    if not datasets:
        raise ValueError("cannot fit hyperparameters without data")
    if bounds is None:
        bounds = default_fit_bounds(init, fit_noise)
    if any(lo <= 0 or hi <= lo for lo, hi in bounds):
        raise ValueError("bounds must be positive intervals")

    theta0 = _pack_log(init, fit_noise)
    log_bounds = [(math.log(lo), math.log(hi)) for lo, hi in bounds]
    if len(log_bounds) != theta0.size:
        raise ValueError(f"expected {theta0.size} bound pairs, got {len(log_bounds)}")
    theta0 = np.clip(theta0, [b[0] for b in log_bounds], [b[1] for b in log_bounds])

    def objective(theta):
        try:
            hyper = _unpack_log(theta, init, fit_noise)
            return -log_marginal_likelihood(hyper, datasets)
        except (DegenerateCovarianceError, ValueError, FloatingPointError):
            return 1e300

    result = minimize(
        objective, theta0, method="Nelder-Mead", bounds=log_bounds,
        options={"maxfev": max_evals, "xatol": 1e-4, "fatol": 1e-9},
    )
    candidate = _unpack_log(result.x, init, fit_noise)
    init_ll = log_marginal_likelihood(init, datasets)
    try:
        cand_ll = log_marginal_likelihood(candidate, datasets)
    except DegenerateCovarianceError:
        cand_ll = -np.inf
    if cand_ll > init_ll:
        return candidate
    warnings.warn("hyperparameter search found no improving step; keeping init")
    return init
