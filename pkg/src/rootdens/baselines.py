"""Classical competitors of the root estimator.

* Gaussian kernel estimator with Silverman's bandwidth.
* Orthogonal-series projection estimator: the density itself (not its
  square root) expanded with empirical Fourier coefficients
  ``b_i = mean(phi_i(x_k))``.  The raw expansion may go negative and is
  kept that way unless ``clip=True``.
* Trivial parametric and empirical baselines for the discrete and half-line
  experiments: empirical frequencies, moment-matched binomial, Poisson and
  exponential laws.
"""
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .bases import BasisSpec, orthonormal_matrix, check_support, default_domain
from ._quad import composite_gauss_legendre

__all__ = [
    "silverman_bandwidth",
    "KernelEstimate",
    "kernel_fit",
    "kernel_density",
    "ProjectionEstimate",
    "density_frame",
    "projection_basis",
    "projection_fit",
    "projection_density",
    "FrequencyEstimate",
    "frequency_fit",
    "ParametricEstimate",
    "binomial_fit",
    "poisson_fit",
    "exponential_fit",
]

_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def silverman_bandwidth(x):
    """``1.06 * min(std, IQR / 1.34) * n**(-1/5)``."""
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise ValueError("bandwidth rule needs at least two points")
    sd = np.std(x, ddof=1)
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    if not spread > 0:
        raise ValueError("zero sample spread; pass an explicit bandwidth")
    return 1.06 * spread * x.size ** -0.2


@dataclass(frozen=True, eq=False)
class KernelEstimate:
    sample: np.ndarray
    bandwidth: float
    kernel: str = "gaussian"

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")

    def pdf(self, x):
        return kernel_density(self, x)


def kernel_fit(sample, h=None):
    x = np.array(sample, dtype=float).ravel()
    if x.size < 1:
        raise ValueError("empty sample")
    return KernelEstimate(x, float(silverman_bandwidth(x) if h is None else h))


def kernel_density(est, x, chunk=2048):
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty(flat.shape)
    h = est.bandwidth
    for i in range(0, flat.size, chunk):
        u = (flat[i:i + chunk, None] - est.sample[None, :]) / h
        out[i:i + chunk] = np.exp(-0.5 * u * u).sum(axis=1)
    return (out * (_INV_SQRT_2PI / (est.sample.size * h))).reshape(x.shape)


@dataclass(frozen=True, eq=False)
class ProjectionEstimate:
    basis: BasisSpec
    coeffs: np.ndarray
    clip: bool = False
    mass: float = 1.0

    def pdf(self, x):
        return projection_density(self, x)


def density_frame(basis):
    """Turn a root-estimator frame into one suited to expanding the density.

    The root estimator's ground state squared is the reference law; for the
    density itself the ground state should *be* that law, which needs a
    frame half as wide (Hermite ``scale / sqrt(2)``, Laguerre
    ``scale / 2``).  Discrete frames are returned unchanged.
    """
    if basis.family == "hermite":
        return BasisSpec("hermite", basis.size, shift=basis.shift,
                         scale=basis.scale / np.sqrt(2.0))
    if basis.family == "laguerre":
        return BasisSpec("laguerre", basis.size, scale=basis.scale / 2.0)
    return basis


def projection_basis(family, size, x, n_trials=None):
    """Moment-matched basis frame for expanding the density itself."""
    return density_frame(BasisSpec.from_sample(family, size, x, n_trials=n_trials))


def _raw(basis, coeffs, x):
    return orthonormal_matrix(basis, x) @ coeffs


def projection_fit(sample, basis, clip=False):
    """Empirical Fourier coefficients ``b_i = (1/n) sum_k phi_i(x_k)``.

    With ``clip=True`` the density is truncated at zero and renormalised
    over the basis' default domain.
    """
    x = check_support(basis, np.atleast_1d(np.asarray(sample, dtype=float)))
    b = orthonormal_matrix(basis, x).mean(axis=0)
    mass = 1.0
    if clip:
        dom = default_domain(basis)
        if dom.discrete:
            mass = float(np.maximum(_raw(basis, b, dom.points()), 0).sum())
        else:
            lo = max(dom.lower, 0.0) if basis.family == "laguerre" else dom.lower
            nodes, w = composite_gauss_legendre(lo, dom.upper, 4000)
            mass = float(np.maximum(_raw(basis, b, nodes), 0) @ w)
    return ProjectionEstimate(basis, b, clip=clip, mass=mass)


def projection_density(est, x):
    p = _raw(est.basis, est.coeffs, x)
    if est.clip:
        p = np.maximum(p, 0.0) / est.mass
    return p


@dataclass(frozen=True, eq=False)
class FrequencyEstimate:
    """Empirical pmf of an integer sample."""

    values: np.ndarray
    probs: np.ndarray

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.values, x)
        idx = np.clip(idx, 0, self.values.size - 1)
        return np.where(self.values[idx] == x, self.probs[idx], 0.0)


def frequency_fit(sample):
    values, counts = np.unique(np.asarray(sample, dtype=float), return_counts=True)
    return FrequencyEstimate(values, counts / counts.sum())


class ParametricEstimate:
    """A frozen scipy law fitted by moment matching, exposing ``pdf``."""

    def __init__(self, name, dist, discrete):
        self.name = name
        self.dist = dist
        self.discrete = discrete

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return self.dist.pmf(x) if self.discrete else self.dist.pdf(x)


def binomial_fit(sample, n_trials):
    p = float(np.clip(np.mean(sample) / n_trials, 1e-12, 1 - 1e-12))
    return ParametricEstimate("binomial", stats.binom(int(n_trials), p), True)


def poisson_fit(sample):
    return ParametricEstimate("poisson", stats.poisson(max(float(np.mean(sample)), 1e-12)), True)


def exponential_fit(sample):
    return ParametricEstimate("exponential", stats.expon(scale=float(np.mean(sample))), False)
