"""Orthonormal basis functions for the root density estimator.

Four families are available, each built on a classical orthogonal
polynomial system and normalised so that the functions (not the
polynomials) are orthonormal on their support:

========  ==================  ========================  ================
family    support             ground state squared      shape parameters
========  ==================  ========================  ================
hermite   real line           normal pdf                shift, scale
laguerre  half-line x >= 0    exponential pdf           scale
kravchuk  {0, 1, ..., N}      binomial(N, p) pmf        n_trials, p
charlier  {0, 1, 2, ...}      Poisson(lam) pmf          lam
========  ==================  ========================  ================

All evaluation goes through three-term recurrences on the normalised
functions, so no factorials or powers of two are ever formed.

Continuous families work on a standardised variable ``z``.  For Hermite
``z = (x - shift) / (scale * sqrt(2))`` so that the ground state with a given
``scale`` is the normal density with that standard deviation; for Laguerre
``z = x / scale`` so that ``scale`` is the mean of the ground state.
:func:`basis_matrix` returns the functions of ``z``; :func:`orthonormal_matrix`
folds in the Jacobian so the result is orthonormal in the data units of ``x``.
"""
from dataclasses import dataclass, asdict

import numpy as np
from scipy import stats

from ._quad import composite_gauss_legendre

__all__ = [
    "FAMILIES",
    "BasisSpec",
    "SupportDomain",
    "OutOfSupportError",
    "TruncationError",
    "basis_value",
    "basis_row",
    "basis_matrix",
    "orthonormal_matrix",
    "default_domain",
    "gram_check",
]

FAMILIES = ("hermite", "laguerre", "kravchuk", "charlier")
DISCRETE = ("kravchuk", "charlier")

_SQRT2 = np.sqrt(2.0)


class OutOfSupportError(ValueError):
    """A point lies outside the support of a basis or distribution."""


class TruncationError(ArithmeticError):
    """Quadrature bounds or summation cut-off too small for the requested basis."""


@dataclass(frozen=True)
class BasisSpec:
    """Family, size and shape parameters of an orthonormal basis.

    Parameters
    ----------
    family : {'hermite', 'laguerre', 'kravchuk', 'charlier'}
    size : int
        Number of basis functions ``s``.
    shift : float
        Location of the Hermite ground state (ignored otherwise).
    scale : float
        Hermite: standard deviation of the ground state.  Laguerre: mean of
        the ground state.
    n_trials : int
        Kravchuk lattice size ``N``; support is ``0..N``.
    p : float
        Kravchuk success probability.
    lam : float
        Charlier (Poisson) rate.
    """

    family: str
    size: int
    shift: float = 0.0
    scale: float = 1.0
    n_trials: int = None
    p: float = None
    lam: float = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown basis family {self.family!r}; expected one of {FAMILIES}")
        if int(self.size) != self.size or self.size < 1:
            raise ValueError(f"basis size must be a positive integer, got {self.size}")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise ValueError(f"scale must be positive, got {self.scale}")
        if not np.isfinite(self.shift):
            raise ValueError("shift must be finite")
        if self.family == "kravchuk":
            if self.n_trials is None or self.p is None:
                raise ValueError("kravchuk basis needs n_trials and p")
            if int(self.n_trials) != self.n_trials or self.n_trials < 1:
                raise ValueError(f"n_trials must be a positive integer, got {self.n_trials}")
            if not 0.0 < self.p < 1.0:
                raise ValueError(f"p must lie in (0, 1), got {self.p}")
            if self.size > self.n_trials + 1:
                raise ValueError(
                    f"kravchuk basis has only N+1 = {self.n_trials + 1} functions, size={self.size}")
        if self.family == "charlier":
            if self.lam is None or not (np.isfinite(self.lam) and self.lam > 0):
                raise ValueError(f"charlier basis needs lam > 0, got {self.lam}")

    @property
    def discrete(self):
        return self.family in DISCRETE

    @property
    def jacobian(self):
        """dz/dx of the standardising transform (1 for discrete families)."""
        if self.family == "hermite":
            return 1.0 / (self.scale * _SQRT2)
        if self.family == "laguerre":
            return 1.0 / self.scale
        return 1.0

    def standardize(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == "hermite":
            return (x - self.shift) * self.jacobian
        if self.family == "laguerre":
            return x / self.scale
        return x

    def with_size(self, size):
        return BasisSpec(**{**asdict(self), "size": int(size)})

    @classmethod
    def from_sample(cls, family, size, x, n_trials=None):
        """Basis whose ground state is moment-matched to the sample ``x``.

        Hermite uses the sample mean and standard deviation, Laguerre the
        sample mean as scale, Kravchuk ``p = mean / N`` and Charlier
        ``lam = mean``.
        """
        x = np.asarray(x, dtype=float)
        mean = float(np.mean(x))
        if family == "hermite":
            sd = float(np.std(x, ddof=1)) if x.size > 1 else 1.0
            return cls(family, size, shift=mean, scale=sd if sd > 0 else 1.0)
        if family == "laguerre":
            return cls(family, size, scale=mean if mean > 0 else 1.0)
        if family == "kravchuk":
            if n_trials is None:
                raise ValueError("kravchuk basis needs n_trials")
            p = min(max(mean / n_trials, 1e-6), 1 - 1e-6)
            return cls(family, size, n_trials=int(n_trials), p=p)
        if family == "charlier":
            return cls(family, size, lam=mean if mean > 0 else 1e-6)
        raise ValueError(f"unknown basis family {family!r}")

    def to_dict(self):
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True)
class SupportDomain:
    """Support of a basis or distribution with finite integration bounds.

    ``kind`` is one of ``'real'``, ``'half'``, ``'lattice'`` or ``'naturals'``.
    For the discrete kinds ``lower`` and ``upper`` are the inclusive integer
    end points of the summation range.
    """

    kind: str
    lower: float
    upper: float

    def __post_init__(self):
        if self.kind not in ("real", "half", "lattice", "naturals"):
            raise ValueError(f"unknown support kind {self.kind!r}")
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)) or self.upper <= self.lower:
            raise ValueError(f"bounds must be finite and ordered, got ({self.lower}, {self.upper})")

    @property
    def discrete(self):
        return self.kind in ("lattice", "naturals")

    def points(self):
        """Lattice points for discrete kinds."""
        if not self.discrete:
            raise TypeError("continuous domain has no lattice points")
        return np.arange(int(self.lower), int(self.upper) + 1, dtype=float)


def check_support(spec, x):
    """Raise :class:`OutOfSupportError` unless every ``x`` lies in the support."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise OutOfSupportError("non-finite support point")
    fam = spec.family
    if fam == "laguerre" and np.any(x < 0):
        raise OutOfSupportError(f"laguerre basis needs x >= 0, got {x[x < 0].ravel()[0]}")
    if fam in DISCRETE:
        bad = (x < 0) | (x != np.round(x))
        if fam == "kravchuk":
            bad |= x > spec.n_trials
        if np.any(bad):
            raise OutOfSupportError(f"{fam} basis is undefined at x = {x[bad].ravel()[0]}")
    return x


def _hermite(z, size):
    out = np.empty(z.shape + (size,))
    out[..., 0] = np.pi ** -0.25 * np.exp(-0.5 * z * z)
    if size > 1:
        out[..., 1] = _SQRT2 * z * out[..., 0]
    for k in range(1, size - 1):
        out[..., k + 1] = (np.sqrt(2.0 / (k + 1)) * z * out[..., k]
                           - np.sqrt(k / (k + 1.0)) * out[..., k - 1])
    return out


def _laguerre(z, size):
    out = np.empty(z.shape + (size,))
    out[..., 0] = np.exp(-0.5 * z)
    if size > 1:
        out[..., 1] = (1.0 - z) * out[..., 0]
    for k in range(1, size - 1):
        out[..., k + 1] = ((2 * k + 1 - z) * out[..., k] - k * out[..., k - 1]) / (k + 1)
    return out


def _jacobi_recurrence(x, size, ground, diag, offdiag):
    # x*p_k = a_{k+1} p_{k+1} + b_k p_k + a_k p_{k-1} on orthonormal functions
    out = np.empty(x.shape + (size,))
    out[..., 0] = ground
    if size > 1:
        out[..., 1] = (x - diag(0)) * ground / offdiag(1)
    for k in range(1, size - 1):
        out[..., k + 1] = ((x - diag(k)) * out[..., k] - offdiag(k) * out[..., k - 1]) / offdiag(k + 1)
    return out


def _kravchuk(x, size, N, p):
    q = 1.0 - p
    ground = np.exp(0.5 * stats.binom.logpmf(x, N, p))
    return _jacobi_recurrence(
        x, size, ground,
        diag=lambda k: p * (N - k) + q * k,
        offdiag=lambda k: np.sqrt(k * p * q * (N - k + 1)))


def _charlier(x, size, lam):
    ground = np.exp(0.5 * stats.poisson.logpmf(x, lam))
    return _jacobi_recurrence(
        x, size, ground,
        diag=lambda k: k + lam,
        offdiag=lambda k: np.sqrt(k * lam))


def basis_matrix(spec, x, size=None):
    """Basis functions ``phi_0 .. phi_{s-1}`` at the standardised points.

    Returns an array of shape ``x.shape + (s,)``.  The Jacobian of the
    standardising transform is *not* applied; see :func:`orthonormal_matrix`.
    """
    x = check_support(spec, x)
    size = spec.size if size is None else size
    z = spec.standardize(x)
    if spec.family == "hermite":
        return _hermite(z, size)
    if spec.family == "laguerre":
        return _laguerre(z, size)
    if spec.family == "kravchuk":
        return _kravchuk(z, size, spec.n_trials, spec.p)
    return _charlier(z, size, spec.lam)


def orthonormal_matrix(spec, x):
    """Basis functions orthonormal with respect to ``dx`` in data units."""
    phi = basis_matrix(spec, x)
    if spec.discrete:
        return phi
    return phi * np.sqrt(spec.jacobian)


def basis_value(spec, k, x):
    """Single basis function ``phi_k`` at scalar ``x``."""
    if int(k) != k or not 0 <= k < spec.size:
        raise IndexError(f"order {k} outside 0..{spec.size - 1}")
    return float(basis_matrix(spec, float(x), size=int(k) + 1)[..., k])


def basis_row(spec, x):
    """Vector ``(phi_0(x), ..., phi_{s-1}(x))`` at scalar ``x``."""
    return basis_matrix(spec, float(x))


def default_domain(spec):
    """Bounds outside of which every basis function is negligible."""
    s = spec.size
    if spec.family == "hermite":
        half = (np.sqrt(2 * s + 1) + 9.0) / spec.jacobian
        return SupportDomain("real", spec.shift - half, spec.shift + half)
    if spec.family == "laguerre":
        return SupportDomain("half", 0.0, (6.0 * s + 80.0) * spec.scale)
    if spec.family == "kravchuk":
        return SupportDomain("lattice", 0, spec.n_trials)
    lam = spec.lam
    upper = int(stats.poisson.isf(1e-16, lam)) + 2 * s + 10
    while True:
        tail = basis_matrix(spec, np.arange(upper - 4, upper + 1, dtype=float))
        if np.max(tail ** 2) < 1e-24:
            return SupportDomain("naturals", 0, upper)
        upper = int(upper * 1.5) + 10


def gram_check(spec, domain=None, n_nodes=None, tol=None):
    """Numerical Gram matrix of the basis over ``domain``.

    Continuous families use composite Gauss-Legendre quadrature with
    ``n_nodes`` nodes in data units (default grows with the basis size so
    the highest function is resolved); discrete families sum exactly over the
    lattice points of ``domain``.

    Raises
    ------
    TruncationError
        When ``tol`` is given and some diagonal entry departs from 1 by more
        than ``tol``, or the result is not finite.
    """
    domain = default_domain(spec) if domain is None else domain
    if domain.discrete:
        if not spec.discrete:
            raise ValueError("discrete domain for a continuous basis")
        phi = orthonormal_matrix(spec, domain.points())
        gram = phi.T @ phi
    else:
        if spec.discrete:
            raise ValueError("continuous domain for a discrete basis")
        lower = max(domain.lower, 0.0) if spec.family == "laguerre" else domain.lower
        n_nodes = max(800, 70 * spec.size) if n_nodes is None else n_nodes
        nodes, weights = composite_gauss_legendre(lower, domain.upper, n_nodes)
        phi = orthonormal_matrix(spec, nodes)
        gram = (phi * weights[:, None]).T @ phi
    if not np.all(np.isfinite(gram)):
        raise TruncationError("non-finite Gram matrix")
    if tol is not None:
        worst = np.max(np.abs(1.0 - np.diag(gram)))
        if worst > tol:
            raise TruncationError(
                f"diagonal of Gram matrix off by {worst:.3e} > {tol:.1e}; widen the domain")
    return gram
