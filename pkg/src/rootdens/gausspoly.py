"""Densities of the form ``f(x) exp(-x**2)`` with a non-negative polynomial ``f``.

Such a density is the squared modulus of a psi-function
``sqrt(a) exp(-x**2 / 2) prod_j (x - y_j)`` where the ``y_j`` pick one root
out of each conjugate pair of ``f``.  Every choice (a bit mask over the
pairs) gives the same density but a different, generally complex,
psi-function.  :func:`build_psi` expands any of them exactly in the Hermite
basis of size ``n + 1``.
"""
from dataclasses import dataclass
from math import factorial, gamma, pi, sqrt

import numpy as np
from numpy.polynomial import polynomial as P

from .bases import BasisSpec
from .estimator import PsiCoefficients

__all__ = [
    "GaussPolyError",
    "OddDegree",
    "NegativeLeadingCoeff",
    "DensityNegative",
    "PairingFailure",
    "GaussPolyDensity",
    "PsiSelection",
    "HERMITE_FRAME",
    "validate_and_normalize",
    "poly_roots",
    "psi_hermite_coeffs",
    "build_psi",
    "density_of_psi_check",
    "sample_gauss_poly",
    "random_gauss_poly",
    "gaussian_moment",
]

MAX_DEGREE = 20
# Basis frame with z = x: the ground state is exp(-x**2) / sqrt(pi).
HERMITE_FRAME = {"shift": 0.0, "scale": 1.0 / sqrt(2.0)}


class GaussPolyError(ValueError):
    pass


class OddDegree(GaussPolyError):
    pass


class NegativeLeadingCoeff(GaussPolyError):
    pass


class DensityNegative(GaussPolyError):
    def __init__(self, x, value):
        super().__init__(f"f({x:.6g}) = {value:.3e} < 0")
        self.x = x
        self.value = value


class PairingFailure(GaussPolyError):
    pass


def gaussian_moment(m):
    """Integral of ``x**m exp(-x**2)`` over the real line."""
    return 0.0 if m % 2 else gamma((m + 1) / 2)


@dataclass(frozen=True, eq=False)
class GaussPolyDensity:
    """Validated density ``f(x) exp(-x**2) / Z``.

    ``coeffs`` are the ascending coefficients of ``f / Z`` (so the density
    integrates to one); ``raw_coeffs`` and ``norm`` keep the input and ``Z``.
    """

    coeffs: np.ndarray
    raw_coeffs: np.ndarray
    norm: float

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def n_pairs(self):
        return self.degree // 2

    def poly(self, x):
        return P.polyval(np.asarray(x, dtype=float), self.coeffs)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return self.poly(x) * np.exp(-x * x)

    def mean(self):
        return sum(a * gaussian_moment(m + 1) for m, a in enumerate(self.coeffs))

    def var(self):
        m2 = sum(a * gaussian_moment(m + 2) for m, a in enumerate(self.coeffs))
        return m2 - self.mean() ** 2


@dataclass(frozen=True)
class PsiSelection:
    """One root per conjugate pair (``Im >= 0``) plus a choice mask.

    Bit ``j`` of ``mask`` set means ``y_j = conj(z_j)`` instead of ``z_j``.
    """

    roots: tuple
    mask: tuple

    def chosen(self):
        return np.array([np.conj(z) if b else z for z, b in zip(self.roots, self.mask)],
                        dtype=complex)

    def with_mask(self, mask):
        mask = tuple(int(bool(b)) for b in mask)
        if len(mask) != len(self.roots):
            raise ValueError(f"mask of length {len(mask)} for {len(self.roots)} root pairs")
        return PsiSelection(self.roots, mask)


def _trim(coeffs):
    c = np.asarray(coeffs, dtype=float).ravel()
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise GaussPolyError("polynomial coefficients must be a non-empty finite list")
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        raise NegativeLeadingCoeff("zero polynomial")
    return c[:nz[-1] + 1]


def _negative_witness(c, extra_points):
    grid = np.linspace(-10.0, 10.0, 4001)
    crit = P.polyroots(P.polyder(c)) if len(c) > 2 else np.array([])
    pts = np.concatenate([grid, np.real(crit), np.asarray(extra_points, dtype=float)])
    pts = pts[np.isfinite(pts)]
    vals = P.polyval(pts, c)
    scale = P.polyval(np.abs(pts), np.abs(c))
    bad = vals < -1e-10 * scale
    if np.any(bad):
        k = np.argmin(np.where(bad, vals / scale, np.inf))
        return float(pts[k]), float(vals[k])
    return None


def validate_and_normalize(poly_coeffs):
    """Validate ``f`` and normalise ``f(x) exp(-x**2)`` to unit mass.

    Parameters
    ----------
    poly_coeffs : sequence of float
        Ascending coefficients ``a_0 .. a_2n`` of ``f``.

    Raises
    ------
    OddDegree, NegativeLeadingCoeff, DensityNegative
    """
    c = _trim(poly_coeffs)
    if (len(c) - 1) % 2:
        raise OddDegree(f"degree {len(c) - 1} is odd")
    if c[-1] <= 0:
        raise NegativeLeadingCoeff(f"leading coefficient {c[-1]} is not positive")
    if len(c) - 1 > 2 * MAX_DEGREE:
        raise GaussPolyError(f"degree above {2 * MAX_DEGREE} not supported")
    roots = P.polyroots(c) if len(c) > 1 else np.array([])
    witness = _negative_witness(c, np.real(roots))
    if witness is not None:
        raise DensityNegative(*witness)
    Z = float(sum(a * gaussian_moment(m) for m, a in enumerate(c)))
    if not Z > 0:
        raise GaussPolyError("non-positive normalisation constant")
    return GaussPolyDensity(coeffs=c / Z, raw_coeffs=c, norm=Z)


def poly_roots(density):
    """Roots of ``f`` grouped into conjugate pairs.

    Complex roots pair with their conjugate within ``1e-8 (1 + |z|)``.
    Numerically real roots are paired with their nearest real neighbour;
    the split of a multiple real root grows like ``eps**(1/m)``, so these
    pairs are accepted up to ``1e-3 (1 + |z|)`` and replaced by their mean
    (validation has already ruled out a sign change between them).

    Returns
    -------
    PsiSelection
        Representatives with ``Im z >= 0`` and an all-zero mask.
    """
    c = density.coeffs
    if len(c) == 1:
        return PsiSelection((), ())
    roots = list(P.polyroots(c))
    tol = lambda z: 1e-8 * (1.0 + abs(z))
    real = sorted((z.real for z in roots if abs(z.imag) <= tol(z)))
    cplx = [z for z in roots if abs(z.imag) > tol(z)]
    pairs = []
    upper = sorted((z for z in cplx if z.imag > 0), key=lambda z: (z.real, z.imag))
    lower = [z for z in cplx if z.imag < 0]
    if len(upper) != len(lower):
        raise PairingFailure("unbalanced complex roots")
    for z in upper:
        k = int(np.argmin([abs(w - np.conj(z)) for w in lower]))
        w = lower.pop(k)
        if abs(w - np.conj(z)) > tol(z):
            raise PairingFailure(f"root {z} has no conjugate partner (closest {w})")
        pairs.append(0.5 * (z + np.conj(w)))
    if len(real) % 2:
        raise PairingFailure("odd number of real roots")
    for a, b in zip(real[::2], real[1::2]):
        if b - a > 1e-3 * (1.0 + abs(a)):
            raise PairingFailure(f"real roots {a} and {b} do not form an even-multiplicity pair")
        pairs.append(complex(0.5 * (a + b), 0.0))
    pairs.sort(key=lambda z: (z.real, z.imag))
    return PsiSelection(tuple(complex(z) for z in pairs), (0,) * len(pairs))


def _monomial_to_hermite(n):
    # row m: x**m = sum_k T[m, k] H_k(x), from x H_k = H_{k+1} / 2 + k H_{k-1}
    T = np.zeros((n + 1, n + 1))
    T[0, 0] = 1.0
    for m in range(n):
        for k in range(m + 1):
            T[m + 1, k + 1] += 0.5 * T[m, k]
            if k:
                T[m + 1, k - 1] += k * T[m, k]
    return T


def psi_hermite_coeffs(density, mask=None, selection=None):
    """Raw (un-renormalised) Hermite coefficients of the chosen psi-function.

    Their squared norm equals the mass of the density, so it is 1 up to
    round-off for a correctly normalised ``density``.
    """
    sel = poly_roots(density) if selection is None else selection
    n = len(sel.roots)
    if n > MAX_DEGREE:
        raise GaussPolyError(f"psi degree {n} above {MAX_DEGREE}")
    sel = sel.with_mask((0,) * n if mask is None else mask)
    g = np.array([1.0 + 0j])
    for y in sel.chosen():
        g = P.polymul(g, [-y, 1.0])
    g = g * np.sqrt(density.coeffs[-1])
    d = g @ _monomial_to_hermite(n)
    norms = np.array([sqrt(2.0 ** k * factorial(k) * sqrt(pi)) for k in range(n + 1)])
    return d * norms


def build_psi(density, mask=None, selection=None):
    """Hermite-basis coefficients of the psi-function picked by ``mask``.

    The psi-function ``sqrt(a_2n) exp(-x**2 / 2) prod_j (x - y_j)`` (with
    the normalised leading coefficient) is expanded exactly; the result lives
    in a Hermite basis of size ``n + 1`` with ``z = x``.
    """
    c = psi_hermite_coeffs(density, mask, selection)
    return PsiCoefficients(BasisSpec("hermite", len(c), **HERMITE_FRAME), c)


def density_of_psi_check(density, c):
    """Max of ``|P(x) - |psi(x)|**2|`` over 2001 points on [-8, 8]."""
    x = np.linspace(-8.0, 8.0, 2001)
    return float(np.max(np.abs(density.pdf(x) - c.pdf(x))))


def _cdf_table(density, lower=-10.0, upper=10.0, n_cells=20000):
    from ._quad import panel_rule
    edges = np.linspace(lower, upper, n_cells + 1)
    nodes, weights = panel_rule(edges, order=6)
    mass = (density.pdf(nodes) * weights).reshape(n_cells, -1).sum(axis=1)
    cdf = np.concatenate([[0.0], np.cumsum(mass)])
    return edges, cdf / cdf[-1]


def sample_gauss_poly(density, n_samples, seed):
    """Draw by inverting the tabulated CDF on [-10, 10]."""
    if int(n_samples) != n_samples or n_samples < 1:
        raise ValueError(f"n_samples must be a positive integer, got {n_samples}")
    edges, cdf = _cdf_table(density)
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    u = np.random.default_rng(seed).random(int(n_samples))
    return np.interp(u, cdf[keep], edges[keep])


def random_gauss_poly(n, seed):
    """``f = |q|**2`` for a random complex polynomial ``q`` of degree ``n``.

    ``q`` has standard complex normal coefficients; the result is always a
    valid density of degree ``2n``.
    """
    rng = np.random.default_rng(seed)
    q = (rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)) / np.sqrt(2.0)
    f = P.polymul(q, np.conj(q)).real
    return validate_and_normalize(f)
