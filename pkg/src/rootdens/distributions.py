"""Reference distributions with exact densities and samplers.

The four mixtures used in the continuous and discrete benchmarks plus a
wrapper around :class:`~rootdens.gausspoly.GaussPolyDensity`.  Every
distribution exposes ``pdf``, ``draw``, ``mean``, ``var`` and ``support``,
and serialises to a ``{"name": ..., **params}`` dict.
"""
import numpy as np
from scipy import stats

from .bases import SupportDomain, OutOfSupportError
from . import gausspoly

__all__ = [
    "NormalMixture",
    "ExpChiSqMixture",
    "BinomialMixture",
    "PoissonMixture",
    "GaussPolyTruth",
    "make_distribution",
    "PRESETS",
]


def _check_weights(weights, n_comp):
    w = np.asarray(weights, dtype=float)
    if w.shape != (n_comp,):
        raise ValueError(f"expected {n_comp} weights, got {w.shape}")
    if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights must be positive and sum to 1, got {weights}")
    return w


class _Mixture:
    name = None
    kind = None

    def _make_components(self):
        raise NotImplementedError

    def _components(self):
        # frozen scipy laws are slow to build; make them once
        if "_frozen" not in self.__dict__:
            self._frozen = self._make_components()
        return self._frozen

    @property
    def discrete(self):
        return self.kind in ("lattice", "naturals")

    def _check(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise OutOfSupportError("non-finite point")
        if self.kind == "half" and np.any(x < 0):
            raise OutOfSupportError(f"{self.name} is supported on x >= 0")
        return x

    def component_pdfs(self, x):
        x = self._check(x)
        f = "pmf" if self.discrete else "pdf"
        return [getattr(c, f)(x) for c in self._components()]

    def pdf(self, x):
        """Exact mixture density (pmf for discrete kinds)."""
        out = 0.0
        for w, p in zip(self.weights, self.component_pdfs(x)):
            out = out + w * p
        return out

    def draw(self, n, seed):
        """``n`` exact draws; component labels first, then per-component samples."""
        if int(n) != n or n < 1:
            raise ValueError(f"sample size must be a positive integer, got {n}")
        rng = np.random.default_rng(seed)
        labels = rng.choice(len(self.weights), size=int(n), p=self.weights)
        out = np.empty(int(n))
        for k, comp in enumerate(self._components()):
            idx = np.flatnonzero(labels == k)
            if idx.size:
                out[idx] = comp.rvs(size=idx.size, random_state=rng)
        return out

    def mean(self):
        return float(sum(w * c.mean() for w, c in zip(self.weights, self._components())))

    def var(self):
        m2 = sum(w * (c.var() + c.mean() ** 2) for w, c in zip(self.weights, self._components()))
        return float(m2 - self.mean() ** 2)

    def support(self):
        comps = self._components()
        hi = max(c.isf(1e-16) for c in comps)
        if self.kind == "real":
            lo = min(c.ppf(1e-16) for c in comps)
            return SupportDomain("real", float(lo), float(hi))
        if self.kind == "half":
            return SupportDomain("half", 0.0, float(hi))
        if self.kind == "lattice":
            return SupportDomain("lattice", 0, int(max(self.ns)))
        return SupportDomain("naturals", 0, int(hi) + 1)

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.to_dict().items() if k != "name")
        return f"{type(self).__name__}({args})"


class NormalMixture(_Mixture):
    name = "normal_mixture"
    kind = "real"

    def __init__(self, weights, means, sigmas):
        self.weights = _check_weights(weights, len(means))
        self.means = [float(m) for m in means]
        self.sigmas = [float(s) for s in sigmas]
        if len(self.sigmas) != len(self.means) or min(self.sigmas) <= 0:
            raise ValueError("need one positive sigma per component")

    def _make_components(self):
        return [stats.norm(m, s) for m, s in zip(self.means, self.sigmas)]

    def to_dict(self):
        return {"name": self.name, "weights": self.weights.tolist(),
                "means": self.means, "sigmas": self.sigmas}


class ExpChiSqMixture(_Mixture):
    """Exponential (given mean) mixed with a chi-squared law."""

    name = "exp_chisq_mixture"
    kind = "half"

    def __init__(self, weights, exp_mean, chisq_df):
        self.weights = _check_weights(weights, 2)
        self.exp_mean = float(exp_mean)
        self.chisq_df = int(chisq_df)
        if self.exp_mean <= 0 or self.chisq_df < 1 or self.chisq_df != chisq_df:
            raise ValueError("exp_mean must be positive and chisq_df a positive integer")

    def _make_components(self):
        # chi-squared(k) is gamma(k/2, scale=2)
        return [stats.expon(scale=self.exp_mean), stats.gamma(self.chisq_df / 2, scale=2.0)]

    def to_dict(self):
        return {"name": self.name, "weights": self.weights.tolist(),
                "exp_mean": self.exp_mean, "chisq_df": self.chisq_df}


class BinomialMixture(_Mixture):
    name = "binomial_mixture"
    kind = "lattice"

    def __init__(self, weights, ns, ps):
        self.weights = _check_weights(weights, len(ns))
        self.ns = [int(n) for n in ns]
        self.ps = [float(p) for p in ps]
        if len(self.ps) != len(self.ns) or not all(0 < p < 1 for p in self.ps):
            raise ValueError("need one p in (0, 1) per component")

    def _make_components(self):
        return [stats.binom(n, p) for n, p in zip(self.ns, self.ps)]

    def _check(self, x):
        x = super()._check(x)
        if np.any((x < 0) | (x > max(self.ns)) | (x != np.round(x))):
            raise OutOfSupportError(f"binomial mixture lives on 0..{max(self.ns)}")
        return x

    def to_dict(self):
        return {"name": self.name, "weights": self.weights.tolist(), "ns": self.ns, "ps": self.ps}


class PoissonMixture(_Mixture):
    name = "poisson_mixture"
    kind = "naturals"

    def __init__(self, weights, lambdas):
        self.weights = _check_weights(weights, len(lambdas))
        self.lambdas = [float(v) for v in lambdas]
        if min(self.lambdas) <= 0:
            raise ValueError("Poisson rates must be positive")

    def _make_components(self):
        return [stats.poisson(v) for v in self.lambdas]

    def _check(self, x):
        x = super()._check(x)
        if np.any((x < 0) | (x != np.round(x))):
            raise OutOfSupportError("Poisson mixture lives on the non-negative integers")
        return x

    def to_dict(self):
        return {"name": self.name, "weights": self.weights.tolist(), "lambdas": self.lambdas}


class GaussPolyTruth:
    """``f(x) exp(-x**2)`` truth, given explicitly or as ``|q|**2`` for a seeded random ``q``."""

    name = "gauss_poly"
    kind = "real"
    discrete = False

    def __init__(self, coeffs=None, random_degree=None, poly_seed=None):
        if (coeffs is None) == (random_degree is None):
            raise ValueError("give either coeffs or random_degree (with poly_seed)")
        if coeffs is not None:
            self.density = gausspoly.validate_and_normalize(coeffs)
        else:
            self.density = gausspoly.random_gauss_poly(int(random_degree), poly_seed)
        self._params = ({"coeffs": [float(a) for a in coeffs]} if coeffs is not None
                        else {"random_degree": int(random_degree), "poly_seed": poly_seed})

    @property
    def n_pairs(self):
        return self.density.n_pairs

    def pdf(self, x):
        return self.density.pdf(x)

    def draw(self, n, seed):
        return gausspoly.sample_gauss_poly(self.density, n, seed)

    def mean(self):
        return float(self.density.mean())

    def var(self):
        return float(self.density.var())

    def support(self):
        return SupportDomain("real", -10.0, 10.0)

    def to_dict(self):
        return {"name": self.name, **self._params}

    def __repr__(self):
        return f"GaussPolyTruth({self._params})"


_KINDS = {cls.name: cls for cls in
          (NormalMixture, ExpChiSqMixture, BinomialMixture, PoissonMixture, GaussPolyTruth)}

PRESETS = {
    "fig1_upper": {"name": "normal_mixture", "weights": [0.7, 0.3],
                   "means": [0.0, 3.0], "sigmas": [1.0, 1.0]},
    "fig1_lower": {"name": "exp_chisq_mixture", "weights": [0.5, 0.5],
                   "exp_mean": 2.0, "chisq_df": 12},
    "fig2_upper": {"name": "binomial_mixture", "weights": [2 / 3, 1 / 3],
                   "ns": [100, 100], "ps": [0.45, 0.55]},
    "fig2_lower": {"name": "poisson_mixture", "weights": [1 / 3, 2 / 3],
                   "lambdas": [2.0, 5.0]},
}


def make_distribution(spec):
    """Build a distribution from a preset name or a ``{"name": ..., **params}`` dict."""
    if isinstance(spec, str):
        if spec not in PRESETS:
            raise ValueError(f"unknown distribution preset {spec!r}; known: {sorted(PRESETS)}")
        spec = PRESETS[spec]
    spec = dict(spec)
    name = spec.pop("name", None)
    if name in PRESETS:
        return make_distribution({**PRESETS[name], **spec})
    if name not in _KINDS:
        raise ValueError(f"unknown distribution {name!r}; known: {sorted(_KINDS)}")
    return _KINDS[name](**spec)
