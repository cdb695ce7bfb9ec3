"""Gaussian-times-polynomial densities and their many psi-functions.

For p(x) = f(x) exp(-x^2) with f >= 0 of degree 2n, each conjugate pair of
roots of f offers two choices for the root kept in psi, so there are 2^n
different psi-functions, all with |psi|^2 = p.  They expand exactly in n+1
Hermite functions.  A maximum-likelihood fit from a sample recovers one of
them, which is why complex coefficients are needed here.
"""
import itertools

import numpy as np

from rootdens import BasisSpec, FitOptions, fit_root, l1_error
from rootdens.distributions import GaussPolyTruth
from rootdens.gausspoly import HERMITE_FRAME, build_psi, density_of_psi_check, poly_roots

truth = GaussPolyTruth(random_degree=2, poly_seed=2)
d = truth.density
print("f coefficients (normalised):", np.round(d.coeffs, 4))
print("root representatives:", np.round(poly_roots(d).roots, 4))

for mask in itertools.product((0, 1), repeat=d.n_pairs):
    c = build_psi(d, mask)
    print(f"mask {mask}: coeffs {np.round(c.coeffs, 4)}  "
          f"max |p - |psi|^2| = {density_of_psi_check(d, c):.1e}")

x = truth.draw(1000, seed=7)
basis = BasisSpec("hermite", d.n_pairs + 1, **HERMITE_FRAME)
fit = fit_root(x, basis, FitOptions(complex_start=True))
print(f"\nfit from 1000 draws: {fit.n_iter} iterations, coeffs {np.round(fit.coeffs, 4)}")
print(f"L1 error of the fitted density: {l1_error(truth, fit):.4f}")
