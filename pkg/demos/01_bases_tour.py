"""A tour of the four orthonormal families.

Each family is built on a classical orthogonal polynomial system and
normalised so that the *functions* are orthonormal.  Squaring the first
function gives the reference law of that family, and the numerical Gram
matrix shows how close to the identity the functions really are.
"""
import numpy as np
from scipy import stats

from rootdens import BasisSpec, gram_check, orthonormal_matrix

specs = [
    BasisSpec("hermite", 12, shift=1.0, scale=2.0),
    BasisSpec("laguerre", 12, scale=3.0),
    BasisSpec("kravchuk", 12, n_trials=100, p=0.45),
    BasisSpec("charlier", 12, lam=5.0),
]

print("family     size  max|G - I|")
for spec in specs:
    err = np.max(np.abs(gram_check(spec) - np.eye(spec.size)))
    print(f"{spec.family:9s}  {spec.size:4d}  {err:.2e}")

# The ground state squared is the reference law of the frame.
x = np.linspace(-5, 7, 7)
phi0 = orthonormal_matrix(specs[0], x)[:, 0]
print("\nhermite ground state squared vs N(1, 2^2):")
print(np.column_stack([x, phi0 ** 2, stats.norm.pdf(x, 1.0, 2.0)]))

k = np.arange(0, 11.0)
phi0 = orthonormal_matrix(specs[3], k)[:, 0]
print("\ncharlier ground state squared vs Poisson(5):")
print(np.column_stack([k, phi0 ** 2, stats.poisson.pmf(k, 5.0)]))

# Recurrences keep high orders finite far into the tails.
big = BasisSpec("hermite", 200)
print("\nhermite s=200, max |G - I| =", np.max(np.abs(gram_check(big) - np.eye(200))))
