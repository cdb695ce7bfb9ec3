"""Discrete data: Kravchuk and Charlier bases.

A binomial mixture lives on {0, ..., 100} and a Poisson mixture on the
non-negative integers.  The root estimator with a moment-matched frame is
compared with the empirical frequencies and with a single moment-matched
binomial or Poisson law.
"""
from rootdens import BasisSpec, fit_root, frequency_fit, l1_error, make_distribution
from rootdens.baselines import binomial_fit, poisson_fit

cases = [("fig2_upper", "kravchuk", 100, lambda x: binomial_fit(x, 100)),
         ("fig2_lower", "charlier", None, poisson_fit)]

for preset, family, N, single in cases:
    truth = make_distribution(preset)
    x = truth.draw(300, seed=11)
    print(f"{preset}: {truth!r}")
    for s in (4, 6, 8):
        c = fit_root(x, BasisSpec.from_sample(family, s, x, n_trials=N))
        print(f"  {family} s={s}: L1 error {l1_error(truth, c):.4f} ({c.n_iter} iterations)")
    print(f"  frequencies: {l1_error(truth, frequency_fit(x)):.4f}")
    print(f"  single law:  {l1_error(truth, single(x)):.4f}\n")
