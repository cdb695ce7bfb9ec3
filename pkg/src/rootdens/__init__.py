"""Root density estimation: densities as squared moduli of psi-functions.

A density is written as ``p(x) = |psi(x)|**2`` with ``psi`` expanded in an
orthonormal basis (Hermite, Laguerre, Kravchuk or Charlier functions); the
expansion coefficients are fitted by maximum likelihood.  The package also
ships the classical kernel and projection estimators, exact reference
distributions, the Gaussian-times-polynomial family whose psi-functions are
known in closed form, and a reproducible Monte Carlo comparison harness.
"""
from .bases import (BasisSpec, SupportDomain, OutOfSupportError, TruncationError,
                    basis_matrix, orthonormal_matrix, basis_value, gram_check, default_domain)
from .estimator import (FitOptions, PsiCoefficients, ZeroPsiAtDataPoint, MaxItersExceeded,
                        fit_root, psi_value, density, likelihood_map, log_likelihood)
from .baselines import kernel_fit, projection_fit, frequency_fit
from .gausspoly import validate_and_normalize, build_psi, random_gauss_poly, sample_gauss_poly
from .distributions import make_distribution
from .bench import l1_error, ExperimentConfig, run_trial, run_experiment, emit_report

__version__ = "0.1.0"
