import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special, stats

from rootdens.bases import (BasisSpec, OutOfSupportError, SupportDomain, TruncationError,
                            basis_matrix, basis_value, default_domain, gram_check,
                            orthonormal_matrix)


def hermite_oracle(k, z):
    # physicists' Hermite polynomial from scipy, normalised explicitly
    norm = math.sqrt(2.0 ** k * math.factorial(k) * math.sqrt(math.pi))
    return special.eval_hermite(k, z) * np.exp(-z * z / 2) / norm


def gram_schmidt_oracle(points, weights, size):
    # orthonormal polynomials times sqrt(weight), by QR of a scaled Vandermonde
    t = (points - np.average(points, weights=weights)) / np.sqrt(np.average(
        (points - np.average(points, weights=weights)) ** 2, weights=weights))
    V = np.vander(t, size, increasing=True) * np.sqrt(weights)[:, None]
    q, r = np.linalg.qr(V)
    return q * np.sign(np.diag(r))


def test_hermite_third_function_closed_form():
    z = np.linspace(-4, 4, 33)
    spec = BasisSpec("hermite", 4, scale=1 / math.sqrt(2))
    expected = (8 * z ** 3 - 12 * z) * np.exp(-z * z / 2) / math.sqrt(48 * math.sqrt(math.pi))
    np.testing.assert_allclose(basis_matrix(spec, z)[:, 3], expected, atol=1e-14)


@pytest.mark.parametrize("k", [0, 1, 2, 5, 10, 20])
def test_hermite_matches_scipy_polynomials(k):
    z = np.linspace(-5, 5, 41)
    spec = BasisSpec("hermite", 21, scale=1 / math.sqrt(2))
    np.testing.assert_allclose(basis_matrix(spec, z)[:, k], hermite_oracle(k, z), atol=1e-12)


@pytest.mark.parametrize("k", [0, 1, 2, 7, 15])
def test_laguerre_matches_scipy_polynomials(k):
    z = np.linspace(0, 30, 61)
    spec = BasisSpec("laguerre", 16)
    expected = special.eval_laguerre(k, z) * np.exp(-z / 2)
    np.testing.assert_allclose(basis_matrix(spec, z)[:, k], expected, atol=1e-11)


def test_kravchuk_matches_gram_schmidt():
    N, p, s = 20, 0.3, 6
    x = np.arange(N + 1, dtype=float)
    oracle = gram_schmidt_oracle(x, stats.binom.pmf(x, N, p), s)
    phi = basis_matrix(BasisSpec("kravchuk", s, n_trials=N, p=p), x)
    # same functions up to the sign convention of each column
    for k in range(s):
        sgn = np.sign(phi[:, k] @ oracle[:, k])
        np.testing.assert_allclose(phi[:, k], sgn * oracle[:, k], atol=1e-10)


def test_charlier_matches_gram_schmidt():
    lam, s = 3.0, 6
    x = np.arange(80, dtype=float)
    oracle = gram_schmidt_oracle(x, stats.poisson.pmf(x, lam), s)
    phi = basis_matrix(BasisSpec("charlier", s, lam=lam), x)
    for k in range(s):
        sgn = np.sign(phi[:, k] @ oracle[:, k])
        np.testing.assert_allclose(phi[:, k], sgn * oracle[:, k], atol=1e-10)


@pytest.mark.parametrize("spec, tol", [
    (BasisSpec("hermite", 12), 1e-8),
    (BasisSpec("hermite", 40, shift=-3.0, scale=2.5), 1e-8),
    (BasisSpec("laguerre", 12), 1e-8),
    (BasisSpec("laguerre", 30, scale=4.0), 1e-8),
    (BasisSpec("kravchuk", 12, n_trials=100, p=0.45), 1e-10),
    (BasisSpec("charlier", 12, lam=5.0), 1e-10),
    (BasisSpec("charlier", 8, lam=0.2), 1e-10),
])
def test_gram_is_identity(spec, tol):
    gram = gram_check(spec)
    assert np.max(np.abs(gram - np.eye(spec.size))) <= tol


def test_ground_states_are_reference_laws():
    x = np.linspace(-6, 10, 50)
    h = BasisSpec("hermite", 1, shift=2.0, scale=1.7)
    np.testing.assert_allclose(orthonormal_matrix(h, x)[:, 0] ** 2,
                               stats.norm.pdf(x, 2.0, 1.7), rtol=1e-12)
    y = np.linspace(0, 20, 50)
    lg = BasisSpec("laguerre", 1, scale=3.0)
    np.testing.assert_allclose(orthonormal_matrix(lg, y)[:, 0] ** 2,
                               stats.expon.pdf(y, scale=3.0), rtol=1e-12)
    k = np.arange(11.0)
    kr = BasisSpec("kravchuk", 1, n_trials=10, p=0.3)
    np.testing.assert_allclose(basis_matrix(kr, k)[:, 0] ** 2, stats.binom.pmf(k, 10, 0.3),
                               rtol=1e-12)
    ch = BasisSpec("charlier", 1, lam=4.0)
    np.testing.assert_allclose(basis_matrix(ch, k)[:, 0] ** 2, stats.poisson.pmf(k, 4.0),
                               rtol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(0.2, 5), st.integers(1, 15))
def test_hermite_orthonormal_in_data_units(shift, scale, size):
    spec = BasisSpec("hermite", size, shift=shift, scale=scale)
    gram = gram_check(spec)
    assert np.max(np.abs(gram - np.eye(size))) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.floats(-50, 50), st.integers(1, 12))
def test_basis_value_agrees_with_matrix(x, k):
    spec = BasisSpec("hermite", 13, scale=3.0)
    assert basis_value(spec, k, x) == pytest.approx(orthonormal_matrix(spec, x)[k] /
                                                    np.sqrt(spec.jacobian), abs=1e-15)


def test_basis_value_order_out_of_range():
    spec = BasisSpec("hermite", 4)
    with pytest.raises(IndexError):
        basis_value(spec, 4, 0.0)
    with pytest.raises(IndexError):
        basis_value(spec, -1, 0.0)


@pytest.mark.parametrize("spec, x", [
    (BasisSpec("laguerre", 3), -0.5),
    (BasisSpec("kravchuk", 3, n_trials=10, p=0.5), 11.0),
    (BasisSpec("kravchuk", 3, n_trials=10, p=0.5), 2.5),
    (BasisSpec("charlier", 3, lam=1.0), -1.0),
    (BasisSpec("hermite", 3), np.nan),
])
def test_out_of_support(spec, x):
    with pytest.raises(OutOfSupportError):
        orthonormal_matrix(spec, np.array([x]))


@pytest.mark.parametrize("kwargs", [
    dict(family="hermite", size=0),
    dict(family="hermite", size=3, scale=0.0),
    dict(family="legendre", size=3),
    dict(family="kravchuk", size=3, n_trials=10),
    dict(family="kravchuk", size=3, n_trials=10, p=1.0),
    dict(family="kravchuk", size=12, n_trials=10, p=0.5),
    dict(family="charlier", size=3, lam=-1.0),
])
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        BasisSpec(**kwargs)


def test_spec_round_trip():
    for spec in (BasisSpec("hermite", 5, shift=1.5, scale=2.0),
                 BasisSpec("kravchuk", 4, n_trials=30, p=0.2),
                 BasisSpec("charlier", 4, lam=2.5)):
        assert BasisSpec.from_dict(spec.to_dict()) == spec


def test_from_sample_moment_matching():
    x = np.array([1.0, 2.0, 4.0, 5.0])
    h = BasisSpec.from_sample("hermite", 3, x)
    assert h.shift == 3.0 and h.scale == pytest.approx(np.std(x, ddof=1))
    assert BasisSpec.from_sample("laguerre", 3, x).scale == 3.0
    assert BasisSpec.from_sample("kravchuk", 3, x, n_trials=10).p == pytest.approx(0.3)
    assert BasisSpec.from_sample("charlier", 3, x).lam == 3.0


def test_truncated_domain_is_detected():
    spec = BasisSpec("hermite", 20)
    with pytest.raises(TruncationError):
        gram_check(spec, domain=SupportDomain("real", -1.0, 1.0), tol=1e-6)
    gram_check(spec, tol=1e-8)


def test_charlier_domain_covers_tail():
    spec = BasisSpec("charlier", 10, lam=30.0)
    dom = default_domain(spec)
    assert dom.kind == "naturals" and dom.upper > 30 + 10 * np.sqrt(30)


def test_large_order_stays_finite():
    spec = BasisSpec("hermite", 200)
    phi = basis_matrix(spec, np.linspace(-30, 30, 101))
    assert np.all(np.isfinite(phi))
    assert np.max(np.abs(gram_check(spec) - np.eye(200))) < 1e-8
