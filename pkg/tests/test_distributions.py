import numpy as np
import pytest
from scipy import integrate, stats

from rootdens.bases import OutOfSupportError
from rootdens.distributions import (BinomialMixture, GaussPolyTruth, NormalMixture,
                                    PRESETS, make_distribution)


def test_normal_mixture_density_values():
    d = make_distribution("fig1_upper")
    assert d.pdf(0.0) == pytest.approx(0.7 * stats.norm.pdf(0) + 0.3 * stats.norm.pdf(-3))
    assert d.pdf(0.0) == pytest.approx(0.280590, abs=1e-6)


def test_exp_chisq_density_values():
    d = make_distribution("fig1_lower")
    x = 4.0
    expected = 0.5 * np.exp(-x / 2) / 2 + 0.5 * stats.chi2.pdf(x, 12)
    assert d.pdf(x) == pytest.approx(expected, rel=1e-12)
    assert d.pdf(x) == pytest.approx(0.5 * stats.expon.pdf(4, scale=2)
                                     + 0.5 * stats.chi2.pdf(4, 12), rel=1e-12)


def test_discrete_pmf_values():
    d = make_distribution("fig2_lower")
    assert d.pdf(3.0) == pytest.approx(stats.poisson.pmf(3, 2) / 3 + 2 * stats.poisson.pmf(3, 5) / 3)
    b = make_distribution("fig2_upper")
    assert b.pdf(50.0) == pytest.approx(2 / 3 * stats.binom.pmf(50, 100, 0.45)
                                        + 1 / 3 * stats.binom.pmf(50, 100, 0.55))
    assert b.pdf(np.arange(101.0)).sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name", list(PRESETS))
def test_preset_moments(name):
    d = make_distribution(name)
    x = d.draw(40000, seed=1)
    sd = np.sqrt(d.var())
    assert abs(np.mean(x) - d.mean()) < 5 * sd / np.sqrt(x.size)
    assert np.var(x) == pytest.approx(d.var(), rel=0.05)


def test_continuous_draws_pass_ks():
    for name in ("fig1_upper", "fig1_lower"):
        d = make_distribution(name)
        x = d.draw(3000, seed=2)
        dom = d.support()
        cdf = lambda t: np.array([integrate.quad(d.pdf, dom.lower, v)[0]
                                  for v in np.atleast_1d(t)])
        assert stats.kstest(x, cdf).pvalue > 1e-3


def test_discrete_draws_on_lattice():
    x = make_distribution("fig2_upper").draw(500, seed=3)
    assert np.all(x == np.round(x)) and x.min() >= 0 and x.max() <= 100
    y = make_distribution("fig2_lower").draw(500, seed=3)
    assert np.all(y == np.round(y)) and y.min() >= 0


def test_known_means():
    assert make_distribution("fig1_upper").mean() == pytest.approx(0.9)
    assert make_distribution("fig1_lower").mean() == pytest.approx(7.0)
    assert make_distribution("fig2_lower").mean() == pytest.approx(4.0)


def test_draw_is_seeded():
    d = make_distribution("fig1_lower")
    np.testing.assert_array_equal(d.draw(50, 7), d.draw(50, 7))
    assert not np.array_equal(d.draw(50, 7), d.draw(50, 8))


def test_support_checks():
    with pytest.raises(OutOfSupportError):
        make_distribution("fig1_lower").pdf(-1.0)
    with pytest.raises(OutOfSupportError):
        make_distribution("fig2_upper").pdf(101.0)
    with pytest.raises(OutOfSupportError):
        make_distribution("fig2_lower").pdf(1.5)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        NormalMixture([0.5, 0.6], [0, 1], [1, 1])
    with pytest.raises(ValueError):
        NormalMixture([0.5, 0.5], [0, 1], [1, -1])
    with pytest.raises(ValueError):
        BinomialMixture([1.0], [10], [1.5])
    with pytest.raises(ValueError):
        make_distribution("nope")
    with pytest.raises(ValueError):
        make_distribution("fig1_upper").draw(0, 1)


def test_dict_round_trip_and_overrides():
    d = make_distribution({"name": "poisson_mixture", "weights": [0.5, 0.5], "lambdas": [1, 9]})
    assert make_distribution(d.to_dict()).to_dict() == d.to_dict()
    e = make_distribution({"name": "fig1_upper", "means": [0.0, 4.0]})
    assert e.means == [0.0, 4.0] and e.sigmas == [1.0, 1.0]


def test_gauss_poly_truth():
    t = GaussPolyTruth(random_degree=2, poly_seed=2)
    assert t.n_pairs == 2
    mass, _ = integrate.quad(t.pdf, -10, 10)
    assert mass == pytest.approx(1.0, abs=1e-10)
    x = t.draw(1000, seed=1)
    assert x.shape == (1000,) and np.all(np.abs(x) <= 10)
    assert make_distribution(t.to_dict()).pdf(0.3) == t.pdf(0.3)
    with pytest.raises(ValueError):
        GaussPolyTruth()
