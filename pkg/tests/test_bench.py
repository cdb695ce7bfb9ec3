import csv
import filecmp
import json
import numpy as np
import pytest
from scipy import integrate, stats

from rootdens.bases import BasisSpec, SupportDomain
from rootdens.baselines import projection_basis, projection_fit
from rootdens.bench import (ExperimentConfig, ExperimentReport, TrialResult, builtin_experiment,
                            emit_report, fit_trial, format_summary, headline_size, l1_error,
                            run_experiment, run_trial, trial_seed)
from rootdens.distributions import NormalMixture, make_distribution
from rootdens.estimator import fit_root


class Frozen:
    def __init__(self, dist, discrete=False):
        self.dist, self.discrete = dist, discrete

    def pdf(self, x):
        return self.dist.pmf(x) if self.discrete else self.dist.pdf(x)


class PointMass:
    discrete = True

    def __init__(self, k):
        self.k = k

    def pdf(self, x):
        return (np.asarray(x) == self.k).astype(float)

    def support(self):
        return SupportDomain("lattice", 0, 5)

    def mean(self):
        return float(self.k)

    def var(self):
        return 0.0


def test_identical_densities_have_zero_distance():
    truth = make_distribution("fig1_upper")
    assert l1_error(truth, truth) <= 1e-9
    t2 = make_distribution("fig1_lower")
    assert l1_error(t2, t2) <= 1e-9


def test_shifted_gaussians_closed_form():
    truth = NormalMixture([1.0], [0.0], [1.0])
    exact = 2 * (2 * stats.norm.cdf(0.05) - 1)
    # 30-digit value of the same expression
    assert exact == pytest.approx(0.0797552233534899, abs=1e-12)
    assert l1_error(truth, Frozen(stats.norm(0.1, 1.0))) == pytest.approx(exact, abs=1e-10)
    for mu in (0.5, 2.0, 7.0):
        closed = 2 * (2 * stats.norm.cdf(mu / 2) - 1)
        assert l1_error(truth, Frozen(stats.norm(mu, 1.0))) == pytest.approx(closed, abs=1e-9)


def test_disjoint_point_masses():
    assert l1_error(PointMass(1), PointMass(3)) == 2.0


def test_sign_changing_estimate_against_quad():
    truth = make_distribution("fig1_upper")
    x = truth.draw(200, seed=4)
    est = projection_fit(x, projection_basis("hermite", 8, x))
    g = np.linspace(-15, 18, 4001)
    assert est.pdf(g).min() < 0
    f = lambda t: abs(est.pdf(t) - truth.pdf(t))
    ref = integrate.quad(f, -40, 40, limit=1000, epsabs=1e-12, epsrel=1e-12)[0]
    assert l1_error(truth, est) == pytest.approx(ref, abs=1e-8)


def test_discrete_full_and_truncated_sums_agree():
    truth = make_distribution("fig2_lower")
    x = truth.draw(300, seed=1)
    est = fit_root(x, BasisSpec.from_sample("charlier", 6, x))
    auto = l1_error(truth, est)
    wide = l1_error(truth, est, upper=400)
    assert abs(auto - wide) <= 1e-10


def test_lattice_sum_is_exact():
    truth = make_distribution("fig2_upper")
    est = Frozen(stats.binom(100, 0.5), discrete=True)
    k = np.arange(101.0)
    assert l1_error(truth, est) == pytest.approx(np.sum(np.abs(truth.pdf(k) - est.pdf(k))),
                                                 abs=1e-15)


@pytest.mark.parametrize("name", ["table1", "fig1_lower", "fig2_upper", "fig2_lower"])
def test_deltas_are_bounded(name):
    cfg = builtin_experiment(name, sizes=[headline_size(name)])[0]
    for t in range(2):
        r = run_trial(cfg, t)
        assert r.ok
        assert all(0 <= d <= 2 + 1e-6 for d in r.deltas.values())


def test_trial_seeds_shared_across_sizes():
    a, b = builtin_experiment("table1", sizes=[4, 6])
    assert trial_seed(a, 3) == trial_seed(b, 3)
    np.testing.assert_array_equal(fit_trial(a, 3)[1], fit_trial(b, 3)[1])
    assert trial_seed(a, 3) != trial_seed(a, 4)
    c = builtin_experiment("table1", sizes=[4], base_seed=1)[0]
    assert trial_seed(c, 3) != trial_seed(a, 3)


def test_run_trial_is_deterministic():
    cfg = builtin_experiment("fig2_upper", sizes=[5])[0]
    assert run_trial(cfg, 2) == run_trial(cfg, 2)


def _read_csv(path):
    with open(path, encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_serial_and_parallel_reports_are_identical(tmp_path):
    cfg = builtin_experiment("fig2_lower", sizes=[5])[0]
    serial = run_experiment(cfg, 6, jobs=1)
    parallel = run_experiment(cfg, 6, jobs=3)
    a = emit_report(serial, tmp_path / "a", plot_trials=[1])
    b = emit_report(parallel, tmp_path / "b", plot_trials=[1])
    for pa, pb in zip(a, b):
        assert filecmp.cmp(pa, pb, shallow=False)


def test_summary_recomputable_from_trials_csv(tmp_path):
    cfg = builtin_experiment("fig2_upper", sizes=[4])[0]
    report = run_experiment(cfg, 7)
    emit_report(report, tmp_path)
    rows = _read_csv(tmp_path / "fig2_upper_s4_trials.csv")
    assert rows[0] == ["experiment", "trial", "seed", "estimator", "delta", "converged", "iters"]
    ok_trials = {r[1] for r in rows[1:] if r[3] == "root" and r[5] == "true"}
    summary = {r[0]: r for r in _read_csv(tmp_path / "fig2_upper_s4_summary.csv")[1:]}
    for est in report.estimators:
        d = np.array([float(r[4]) for r in rows[1:] if r[3] == est and r[1] in ok_trials])
        assert summary[est][1] == repr(float(np.mean(d)))
        assert summary[est][2] == repr(float(np.std(d, ddof=1)))
    assert sum(int(r[3]) for r in summary.values()) == len(ok_trials)  # no ties here


def test_single_trial_has_undefined_std(tmp_path):
    cfg = builtin_experiment("fig2_lower", sizes=[4])[0]
    report = run_experiment(cfg, 1)
    assert report.summary["root"]["std"] is None
    emit_report(report, tmp_path)
    row = _read_csv(tmp_path / "fig2_lower_s4_summary.csv")[1]
    assert row[0] == "root" and row[2] == ""
    assert "undefined" in format_summary(report)


def test_empty_report_writes_headers_only(tmp_path):
    cfg = builtin_experiment("fig2_lower", sizes=[4])[0]
    emit_report(ExperimentReport(cfg, []), tmp_path)
    assert len(_read_csv(tmp_path / "fig2_lower_s4_trials.csv")) == 1
    assert len(_read_csv(tmp_path / "fig2_lower_s4_summary.csv")) == 1


def test_failed_trials_are_kept_and_flagged(tmp_path):
    cfg = builtin_experiment("table1", sizes=[8], max_iters=1)[0]
    report = run_experiment(cfg, 3)
    assert report.n_failed == 3
    assert all(t.error == "MaxItersExceeded" for t in report.trials)
    assert report.summary["root"]["n_ok"] == 0 and report.summary["root"]["mean"] is None
    emit_report(report, tmp_path)
    rows = _read_csv(tmp_path / "table1_s8_trials.csv")
    assert [r[5] for r in rows[1:] if r[3] == "root"] == ["false"] * 3
    assert "0 ok" in format_summary(report)


def test_ties_are_not_awarded():
    cfg = builtin_experiment("table1", sizes=[6])[0]
    trials = [TrialResult("x", 0, 1, {"root": 0.1, "projection": 0.1, "kernel": 0.2}, True, 3),
              TrialResult("x", 1, 2, {"root": 0.05, "projection": 0.1, "kernel": 0.2}, True, 3),
              TrialResult("x", 2, 3, {"root": 0.3, "projection": 0.1, "kernel": 0.2}, True, 3)]
    s = ExperimentReport(cfg, trials).summary
    assert (s["root"]["wins"], s["root"]["ties"]) == (1, 1)
    assert (s["projection"]["wins"], s["projection"]["ties"]) == (1, 1)
    assert s["kernel"]["wins"] == 0


def test_plot_data_grid(tmp_path):
    cfg = builtin_experiment("table1", sizes=[6])[0]
    report = run_experiment(cfg, 1)
    paths = emit_report(report, tmp_path, plot_trials=[0])
    rows = _read_csv(paths[-1])
    assert rows[0] == ["x", "p_true", "p_root", "p_proj", "p_kernel"]
    assert len(rows) == 513
    dom = make_distribution(cfg.distribution).support()
    assert float(rows[1][0]) == dom.lower and float(rows[-1][0]) == dom.upper


def test_config_round_trip_and_validation(tmp_path):
    cfg = builtin_experiment("table3")[0]
    assert ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg
    assert "s=3" in cfg.note
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({**cfg.to_dict(), "bogus": 1})
    with pytest.raises(ValueError):
        builtin_experiment("table1", sizes=[0])
    with pytest.raises(ValueError):
        builtin_experiment("table9")
    with pytest.raises(ValueError):
        builtin_experiment("table1", baselines=("histogram",))
    with pytest.raises(ValueError):
        run_experiment(cfg, 0)


def test_gauss_poly_trial_prefers_root():
    cfg = builtin_experiment("table2")[0]
    r = run_trial(cfg, 0)
    assert r.ok and r.deltas["root"] < min(r.deltas["projection"], r.deltas["kernel"])


def test_projection_size_override():
    cfg = builtin_experiment("table2", projection_size=5)[0]
    truth, x, _, est, _ = fit_trial(cfg, 0)
    assert est["projection"].basis.size == 5 and est["root"].basis.size == 3
    with pytest.raises(ValueError):
        builtin_experiment("table2", projection_size=0)
