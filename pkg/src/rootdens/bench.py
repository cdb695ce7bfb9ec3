"""L1 accuracy metric and the Monte Carlo comparison harness.

One experiment = one reference distribution, one sample size, one basis
family and size ``s``.  Every trial draws a fresh sample from a seed derived
from ``(base_seed, experiment name, trial)`` only, so a sweep over ``s``
reuses exactly the same samples, and trials can run in any order or in
parallel without changing a single output byte.
"""
import csv
import json
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.optimize import brentq

from ._quad import panel_rule
from .bases import BasisSpec
from .distributions import make_distribution
from .estimator import FitOptions, fit_root, MaxItersExceeded
from . import baselines

__all__ = [
    "l1_error",
    "ExperimentConfig",
    "TrialResult",
    "ExperimentReport",
    "BUILTIN",
    "builtin_experiment",
    "headline_size",
    "trial_seed",
    "fit_trial",
    "run_trial",
    "run_experiment",
    "emit_report",
    "format_summary",
]

TIE_DIGITS = 12


# --------------------------------------------------------------------------
# metric

def _discrete_l1(truth, est, upper=None):
    dom = truth.support()
    if dom.kind == "lattice":
        x = dom.points()
        return float(np.sum(np.abs(est.pdf(x) - truth.pdf(x))))
    if upper is None:
        upper = int(dom.upper)
        while True:
            tail = np.arange(upper - 9, upper + 1, dtype=float)
            if np.max(np.abs(est.pdf(tail)) + truth.pdf(tail)) < 1e-16:
                break
            upper = int(1.5 * upper) + 10
    x = np.arange(0, int(upper) + 1, dtype=float)
    return float(np.sum(np.abs(est.pdf(x) - truth.pdf(x))))


def _bounds(truth, est):
    dom = truth.support()
    half = dom.kind == "half"
    mu, sd = truth.mean(), np.sqrt(truth.var())
    lo, hi = min(dom.lower, mu - 10 * sd), max(dom.upper, mu + 10 * sd)
    if half:
        lo = 0.0
    for _ in range(20):
        ends = np.array([hi] if half else [lo, hi])
        if np.max((np.abs(est.pdf(ends)) + truth.pdf(ends)) * (hi - lo)) <= 1e-9:
            break
        span = hi - lo
        if not half:
            lo -= 0.5 * span
        hi += 0.5 * span
    return lo, hi


def l1_error(truth, est, n_grid=2001, order=8, upper=None):
    """Integrated absolute difference between ``truth`` and ``est``.

    Continuous: the sign changes of ``est - truth`` are located on a grid and
    refined with Brent's method; ``|est - truth|`` is then integrated with
    Gauss-Legendre panels that never straddle a crossing.  Bounds start at
    the truth's support (at least ten standard deviations around the mean)
    and widen until the end-point contribution is below 1e-9.

    Discrete: exact sum over the lattice, or over ``0..upper`` on the
    non-negative integers (``upper`` chosen automatically when omitted).
    """
    if truth.discrete:
        return _discrete_l1(truth, est, upper)
    lo, hi = _bounds(truth, est)
    grid = np.linspace(lo, hi, n_grid)
    diff = lambda x: est.pdf(x) - truth.pdf(x)
    d = diff(grid)
    cross = np.flatnonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)
    scalar = lambda t: float(diff(np.array([t]))[0])
    roots = [brentq(scalar, grid[i], grid[i + 1], xtol=1e-14, rtol=1e-14) for i in cross]
    edges = np.union1d(grid, roots)
    nodes, weights = panel_rule(edges, order)
    val = float(np.abs(diff(nodes)) @ weights)
    if not np.isfinite(val):
        raise ArithmeticError("L1 quadrature did not produce a finite value")
    return val


# --------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment.

    ``frame`` is ``None`` to moment-match the basis to each sample, or a
    dict of fixed ``BasisSpec`` shape parameters.  ``base_name`` keys the
    trial seeds, so configs differing only in ``s`` share their samples.
    ``projection_size`` overrides the projection estimator's basis size
    (``None`` uses ``s``).
    """

    name: str
    distribution: dict
    n: int
    family: str
    s: int
    base_name: str = None
    baselines: tuple = ("projection", "kernel")
    frame: dict = None
    alpha: float = 0.7
    tol: float = 1e-9
    max_iters: int = 2000
    complex_start: bool = False
    restarts: int = 0
    bandwidth: float = None
    projection_clip: bool = False
    projection_size: int = None
    base_seed: int = 0
    note: str = ""

    def __post_init__(self):
        if self.base_name is None:
            object.__setattr__(self, "base_name", self.name)
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"sample size must be a positive integer, got {self.n}")
        if int(self.s) != self.s or self.s < 1:
            raise ValueError(f"basis size must be a positive integer, got {self.s}")
        ps = self.projection_size
        if ps is not None and (int(ps) != ps or ps < 1):
            raise ValueError(f"projection size must be a positive integer, got {ps}")
        object.__setattr__(self, "baselines", tuple(self.baselines))
        known = {"projection", "kernel", "frequency", "binomial", "poisson", "exponential"}
        unknown = set(self.baselines) - known
        if unknown:
            raise ValueError(f"unknown baselines {sorted(unknown)}")
        self.fit_options()
        make_distribution(self.distribution)

    @property
    def experiment_id(self):
        return f"{self.name}_s{self.s}"

    def fit_options(self):
        return FitOptions(alpha=self.alpha, max_iters=self.max_iters, tol=self.tol,
                          complex_start=self.complex_start, restarts=self.restarts,
                          seed=self.base_seed)

    def to_dict(self):
        d = asdict(self)
        d["baselines"] = list(self.baselines)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        return cls(**d)


_GP_FRAME = {"shift": 0.0, "scale": float(1.0 / np.sqrt(2.0))}

BUILTIN = {
    "table1": dict(distribution={"name": "fig1_upper"}, n=200, family="hermite",
                   sizes=(4, 5, 6, 7, 8), headline=8, baselines=("projection", "kernel")),
    "fig1_lower": dict(distribution={"name": "fig1_lower"}, n=400, family="laguerre",
                       sizes=(4, 5, 6, 7, 8), headline=8,
                       baselines=("projection", "kernel", "exponential")),
    "fig2_upper": dict(distribution={"name": "fig2_upper"}, n=300, family="kravchuk",
                       sizes=(4, 5, 6, 7, 8), headline=6,
                       baselines=("projection", "frequency", "binomial")),
    "fig2_lower": dict(distribution={"name": "fig2_lower"}, n=300, family="charlier",
                       sizes=(4, 5, 6, 7, 8), headline=6,
                       baselines=("projection", "frequency", "poisson")),
    "table2": dict(distribution={"name": "gauss_poly", "random_degree": 2, "poly_seed": 2},
                   n=1000, family="hermite", sizes=(3,), headline=3, frame=_GP_FRAME,
                   complex_start=True, baselines=("projection", "kernel")),
    "table3": dict(distribution={"name": "gauss_poly", "random_degree": 3, "poly_seed": 3},
                   n=1000, family="hermite", sizes=(4,), headline=4, frame=_GP_FRAME,
                   complex_start=True, baselines=("projection", "kernel"),
                   note="four-dimensional basis (s=4) for a sextic f; the printed "
                        "table caption for this setting says s=3"),
}


def headline_size(name):
    """Default basis size reported for a built-in experiment."""
    if name not in BUILTIN:
        raise ValueError(f"unknown experiment {name!r}; known: {sorted(BUILTIN)}")
    return BUILTIN[name]["headline"]


def builtin_experiment(name, sizes=None, **overrides):
    """Configs (one per ``s``) for a named built-in experiment."""
    if name not in BUILTIN:
        raise ValueError(f"unknown experiment {name!r}; known: {sorted(BUILTIN)}")
    spec = dict(BUILTIN[name])
    default_sizes = spec.pop("sizes")
    spec.pop("headline")
    spec.update(overrides)
    sizes = default_sizes if sizes is None else sizes
    return [ExperimentConfig(name=name, s=int(s), **spec) for s in sizes]


# --------------------------------------------------------------------------
# trials

def trial_seed(config, trial):
    """64-bit seed derived from (base seed, experiment base name, trial)."""
    key = zlib.crc32(config.base_name.encode("utf-8"))
    ss = np.random.SeedSequence([int(config.base_seed), key, int(trial)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _lattice_size(truth):
    return int(max(truth.ns)) if hasattr(truth, "ns") else None


def _root_basis(config, x, truth):
    if config.frame is not None:
        return BasisSpec(config.family, config.s, **config.frame)
    return BasisSpec.from_sample(config.family, config.s, x, n_trials=_lattice_size(truth))


def fit_trial(config, trial):
    """Draw the trial's sample and fit every estimator on it.

    Returns ``(truth, x, seed, estimates, root_info)`` where ``estimates``
    maps estimator names to fitted objects with a ``pdf`` method (the root
    entry is ``None`` if the fit raised) and ``root_info`` holds
    ``converged``, ``iters`` and ``error``.
    """
    truth = make_distribution(config.distribution)
    seed = trial_seed(config, trial)
    x = truth.draw(config.n, seed)
    estimates = {}
    info = {"converged": False, "iters": 0, "error": None}
    basis = _root_basis(config, x, truth)
    try:
        c = fit_root(x, basis, config.fit_options())
        info.update(converged=True, iters=c.n_iter)
    except MaxItersExceeded as exc:
        c = exc.result
        info.update(iters=c.n_iter, error=type(exc).__name__)
    except ArithmeticError as exc:
        c = None
        info.update(error=type(exc).__name__)
    estimates["root"] = c
    N = _lattice_size(truth)
    for name in config.baselines:
        if name == "projection":
            pb = baselines.density_frame(basis.with_size(config.projection_size or config.s))
            estimates[name] = baselines.projection_fit(x, pb, clip=config.projection_clip)
        elif name == "kernel":
            estimates[name] = baselines.kernel_fit(x, config.bandwidth)
        elif name == "frequency":
            estimates[name] = baselines.frequency_fit(x)
        elif name == "binomial":
            estimates[name] = baselines.binomial_fit(x, N)
        elif name == "poisson":
            estimates[name] = baselines.poisson_fit(x)
        elif name == "exponential":
            estimates[name] = baselines.exponential_fit(x)
    return truth, x, seed, estimates, info


@dataclass(frozen=True)
class TrialResult:
    experiment: str
    trial: int
    seed: int
    deltas: dict
    converged: bool
    iters: int
    error: str = None

    @property
    def ok(self):
        return self.converged and self.error is None


def run_trial(config, trial):
    """Fit all estimators on one sample and score each with :func:`l1_error`."""
    truth, x, seed, estimates, info = fit_trial(config, trial)
    deltas = {}
    for name, est in estimates.items():
        deltas[name] = float("nan") if est is None else l1_error(truth, est)
    return TrialResult(config.experiment_id, int(trial), seed, deltas,
                       info["converged"], int(info["iters"]), info["error"])


def _run_one(args):
    return run_trial(*args)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    trials: list
    estimators: tuple = field(init=False)
    summary: dict = field(init=False)

    def __post_init__(self):
        self.estimators = ("root",) + tuple(self.config.baselines)
        self.summary = _aggregate(self.trials, self.estimators)

    @property
    def n_ok(self):
        return sum(t.ok for t in self.trials)

    @property
    def n_failed(self):
        return len(self.trials) - self.n_ok


def _aggregate(trials, estimators):
    ok = [t for t in trials if t.ok]
    out = {}
    wins = {e: 0 for e in estimators}
    ties = {e: 0 for e in estimators}
    for t in ok:
        vals = {e: round(t.deltas[e], TIE_DIGITS) for e in estimators}
        best = min(vals.values())
        leaders = [e for e in estimators if vals[e] == best]
        if len(leaders) == 1:
            wins[leaders[0]] += 1
        else:
            for e in leaders:
                ties[e] += 1
    for e in estimators:
        d = np.array([t.deltas[e] for t in ok], dtype=float)
        out[e] = {
            "mean": float(np.mean(d)) if d.size else None,
            "std": float(np.std(d, ddof=1)) if d.size > 1 else None,
            "wins": wins[e],
            "ties": ties[e],
            "n_ok": len(ok),
        }
    return out


def run_experiment(config, n_trials, jobs=1):
    """Run ``n_trials`` trials (in ``jobs`` processes) and aggregate them.

    Results are ordered by trial index, so the report does not depend on
    ``jobs`` or scheduling.
    """
    if int(n_trials) != n_trials or n_trials < 1:
        raise ValueError(f"n_trials must be a positive integer, got {n_trials}")
    args = [(config, t) for t in range(int(n_trials))]
    if jobs is None or jobs <= 1:
        trials = [run_trial(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=int(jobs)) as pool:
            trials = list(pool.map(_run_one, args, chunksize=max(1, len(args) // (4 * jobs))))
    trials.sort(key=lambda t: t.trial)
    return ExperimentReport(config, trials)


# --------------------------------------------------------------------------
# output

def _fmt(v):
    return "" if v is None else repr(float(v))


def emit_report(report, out_dir, plot_trials=()):
    """Write ``<id>_trials.csv``, ``<id>_summary.csv``, ``<id>_config.json``.

    ``plot_trials`` lists trial indices for which ``<id>_plot_<t>.csv`` with
    the true and estimated densities on a 512-point grid (lattice points for
    discrete truths) is also written.  Returns the written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    eid = report.config.experiment_id
    paths = []
    p = os.path.join(out_dir, f"{eid}_trials.csv")
    with open(p, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["experiment", "trial", "seed", "estimator", "delta", "converged", "iters"])
        for t in report.trials:
            for e in report.estimators:
                root = e == "root"
                w.writerow([t.experiment, t.trial, t.seed, e, _fmt(t.deltas[e]),
                            str(t.ok).lower() if root else "",
                            t.iters if root else ""])
    paths.append(p)
    p = os.path.join(out_dir, f"{eid}_summary.csv")
    with open(p, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["estimator", "mean_delta", "std_delta", "wins", "ties", "n_ok"])
        for e in report.estimators if report.trials else ():
            s = report.summary[e]
            w.writerow([e, _fmt(s["mean"]), _fmt(s["std"]), s["wins"], s["ties"], s["n_ok"]])
    paths.append(p)
    p = os.path.join(out_dir, f"{eid}_config.json")
    with open(p, "w", encoding="utf-8") as fh:
        json.dump({"config": report.config.to_dict(), "n_trials": len(report.trials),
                   "n_failed": report.n_failed,
                   "kernel": "gaussian, Silverman bandwidth unless overridden"},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths.append(p)
    for t in plot_trials:
        paths.append(write_plot_data(report.config, t, out_dir))
    return paths


def write_plot_data(config, trial, out_dir, n_points=512):
    truth, x, seed, estimates, _ = fit_trial(config, trial)
    dom = truth.support()
    grid = dom.points() if truth.discrete else np.linspace(dom.lower, dom.upper, n_points)
    cols = {"p_true": truth.pdf(grid)}
    for name, est in estimates.items():
        key = {"root": "p_root", "projection": "p_proj"}.get(name, f"p_{name}")
        cols[key] = est.pdf(grid) if est is not None else np.full(grid.shape, np.nan)
    p = os.path.join(out_dir, f"{config.experiment_id}_plot_{trial}.csv")
    with open(p, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x"] + list(cols))
        for i, g in enumerate(grid):
            w.writerow([repr(float(g))] + [repr(float(v[i])) for v in cols.values()])
    return p


def format_summary(report):
    """Text table: estimators as columns, mean/std of Delta and wins as rows."""
    est = report.estimators
    head = f"{report.config.experiment_id}: {len(report.trials)} trials, {report.n_ok} ok"
    if report.config.note:
        head += f"  ({report.config.note})"
    rows = [["Estimator"] + [e.capitalize() for e in est]]
    num = lambda v: "undefined" if v is None else f"{v:.4f}"
    rows.append(["Mean value of Delta"] + [num(report.summary[e]["mean"]) for e in est])
    rows.append(["Standard deviation of Delta"] + [num(report.summary[e]["std"]) for e in est])
    rows.append(["Wins (ties)"] + [f"{report.summary[e]['wins']} ({report.summary[e]['ties']})"
                                   for e in est])
    width = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = [head] + ["  ".join(c.ljust(width[i]) if i == 0 else c.rjust(width[i])
                                for i, c in enumerate(r)) for r in rows]
    return "\n".join(lines)
