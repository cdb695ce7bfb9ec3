"""Command-line entry point.

::

    rootdens fit --sample data.txt --family hermite --s 6 --out fit/
    rootdens sample --distribution fig2_lower --n 300 --seed 1 --out draws.txt
    rootdens benchmark table1 --trials 100 --s 4,5,6,7,8 --out results/
    rootdens bases --family kravchuk --s 12 --n-trials 100 --p 0.45

Every command also takes ``--config FILE``: a JSON object whose keys are the
long flag names with dashes replaced by underscores.  Flags given on the
command line override the file, and unknown keys are rejected before any
work starts.  ``benchmark`` and ``fit`` write the merged settings to
``run_config.json`` in the output directory, which can be fed back through
``--config`` to repeat the run.

Exit status is 0 on success, 1 when a fit or trial failed (files are still
written where possible) and 2 for invalid input.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import baselines as _baselines
from .bases import FAMILIES, BasisSpec, default_domain, gram_check
from .bench import (BUILTIN, ExperimentConfig, builtin_experiment, emit_report,
                    format_summary, run_experiment)
from .distributions import PRESETS, make_distribution
from .estimator import FitOptions, MaxItersExceeded, ZeroPsiAtDataPoint, fit_root

__all__ = ["main", "read_sample", "parse_sizes"]


class UsageError(ValueError):
    pass


DEFAULTS = {
    "fit": {
        "sample": None, "distribution": None, "n": None, "family": "hermite", "s": 6,
        "shift": None, "scale": None, "n_trials": None, "p": None, "lam": None,
        "alpha": 0.7, "tol": 1e-9, "max_iters": 2000, "restarts": 0, "complex_start": False,
        "seed": 0, "baselines": [], "bandwidth": None, "grid_points": 512, "out": "fit_out",
    },
    "sample": {"distribution": None, "n": None, "seed": 0, "out": None},
    "benchmark": {
        "experiment": None, "trials": 100, "s": None, "seed": 0, "jobs": None,
        "alpha": None, "tol": None, "max_iters": None, "plot_trials": [],
        "overrides": {}, "out": "bench_out",
    },
    "bases": {
        "family": "hermite", "s": [12], "shift": 0.0, "scale": 1.0, "n_trials": None,
        "p": None, "lam": None, "tol": 1e-8,
    },
}


# --------------------------------------------------------------------------
# parsing helpers

def parse_sizes(text):
    """``"6"`` -> [6]; ``"4,5,8"`` -> [4, 5, 8]; ``"4-8"`` -> [4, .., 8]."""
    if isinstance(text, int):
        return [text]
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if "-" in part:
            a, b = part.split("-")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out or min(out) < 1:
        raise argparse.ArgumentTypeError(f"invalid basis size list {text!r}")
    return out


def _int_list(text):
    return [int(v) for v in str(text).split(",") if v.strip()]


def _str_list(text):
    return [v.strip() for v in str(text).split(",") if v.strip()]


def _distribution(text):
    """Preset name or inline JSON object."""
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise argparse.ArgumentTypeError(f"bad distribution JSON: {exc}") from None
    return text


def read_sample(path):
    """One numeric literal per line; blank lines are skipped.

    Raises
    ------
    UsageError
        Unreadable file or a line that is not a finite number (the message
        carries the 1-based line number).
    """
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read sample file {path!r}: {exc.strerror}") from None
    values = []
    with fh:
        for lineno, line in enumerate(fh, 1):
            tok = line.strip()
            if not tok:
                continue
            try:
                v = float(tok)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: not a number: {tok!r}") from None
            if not np.isfinite(v):
                raise UsageError(f"{path}:{lineno}: non-finite value {tok!r}")
            values.append(v)
    if not values:
        raise UsageError(f"{path}: no sample values")
    return np.array(values)


def _load_config(path, command):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path}: invalid JSON ({exc})") from None
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path}: top level must be an object")
    unknown = set(cfg) - set(DEFAULTS[command])
    if unknown:
        raise UsageError(f"config {path}: unknown keys {sorted(unknown)} for '{command}'")
    return cfg


def _settings(args):
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "func")}
    merged = dict(DEFAULTS[args.command])
    merged.update(_load_config(getattr(args, "config", None), args.command))
    merged.update(flags)
    return merged


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt_value(v, discrete):
    return str(int(v)) if discrete else repr(float(v))


# --------------------------------------------------------------------------
# commands

def _fit_basis(cfg, x, truth=None):
    family = cfg["family"]
    s = parse_sizes(cfg["s"])
    if len(s) != 1:
        raise UsageError("fit takes a single basis size")
    s = s[0]
    n_trials = cfg["n_trials"]
    if n_trials is None and truth is not None and hasattr(truth, "ns"):
        n_trials = max(truth.ns)
    frame = {k: cfg[k] for k in ("shift", "scale", "p", "lam") if cfg[k] is not None}
    if not frame:
        return BasisSpec.from_sample(family, s, x, n_trials=n_trials)
    if n_trials is not None:
        frame["n_trials"] = int(n_trials)
    return BasisSpec(family, s, **frame)


def _density_grid(basis, x, n_points):
    if basis.discrete:
        dom = default_domain(basis)
        upper = dom.upper if basis.family == "kravchuk" else max(dom.upper, int(np.max(x)))
        return np.arange(0, int(upper) + 1, dtype=float)
    lo, hi = float(np.min(x)), float(np.max(x))
    pad = 0.25 * (hi - lo) if hi > lo else 1.0
    lo = max(lo - pad, 0.0) if basis.family == "laguerre" else lo - pad
    return np.linspace(lo, hi + pad, int(n_points))


def cmd_fit(cfg):
    if (cfg["sample"] is None) == (cfg["distribution"] is None):
        raise UsageError("fit needs exactly one of --sample FILE or --distribution")
    truth = None
    if cfg["sample"] is not None:
        x = read_sample(cfg["sample"])
    else:
        if cfg["n"] is None or int(cfg["n"]) < 1:
            raise UsageError("--n must be a positive integer when drawing from --distribution")
        truth = make_distribution(cfg["distribution"])
        x = truth.draw(int(cfg["n"]), cfg["seed"])
    basis = _fit_basis(cfg, x, truth)
    opts = FitOptions(alpha=cfg["alpha"], tol=cfg["tol"], max_iters=int(cfg["max_iters"]),
                      restarts=int(cfg["restarts"]), complex_start=bool(cfg["complex_start"]),
                      seed=int(cfg["seed"]))
    os.makedirs(cfg["out"], exist_ok=True)
    _write_json(os.path.join(cfg["out"], "run_config.json"), cfg)
    status = 0
    try:
        c = fit_root(x, basis, opts)
    except MaxItersExceeded as exc:
        c = exc.result
        print(f"error: MaxItersExceeded: {exc}", file=sys.stderr)
        status = 1
    except ZeroPsiAtDataPoint as exc:
        print(f"error: ZeroPsiAtDataPoint: {exc}", file=sys.stderr)
        return 1
    _write_json(os.path.join(cfg["out"], "coefficients.json"), {**c.to_dict(), "n": int(x.size)})
    grid = _density_grid(basis, x, cfg["grid_points"])
    cols = {"p_root": c.pdf(grid)}
    if truth is not None:
        cols["p_true"] = truth.pdf(grid)
    for name in cfg["baselines"]:
        if name == "projection":
            est = _baselines.projection_fit(x, _baselines.density_frame(basis))
        elif name == "kernel":
            est = _baselines.kernel_fit(x, cfg["bandwidth"])
        elif name == "frequency":
            est = _baselines.frequency_fit(x)
        elif name == "binomial":
            est = _baselines.binomial_fit(x, basis.n_trials or int(np.max(x)))
        elif name == "poisson":
            est = _baselines.poisson_fit(x)
        elif name == "exponential":
            est = _baselines.exponential_fit(x)
        else:
            raise UsageError(f"unknown baseline {name!r}")
        cols["p_proj" if name == "projection" else f"p_{name}"] = est.pdf(grid)
    with open(os.path.join(cfg["out"], "density.csv"), "w", encoding="utf-8") as fh:
        fh.write(",".join(["x"] + list(cols)) + "\n")
        for i, g in enumerate(grid):
            fh.write(",".join([repr(float(g))] + [repr(float(v[i])) for v in cols.values()]) + "\n")
    print(f"{basis.family} s={basis.size}: {c.n_iter} iterations, residual {c.residual:.3e}, "
          f"log-likelihood {c.loglik:.6f}")
    return status


def cmd_sample(cfg):
    if cfg["distribution"] is None:
        raise UsageError("sample needs --distribution")
    n = cfg["n"]
    if n is None or int(n) != n or n < 1:
        raise UsageError(f"--n must be a positive integer, got {n}")
    truth = make_distribution(cfg["distribution"])
    x = truth.draw(int(n), cfg["seed"])
    text = "".join(_fmt_value(v, truth.discrete) + "\n" for v in x)
    if cfg["out"] is None:
        sys.stdout.write(text)
    else:
        with open(cfg["out"], "w", encoding="utf-8") as fh:
            fh.write(text)
    return 0


def _bench_configs(cfg):
    exp = cfg["experiment"]
    if exp is None:
        raise UsageError("benchmark needs an experiment name (or an 'experiment' object in --config)")
    over = dict(cfg["overrides"])
    for key in ("alpha", "tol", "max_iters"):
        if cfg[key] is not None:
            over[key] = cfg[key]
    over["base_seed"] = int(cfg["seed"])
    sizes = None if cfg["s"] is None else parse_sizes(cfg["s"])
    if isinstance(exp, dict):
        base = {**exp, **over}
        sizes = sizes or [base.pop("s", None)]
        base.pop("s", None)
        if sizes == [None]:
            raise UsageError("custom experiment needs 's'")
        unknown = set(base) - set(ExperimentConfig.__dataclass_fields__)
        if unknown:
            raise UsageError(f"unknown experiment keys {sorted(unknown)}")
        return [ExperimentConfig(s=int(s), **base) for s in sizes]
    if exp not in BUILTIN:
        raise UsageError(f"unknown experiment {exp!r}; built-in: {', '.join(sorted(BUILTIN))}")
    return builtin_experiment(exp, sizes, **over)


def cmd_benchmark(cfg):
    trials = cfg["trials"]
    if int(trials) != trials or trials < 1:
        raise UsageError(f"--trials must be a positive integer, got {trials}")
    try:
        configs = _bench_configs(cfg)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    jobs = cfg["jobs"] if cfg["jobs"] is not None else (os.cpu_count() or 1)
    os.makedirs(cfg["out"], exist_ok=True)
    _write_json(os.path.join(cfg["out"], "run_config.json"), cfg)
    status = 0
    for config in configs:
        report = run_experiment(config, int(trials), jobs=int(jobs))
        emit_report(report, cfg["out"], plot_trials=cfg["plot_trials"])
        print(format_summary(report))
        print()
        if report.n_failed:
            status = 1
    return status


def cmd_bases(cfg):
    status = 0
    for s in parse_sizes(cfg["s"]):
        kw = {k: cfg[k] for k in ("n_trials", "p", "lam") if cfg[k] is not None}
        if cfg["family"] in ("hermite", "laguerre"):
            kw.update(scale=cfg["scale"])
            if cfg["family"] == "hermite":
                kw.update(shift=cfg["shift"])
        spec = BasisSpec(cfg["family"], s, **kw)
        gram = gram_check(spec)
        err = float(np.max(np.abs(gram - np.eye(s))))
        ok = err <= cfg["tol"]
        status |= not ok
        params = ", ".join(f"{k}={v}" for k, v in spec.to_dict().items() if k != "family")
        print(f"{spec.family} ({params}): max|G - I| = {err:.3e}  {'ok' if ok else 'FAIL'}")
    return int(status)


# --------------------------------------------------------------------------
# argument parser

def _common(p, *, seed=True, out=True, s=True):
    S = argparse.SUPPRESS
    p.add_argument("--config", metavar="PATH", help="JSON file with settings (flags win)")
    if seed:
        p.add_argument("--seed", type=int, default=S, help="random seed")
    if out:
        p.add_argument("--out", default=S, help="output path")
    if s:
        p.add_argument("--s", type=parse_sizes, default=S,
                       help="basis size, or list like 4,5,6 / range 4-8")


def _basis_flags(p):
    S = argparse.SUPPRESS
    p.add_argument("--family", choices=FAMILIES, default=S)
    p.add_argument("--shift", type=float, default=S, help="Hermite centre")
    p.add_argument("--scale", type=float, default=S, help="Hermite/Laguerre scale")
    p.add_argument("--n-trials", dest="n_trials", type=int, default=S, help="Kravchuk N")
    p.add_argument("--p", type=float, default=S, help="Kravchuk p")
    p.add_argument("--lam", type=float, default=S, help="Charlier lambda")


def build_parser():
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(
        prog="rootdens", description="Root (psi-function) density estimation toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit the root estimator to one sample",
                       description="Fit psi-function coefficients; writes coefficients.json, "
                                   "density.csv and run_config.json into --out.")
    _common(p)
    _basis_flags(p)
    p.add_argument("--sample", metavar="FILE", default=S, help="one value per line")
    p.add_argument("--distribution", type=_distribution, default=S,
                   help=f"draw from a preset ({', '.join(PRESETS)}) or inline JSON instead")
    p.add_argument("--n", type=int, default=S, help="draws when using --distribution")
    p.add_argument("--alpha", type=float, default=S, help="relaxation weight in (0, 1]")
    p.add_argument("--tol", type=float, default=S, help="fixed-point residual tolerance")
    p.add_argument("--max-iters", dest="max_iters", type=int, default=S)
    p.add_argument("--restarts", type=int, default=S)
    p.add_argument("--complex-start", dest="complex_start", action="store_true", default=S)
    p.add_argument("--baselines", type=_str_list, default=S,
                   help="comma list from projection,kernel,frequency,binomial,poisson,exponential")
    p.add_argument("--bandwidth", type=float, default=S, help="kernel bandwidth override")
    p.add_argument("--grid-points", dest="grid_points", type=int, default=S)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("sample", help="draw from a reference distribution",
                       description="Write one draw per line to --out (stdout if omitted).")
    _common(p, s=False)
    p.add_argument("--distribution", type=_distribution, default=S,
                   help=f"preset ({', '.join(PRESETS)}) or inline JSON")
    p.add_argument("--n", type=int, default=S, help="number of draws")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("benchmark", help="run a Monte Carlo comparison",
                       description="Run an experiment over one or more basis sizes, print "
                                   "the summary table and write CSV reports into --out.")
    _common(p)
    p.add_argument("experiment", nargs="?", default=S,
                   help=f"built-in experiment: {', '.join(BUILTIN)}")
    p.add_argument("--trials", type=int, default=S, help="number of trials (default 100)")
    p.add_argument("--jobs", type=int, default=S, help="worker processes (default: all cores)")
    p.add_argument("--alpha", type=float, default=S)
    p.add_argument("--tol", type=float, default=S)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=S)
    p.add_argument("--plot-trials", dest="plot_trials", type=_int_list, default=S,
                   help="trial indices for which to write plot-data CSVs")
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("bases", help="check basis orthonormality",
                       description="Print max |G - I| of the numerical Gram matrix.")
    _common(p, seed=False, out=False)
    _basis_flags(p)
    p.add_argument("--tol", type=float, default=S, help="failure threshold (default 1e-8)")
    p.set_defaults(func=cmd_bases)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _settings(args)
        return args.func(cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
