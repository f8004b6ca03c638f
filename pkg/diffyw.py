#!/usr/bin/env python3
"""
Command-line front end: estimate, simulate, residuals, experiment.

Usage:
  python diffyw.py estimate --input series.txt --p 1 --all --changepoints 120,340
  python diffyw.py simulate --coeffs 0.6 --n 1000 --changepoints 300,700 --means 0,2,0 --output sim.txt
  python diffyw.py residuals --input sim.txt --p 1 --detect pelt --output resid.txt
  python diffyw.py experiment --spec designs/table1/spec.json --out-dir results/table1

Options resolve as flags > --config JSON file > defaults. The default master
seed can be overridden with the DIFFYW_SEED environment variable.

Exit codes: 0 ok, 2 usage, 3 unreadable or ill-formed input, 4 invalid
arguments / model / spec, 5 numerical failure (degenerate series,
ill-conditioned system, cannot bootstrap, failed experiment).
"""

import argparse
import os
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np
import ujson
from rich.console import Console
from rich.markup import escape

from armodel import (
    ARModel,
    ChangepointConfig,
    DiffYWError,
    InvalidInputError,
    apply_mean_shifts,
    default_burnin,
    gaussian_innovations,
    simulate_ar,
    student_t_innovations,
)
from changepoint import pelt_meanshift, residual_penalty, wbs_meanshift
from decorrelate import decorrelate
from estimators import (
    Method,
    ar1seg_estimate,
    bootstrap_se,
    classical_yule_walker,
    diff_yule_walker,
    rolling_window_yw,
    segmented_yule_walker,
)
from experiments import DEFAULT_SEED, NUM_WORKERS, ScenarioSpec, run_experiment, write_experiment
from preview_report import show_experiment, show_report
from series_io import (
    SeriesParseError,
    dumps_report,
    read_series,
    read_truth_sidecar,
    write_residuals,
    write_series,
    write_truth_sidecar,
)

SEED_ENV = "DIFFYW_SEED"
EXIT_OK = 0
EXIT_PARSE = 3
EXIT_INVALID = 4
EXIT_NUMERICAL = 5


class NumericalFailure(DiffYWError):
    pass


@dataclass
class RunConfig:
    command: str = None
    input: str = None
    p: int = 1
    method: str = Method.DIFF_YW.value
    all_methods: bool = False
    window: int = None
    changepoints: list = None
    means: list = None
    bootstrap_reps: int = 0
    seed: int = DEFAULT_SEED
    seed_explicit: bool = False
    out_dir: str = "."
    output: str = None
    spec: str = None
    reps: int = None
    column: str = None
    denominator_column: str = None
    truth: str = None
    workers: int = None
    coeffs: list = None
    noise_var: float = 1.0
    n: int = None
    burnin: int = None
    t_df: float = None
    detect: str = None

    def validate(self):
        if self.command in ("estimate", "residuals") and not self.input:
            raise InvalidInputError("--input is required")
        if self.input and not os.path.exists(self.input):
            raise SeriesParseError(self.input, None, "file not found")
        if self.p is None or self.p < 1:
            raise InvalidInputError(f"--p must be >= 1, got {self.p}")
        if self.bootstrap_reps < 0:
            raise InvalidInputError(f"--bootstrap-reps must be >= 0, got {self.bootstrap_reps}")
        if self.seed < 0:
            raise InvalidInputError(f"seed must be non-negative, got {self.seed}")
        if self.workers is not None and self.workers < 1:
            raise InvalidInputError(f"--workers must be >= 1, got {self.workers}")
        try:
            Method(self.method)
        except ValueError:
            raise InvalidInputError(f"unknown method {self.method!r}")


def _int_list(text):
    if text is None or isinstance(text, list):
        return text
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise InvalidInputError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    if text is None or isinstance(text, list):
        return text
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise InvalidInputError(f"expected comma-separated numbers, got {text!r}")


def _env_seed(environ):
    value = environ.get(SEED_ENV)
    if value is None or value == "":
        return DEFAULT_SEED
    try:
        return int(value)
    except ValueError:
        raise InvalidInputError(f"{SEED_ENV} must be an integer, got {value!r}")


def resolve_config(args, environ=None):
    """Merge defaults, the --config file and command-line flags, in that order."""
    environ = os.environ if environ is None else environ
    values = asdict(RunConfig())
    values["seed"] = _env_seed(environ)
    names = {f.name for f in fields(RunConfig)} - {"command", "seed_explicit"}

    if getattr(args, "config", None):
        try:
            with open(args.config) as f:
                from_file = ujson.load(f)
        except (OSError, ValueError) as e:
            raise SeriesParseError(args.config, None, f"cannot read config ({e})")
        if not isinstance(from_file, dict):
            raise InvalidInputError(f"{args.config}: config must be a JSON object")
        unknown = sorted(set(from_file) - names)
        if unknown:
            raise InvalidInputError(f"{args.config}: unknown config key(s) {unknown}")
        values.update(from_file)
        if "seed" in from_file:
            values["seed_explicit"] = True

    for name in names:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
            if name == "seed":
                values["seed_explicit"] = True
    values["command"] = args.command
    values["changepoints"] = _int_list(values["changepoints"])
    values["means"] = _float_list(values["means"])
    values["coeffs"] = _float_list(values["coeffs"])
    config = RunConfig(**values)
    config.validate()
    return config


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------

def _changepoint_config(times):
    return ChangepointConfig(times, np.zeros(len(times) + 1))


def _selected_methods(config):
    if config.all_methods:
        methods = [Method.CLASSICAL_YW]
        if config.p == 1:
            methods.append(Method.AR1SEG)
        methods.append(Method.DIFF_YW)
        if config.changepoints is not None:
            methods.append(Method.SEGMENTED_YW)
        if config.window is not None:
            methods.append(Method.ROLLING_WINDOW)
        return methods
    return [Method(config.method)]


def _run_method(method, x, config):
    p = config.p
    if method is Method.DIFF_YW:
        return diff_yule_walker(x, p)
    if method is Method.AR1SEG:
        if p != 1:
            raise InvalidInputError("ar1seg estimates an AR(1) only; use --p 1")
        return ar1seg_estimate(x)
    if method is Method.CLASSICAL_YW:
        return classical_yule_walker(x, p)
    if method is Method.ROLLING_WINDOW:
        if config.window is None:
            raise InvalidInputError("rolling-window estimation needs --window")
        return rolling_window_yw(x, p, config.window)
    if config.changepoints is None:
        raise InvalidInputError("segmented Yule-Walker needs --changepoints")
    return segmented_yule_walker(x, p, _changepoint_config(config.changepoints))


def _tag(error, method):
    error.args = (f"[{method.value}] {error}",)
    return error


def cmd_estimate(config, console, err_console):
    x = read_series(config.input, config.column, config.denominator_column)
    truth = read_truth_sidecar(config.truth) if config.truth else None
    report = {
        "command": "estimate",
        "input": config.input,
        "n": int(x.size),
        "p": config.p,
        "seed": config.seed,
        "changepoints": config.changepoints,
        "estimates": [],
    }
    methods = _selected_methods(config)
    for method in methods:
        try:
            est = _run_method(method, x, config)
        except DiffYWError as e:
            if not config.all_methods:
                raise _tag(e, method)
            report["estimates"].append({"method": method.value, "error_message": str(_tag(e, method))})
            err_console.print(f"[yellow]Warning: {escape(str(e))}[/yellow]")
            continue
        if method is Method.DIFF_YW and config.bootstrap_reps > 0:
            try:
                est.bootstrap_se = bootstrap_se(x, config.p, config.bootstrap_reps, config.seed,
                                                workers=config.workers or 1)
            except DiffYWError as e:
                raise _tag(e, method)
        for warning in est.warnings:
            err_console.print(f"[yellow]Warning: {escape(f'[{method.value}] {warning}')}[/yellow]")
        entry = est.to_dict()
        if truth is not None and truth[0].order == est.order:
            entry["coeff_error"] = (est.coeffs - truth[0].coeffs).tolist()
        report["estimates"].append(entry)

    if all("error_message" in e for e in report["estimates"]):
        raise NumericalFailure("every selected estimator failed")
    if truth is not None:
        report["truth"] = {"model": truth[0].to_dict(), "changepoints": truth[1].to_dict()}

    path = config.output or os.path.join(config.out_dir, "estimate_report.json")
    _write_text(path, dumps_report(report))
    show_report(report, console=console)
    console.print(f"Wrote report to {path}")
    return report


def _write_text(path, text):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w") as f:
        f.write(text)


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(config, console, err_console):
    if config.coeffs is None or config.n is None:
        raise InvalidInputError("simulate needs --coeffs and --n")
    if not config.output:
        raise InvalidInputError("simulate needs --output")
    model = ARModel(config.coeffs, config.noise_var)
    times = config.changepoints or []
    means = config.means if config.means is not None else [0.0] * (len(times) + 1)
    changepoints = ChangepointConfig(times, means)
    innovations = gaussian_innovations if config.t_df is None else student_t_innovations(config.t_df)
    burnin = default_burnin(model) if config.burnin is None else config.burnin

    print(f"Simulating AR({model.order}) series of length {config.n:,}...")
    x = simulate_ar(model, config.n, config.seed, burnin=burnin, innovations=innovations)
    x = apply_mean_shifts(x, changepoints)
    parent = os.path.dirname(config.output)
    if parent:
        os.makedirs(parent, exist_ok=True)
    write_series(config.output, x)
    sidecar = write_truth_sidecar(config.output, model, changepoints, config.seed, config.n, burnin)
    print(f"  Series: {config.output}")
    print(f"  Truth: {sidecar}")
    print(f"  Changepoints: {changepoints.num_changepoints:,}")
    return x


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def cmd_residuals(config, console, err_console):
    x = read_series(config.input, config.column, config.denominator_column)
    try:
        fit, residuals = decorrelate(x, config.p)
    except DiffYWError as e:
        raise _tag(e, Method.DIFF_YW)
    for warning in fit.warnings:
        err_console.print(f"[yellow]Warning: {escape(f'[{Method.DIFF_YW.value}] {warning}')}[/yellow]")

    path = config.output or os.path.join(config.out_dir, "residuals.txt")
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    write_residuals(path, residuals, fit)

    report = {
        "command": "residuals",
        "input": config.input,
        "n": int(x.size),
        "p": config.p,
        "seed": config.seed,
        "residuals": path,
        "offset": residuals.offset,
        "estimates": [fit.to_dict()],
    }
    if config.detect is not None:
        detection = {"detector": config.detect}
        if config.detect == "wbs":
            seg = wbs_meanshift(residuals.values, seed=config.seed)
        else:
            detection["penalty"] = residual_penalty(residuals.values, x.size, fit.noise_var)
            seg = pelt_meanshift(residuals.values, detection["penalty"])
        report["detection"] = {
            **detection,
            "changepoint_times": [residuals.original_time(t) for t in seg.changepoint_times],
            "residual_times": seg.changepoint_times.tolist(),
            "segment_means": seg.segment_means.tolist(),
        }
    _write_text(path + ".report.json", dumps_report(report))
    show_report(report, console=console)
    console.print(f"Wrote {residuals.values.size:,} residuals to {path}")
    return report


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------

def cmd_experiment(config, console, err_console):
    if not config.spec:
        raise InvalidInputError("experiment needs --spec")
    if not os.path.exists(config.spec):
        raise SeriesParseError(config.spec, None, "spec file not found")
    spec = ScenarioSpec.load(config.spec, default_seed=config.seed)
    if config.seed_explicit:
        spec.seed = config.seed
    if config.reps is not None:
        if config.reps < 1:
            raise InvalidInputError(f"--reps must be >= 1, got {config.reps}")
        spec.reps = config.reps
    result = run_experiment(spec, workers=config.workers or NUM_WORKERS, progress=True)
    paths = write_experiment(result, config.out_dir)
    with open(paths["manifest"]) as f:
        manifest = ujson.load(f)
    show_experiment(result.summary, manifest, runtime=result.runtime, console=console)
    console.print(f"Wrote results to {config.out_dir}")
    return result


COMMANDS = {
    "estimate": cmd_estimate,
    "simulate": cmd_simulate,
    "residuals": cmd_residuals,
    "experiment": cmd_experiment,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default option values")
    common.add_argument("--seed", type=int, help=f"Master seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    common.add_argument("--out-dir", dest="out_dir", help="Output directory (default: .)")
    common.add_argument("--output", help="Output file")
    common.add_argument("--workers", type=int, help="Worker processes for bootstrap / experiments")

    series = argparse.ArgumentParser(add_help=False)
    series.add_argument("--input", help="Series file: one value per line, or CSV with --column")
    series.add_argument("--column", help="CSV column holding the series")
    series.add_argument("--denominator-column", dest="denominator_column",
                        help="Divide --column by this column (ratio series)")
    series.add_argument("--p", type=int, help="AR order (default: 1)")

    parser = argparse.ArgumentParser(description="AR(p) estimation under mean shifts via first differences")
    sub = parser.add_subparsers(dest="command", required=True)

    est = sub.add_parser("estimate", parents=[common, series], help="Estimate AR coefficients from a series")
    est.add_argument("--method", choices=[m.value for m in Method], help="Estimator (default: diff)")
    est.add_argument("--all", dest="all_methods", action="store_true", default=None,
                     help="Run the side-by-side comparison of all applicable estimators")
    est.add_argument("--window", type=int, help="Window length for rolling-window Yule-Walker")
    est.add_argument("--changepoints", help="Known changepoint times t1,t2,... for segmented Yule-Walker")
    est.add_argument("--bootstrap-reps", dest="bootstrap_reps", type=int,
                     help="Parametric bootstrap replications for the difference estimator")
    est.add_argument("--truth", help="Truth sidecar written by simulate; adds coefficient errors")

    sim = sub.add_parser("simulate", parents=[common], help="Simulate an AR series with mean shifts")
    sim.add_argument("--coeffs", help="AR coefficients phi_1,...,phi_p")
    sim.add_argument("--noise-var", dest="noise_var", type=float, help="Innovation variance (default: 1)")
    sim.add_argument("--n", type=int, help="Series length")
    sim.add_argument("--changepoints", help="Changepoint times t1,t2,...")
    sim.add_argument("--means", help="Segment means mu_0,...,mu_m")
    sim.add_argument("--burnin", type=int, help="Discarded warm-up values (default: 10p + 500)")
    sim.add_argument("--t-df", dest="t_df", type=float, help="Student-t innovations with this many degrees of freedom")

    res = sub.add_parser("residuals", parents=[common, series], help="Decorrelate a series by one-step residuals")
    res.add_argument("--detect", choices=["pelt", "wbs"], help="Run a changepoint detector on the residuals")

    exp = sub.add_parser("experiment", parents=[common], help="Run a simulation design")
    exp.add_argument("--spec", help="Scenario spec JSON file")
    exp.add_argument("--reps", type=int, help="Override the spec's replication count")
    return parser


def exit_code(error):
    if isinstance(error, SeriesParseError):
        return EXIT_PARSE
    if isinstance(error, InvalidInputError):
        return EXIT_INVALID
    return EXIT_NUMERICAL


def main(argv=None, environ=None):
    args = build_parser().parse_args(argv)
    console = Console()
    err_console = Console(stderr=True)
    try:
        config = resolve_config(args, environ)
        COMMANDS[config.command](config, console, err_console)
    except DiffYWError as e:
        err_console.print(f"[red]Error: {escape(str(e))}[/red]", highlight=False)
        return exit_code(e)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
