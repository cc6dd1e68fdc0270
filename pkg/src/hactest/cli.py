"""Command-line interface.

Subcommands mirror the library: ``estimate`` (covariance pipeline),
``test`` (the statistic), ``adjust`` (artificial-regressor augmentation),
``diagnose`` (design breakdown verdicts), ``calibrate`` (Monte Carlo
critical values), and ``study`` (size/power curves).

Matrix arguments accept a CSV file path or an inline literal like
``"1,0;0,1"`` (rows separated by semicolons).  Exit codes: 0 on success —
including honestly-undefined estimates — 2 on contract violations (bad
shapes, parameters out of range, unreadable files), and 3 when a requested
procedure is refused (adjustment not applicable, calibration that no
critical value can make honest).
"""
from __future__ import annotations

import functools
import json
import os
import sys

import click
import numpy as np

from .bandwidth import RULE_NAMES, AndrewsRule, FixedBRule, NeweyWestRule, default_rule
from .diagnostics import diagnose as run_diagnose
from .kernels import get_kernel, kernel_names
from .model import AR1Grid, RegressionProblem
from .montecarlo import (
    DEFAULT_RHO_GRID,
    CalibrationNotApplicableError,
    McConfig,
    calibrate_critical_value,
    power_curve,
)
from .prewhiten import EstimatorConfig, assemble_omega
from .testing import (
    AdjustmentNotApplicableError,
    AugmentationImpossibleError,
    adjusted_statistic,
    build_adjusted,
    select_scenario,
    test_statistic,
)


def _parse_matrix(spec: str, header: bool = False) -> np.ndarray:
    if os.path.exists(spec):
        return np.loadtxt(spec, delimiter=",", skiprows=1 if header else 0, ndmin=2)
    rows = [row for row in spec.split(";") if row.strip()]
    if not rows:
        raise ValueError(f"empty matrix literal: {spec!r}")
    return np.array([[float(v) for v in row.split(",")] for row in rows], dtype=float)


def _parse_vector(spec: str, header: bool = False) -> np.ndarray:
    return _parse_matrix(spec, header).ravel()


def _parse_omega(text: str):
    if text in ("ones", "zero-first"):
        return text
    return tuple(float(v) for v in text.split(","))


def _parse_floats(text: str) -> tuple:
    return tuple(float(v) for v in text.split(","))


def _build_rule(rule_name, kernel_name, omega, b_frac, m_value, c1, c2, c3, j_exp):
    omega_val = _parse_omega(omega)
    if rule_name == "fixed-b":
        if m_value is not None:
            return FixedBRule(m=m_value)
        return FixedBRule(b=b_frac if b_frac is not None else 1.0)
    if rule_name == "andrews":
        overrides = (j_exp, c1, c2)
        if all(v is not None for v in overrides):
            return AndrewsRule(j=j_exp, c1=c1, c2=c2, omega=omega_val)
        try:
            base = default_rule("andrews", kernel_name, omega_val)
        except ValueError as exc:
            raise ValueError(
                f"no default autoregressive plug-in constants for kernel "
                f"{kernel_name!r}; pass --j, --c1 and --c2 ({exc})"
            )
        return AndrewsRule(
            j=j_exp if j_exp is not None else base.j,
            c1=c1 if c1 is not None else base.c1,
            c2=c2 if c2 is not None else base.c2,
            omega=omega_val,
        )
    base = default_rule("newey-west", kernel_name, omega_val)
    if c1 is not None and c1 != int(c1):
        raise ValueError(f"--c1 must be a positive integer for the newey-west rule, got {c1}")
    return NeweyWestRule(
        cbar1=int(c1) if c1 is not None else base.cbar1,
        cbar2=c2 if c2 is not None else base.cbar2,
        cbar3=c3 if c3 is not None else base.cbar3,
        omega=omega_val,
    )


def _build_config(kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp):
    return EstimatorConfig(
        kernel=get_kernel(kernel),
        rule=_build_rule(rule, kernel, omega, b_frac, m_value, c1, c2, c3, j_exp),
        p=p,
    )


def _emit(payload, as_json: bool, out: str | None, human_lines):
    text = json.dumps(payload, indent=2) if as_json else "\n".join(human_lines)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
        click.echo(f"wrote {out}")
    else:
        click.echo(text)


def _friendly(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (
            AdjustmentNotApplicableError,
            CalibrationNotApplicableError,
            AugmentationImpossibleError,
        ) as exc:
            click.echo(f"refused: {exc}", err=True)
            sys.exit(3)
        except (ValueError, OSError) as exc:
            raise click.UsageError(str(exc))

    return wrapper


def _data_options(y_mode: str = "required"):
    def wrap(fn):
        fn = click.option(
            "--x", "x_spec", required=True,
            help="design matrix: CSV path or inline 'a,b;c,d'",
        )(fn)
        if y_mode != "none":
            fn = click.option(
                "--y", "y_spec", required=y_mode == "required",
                help="response vector: CSV path or inline 'a,b,c'",
            )(fn)
        fn = click.option(
            "--header", is_flag=True, help="input CSV files carry a header row"
        )(fn)
        return fn

    return wrap


def _hypothesis_options(require_restriction: bool = True):
    def wrap(fn):
        fn = click.option(
            "--R", "restriction_spec", required=require_restriction,
            help="restriction matrix (q x k): CSV path or inline literal",
        )(fn)
        fn = click.option(
            "--r", "target_spec", default=None,
            help="restriction target vector (default: zeros)",
        )(fn)
        return fn

    return wrap


def _estimator_options(fn):
    fn = click.option(
        "--kernel", type=click.Choice(list(kernel_names())), default="bartlett",
        show_default=True, help="smoothing kernel",
    )(fn)
    fn = click.option(
        "--rule", type=click.Choice(list(RULE_NAMES)), default="andrews",
        show_default=True, help="bandwidth rule",
    )(fn)
    fn = click.option("--p", type=int, default=1, show_default=True,
                      help="VAR prewhitening order")(fn)
    fn = click.option("--omega", default="ones", show_default=True,
                      help="score weights: 'ones', 'zero-first', or comma list")(fn)
    fn = click.option("--b", "b_frac", type=float, default=None,
                      help="fixed-b bandwidth fraction of n - p")(fn)
    fn = click.option("--m", "m_value", type=float, default=None,
                      help="explicit fixed bandwidth value")(fn)
    fn = click.option("--c1", type=float, default=None, help="bandwidth rule constant")(fn)
    fn = click.option("--c2", type=float, default=None, help="bandwidth rule constant")(fn)
    fn = click.option("--c3", type=float, default=None,
                      help="bandwidth rule exponent (newey-west)")(fn)
    fn = click.option("--j", "j_exp", type=int, default=None,
                      help="plug-in derivative order (andrews)")(fn)
    return fn


def _output_options(fn):
    fn = click.option("--json", "as_json", is_flag=True, help="emit JSON")(fn)
    fn = click.option("--out", default=None, help="write output to a file")(fn)
    return fn


def _mc_options(fn):
    fn = click.option("--reps", type=int, default=1000, show_default=True,
                      help="Monte Carlo replications")(fn)
    fn = click.option("--seed", type=int, default=0, show_default=True,
                      help="base seed (replication idx uses (seed, idx))")(fn)
    fn = click.option("--rho-grid", default=None,
                      help="comma-separated AR(1) grid (default: built-in grid)")(fn)
    return fn


def _problem_from(x_spec, restriction_spec, target_spec, header, y=None):
    X = _parse_matrix(x_spec, header)
    k = X.shape[1]
    if restriction_spec is None:
        R = np.eye(k)
    else:
        R = _parse_matrix(restriction_spec, header)
    r = np.zeros(R.shape[0]) if target_spec is None else _parse_vector(target_spec)
    return RegressionProblem(X, R, r, y=y)


def _family_from(rho_grid):
    if rho_grid is None:
        return AR1Grid(DEFAULT_RHO_GRID)
    return AR1Grid(_parse_floats(rho_grid))


@click.group()
def main():
    """Autocorrelation-robust tests of linear restrictions, with prewhitened
    kernel covariance estimation, design diagnostics, and Monte Carlo
    calibration."""


@main.command()
@_data_options()
@_hypothesis_options(require_restriction=False)
@_estimator_options
@_output_options
@_friendly
def estimate(x_spec, y_spec, header, restriction_spec, target_spec,
             kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp,
             as_json, out):
    """Run the prewhitened covariance pipeline at one response vector."""
    problem = _problem_from(x_spec, restriction_spec, target_spec, header)
    y = _parse_vector(y_spec, header)
    config = _build_config(kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp)
    outcome = assemble_omega(problem, y, config)
    if not outcome.well_defined:
        payload = {"status": outcome.status, "reason": outcome.reason}
        lines = [f"status: {outcome.status}", f"reason: {outcome.reason}"]
        if outcome.bandwidth is not None and outcome.bandwidth.reason is not None:
            payload["bandwidth_reason"] = outcome.bandwidth.reason
            lines.append(f"bandwidth reason: {outcome.bandwidth.reason}")
    else:
        payload = {
            "status": outcome.status,
            "bandwidth": outcome.m,
            "psi": outcome.psi.tolist(),
        }
        lines = [
            f"status: {outcome.status}",
            f"bandwidth: {outcome.m:g}",
            f"psi:\n{np.array2string(outcome.psi)}",
        ]
        if restriction_spec is not None:
            payload["omega"] = outcome.omega.tolist()
            lines.append(f"omega:\n{np.array2string(outcome.omega)}")
    _emit(payload, as_json, out, lines)


def _result_payload(res):
    payload = {
        "t": res.t_value,
        "defined": res.defined,
        "reject": res.reject,
        "C": res.critical_value,
    }
    if not res.omega.well_defined:
        payload["reason"] = res.omega.reason
    if res.scenario is not None:
        payload["scenario"] = res.scenario
    return payload


def _result_lines(res):
    lines = [f"t: {res.t_value:.10g}", f"defined: {str(res.defined).lower()}"]
    if not res.omega.well_defined:
        lines.append(f"reason: {res.omega.reason}")
    if res.critical_value is not None:
        lines.append(f"C: {res.critical_value:g}")
        lines.append(f"reject: {str(res.reject).lower()}")
    if res.scenario is not None:
        lines.append(f"scenario: {res.scenario}")
    return lines


@main.command(name="test")
@_data_options()
@_hypothesis_options()
@_estimator_options
@click.option("--C", "critical_value", type=float, default=None,
              help="critical value; enables the reject field")
@_output_options
@_friendly
def test_cmd(x_spec, y_spec, header, restriction_spec, target_spec,
             kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp,
             critical_value, as_json, out):
    """Evaluate the robust statistic for H0: R beta = r."""
    problem = _problem_from(x_spec, restriction_spec, target_spec, header)
    y = _parse_vector(y_spec, header)
    config = _build_config(kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp)
    res = test_statistic(problem, y, config, critical_value)
    _emit(_result_payload(res), as_json, out, _result_lines(res))


@main.command()
@_data_options(y_mode="optional")
@_hypothesis_options()
@_estimator_options
@click.option("--C", "critical_value", type=float, default=None,
              help="critical value for the adjusted statistic (needs --y)")
@_output_options
@_friendly
def adjust(x_spec, y_spec, header, restriction_spec, target_spec,
           kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp,
           critical_value, as_json, out):
    """Augment the design with boundary directions; optionally test with it."""
    problem = _problem_from(x_spec, restriction_spec, target_spec, header)
    config = _build_config(kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp)
    adj = build_adjusted(problem, config)
    rule_obj = adj.config.rule
    omega_bar = None if isinstance(rule_obj, FixedBRule) else list(rule_obj.omega)
    payload = {
        "applicable": True,
        "scenario": adj.scenario,
        "kbar": adj.kbar,
        "x_bar": adj.problem.X.tolist(),
        "r_bar": adj.problem.R.tolist(),
        "omega_bar": omega_bar,
    }
    lines = [
        "applicable: true",
        f"scenario: {adj.scenario}",
        f"kbar: {adj.kbar}",
        f"x_bar:\n{np.array2string(adj.problem.X)}",
        f"r_bar:\n{np.array2string(adj.problem.R)}",
        f"omega_bar: {omega_bar}",
    ]
    if y_spec is not None:
        res = adjusted_statistic(adj, _parse_vector(y_spec, header), critical_value)
        payload.update(_result_payload(res))
        lines.extend(_result_lines(res))
    _emit(payload, as_json, out, lines)


@main.command(name="diagnose")
@_data_options(y_mode="none")
@_hypothesis_options()
@_estimator_options
@click.option("--C", "critical_value", type=float, required=True,
              help="critical value the test would use")
@click.option("--probes", type=int, default=1000, show_default=True,
              help="random probes used to certify the test is nontrivial")
@click.option("--seed", type=int, default=0, show_default=True)
@_output_options
@_friendly
def diagnose_cmd(x_spec, header, restriction_spec, target_spec,
                 kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp,
                 critical_value, probes, seed, as_json, out):
    """Classify the breakdown behaviour of a design at a critical value."""
    problem = _problem_from(x_spec, restriction_spec, target_spec, header)
    config = _build_config(kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp)
    report = run_diagnose(problem, config, critical_value, probes=probes, seed=seed)

    def grad_str(g):
        return "unknown" if g is None else g

    payload = {
        "verdict": report.verdict,
        "C": report.critical_value,
        "t_plus": {"t": report.t_plus.t_value, "defined": report.t_plus.defined},
        "t_minus": {"t": report.t_minus.t_value, "defined": report.t_minus.defined},
        "gradient_exists_plus": grad_str(report.gradient_exists_plus),
        "gradient_exists_minus": grad_str(report.gradient_exists_minus),
        "evidence": report.evidence,
    }
    lines = [
        f"verdict: {report.verdict}",
        f"t at constant direction: {report.t_plus.t_value:.10g} "
        f"(defined: {str(report.t_plus.defined).lower()})",
        f"t at alternating direction: {report.t_minus.t_value:.10g} "
        f"(defined: {str(report.t_minus.defined).lower()})",
        f"gradient exists (constant): {grad_str(report.gradient_exists_plus)}",
        f"gradient exists (alternating): {grad_str(report.gradient_exists_minus)}",
    ]
    _emit(payload, as_json, out, lines)


def _study_target(problem, config):
    """Adjusted problem when a scenario applies, the bare problem otherwise."""
    selection = select_scenario(problem)
    if selection.applicable:
        return build_adjusted(problem, config), selection.scenario
    return problem, None


@main.command()
@_data_options(y_mode="none")
@_hypothesis_options()
@_estimator_options
@click.option("--delta", type=float, required=True, help="target size level")
@click.option("--tol", type=float, default=None,
              help="calibration tolerance below delta (default delta/10)")
@_mc_options
@_output_options
@_friendly
def calibrate(x_spec, header, restriction_spec, target_spec,
              kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp,
              delta, tol, reps, seed, rho_grid, as_json, out):
    """Calibrate a worst-case critical value over an AR(1) family."""
    problem = _problem_from(x_spec, restriction_spec, target_spec, header)
    config = _build_config(kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp)
    mc = McConfig(replications=reps, seed=seed, family=_family_from(rho_grid))
    target, scenario = _study_target(problem, config)
    result = calibrate_critical_value(target, mc, delta, est_config=config, tol=tol)
    payload = {
        "C": result.critical_value,
        "size": result.size,
        "delta": result.delta,
        "scenario": scenario,
        "reps": reps,
        "seed": seed,
        "rates": result.rates,
    }
    lines = [
        f"C: {result.critical_value:.10g}",
        f"size: {result.size:.6g} (target {result.delta:g})",
        f"scenario: {scenario}",
    ]
    _emit(payload, as_json, out, lines)


@main.command()
@_data_options(y_mode="none")
@_hypothesis_options()
@_estimator_options
@click.option("--C", "critical_value", type=float, default=None,
              help="critical value (omit to calibrate at --delta first)")
@click.option("--delta", type=float, default=None,
              help="size level used to calibrate when --C is omitted")
@click.option("--distances", default="0,1,2,5", show_default=True,
              help="standardized alternative distances")
@_mc_options
@_output_options
@_friendly
def study(x_spec, header, restriction_spec, target_spec,
          kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp,
          critical_value, delta, distances, reps, seed, rho_grid, as_json, out):
    """Size and power curves over the AR(1) family at given distances."""
    problem = _problem_from(x_spec, restriction_spec, target_spec, header)
    config = _build_config(kernel, rule, p, omega, b_frac, m_value, c1, c2, c3, j_exp)
    mc = McConfig(replications=reps, seed=seed, family=_family_from(rho_grid))
    target, scenario = _study_target(problem, config)
    if critical_value is None:
        if delta is None:
            raise ValueError("provide --C or --delta")
        result = calibrate_critical_value(target, mc, delta, est_config=config)
        critical_value = result.critical_value
    curve = power_curve(
        target, mc, critical_value, _parse_floats(distances), est_config=config
    )
    null_rates = [pt.rate for pt in curve.points if pt.distance == 0.0]
    payload = {
        "C": critical_value,
        "scenario": scenario,
        "max_null_rate": max(null_rates) if null_rates else None,
        "points": curve.to_json(),
    }
    if as_json:
        _emit(payload, True, out, [])
    else:
        text = curve.to_csv(header=True)
        if out:
            with open(out, "w") as fh:
                fh.write(text)
            click.echo(f"wrote {out}")
        else:
            click.echo(text, nl=False)


if __name__ == "__main__":
    main()
