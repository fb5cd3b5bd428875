"""Command-line interface.

Every command resolves its inputs into a flat spec, computes through the
library, and writes a CSV (default) or JSON document whose header embeds
the tool version, the resolved spec, the seed, and the tolerances in
play, so any output file can be reproduced exactly.  Numbers print with
12 significant digits.  Exit codes: 0 success, 2 validation error,
3 numerical error.
"""

from __future__ import annotations

import json
import math
import os
import sys
from functools import wraps

import click
import numpy as np

from . import __version__, asymptotics, mc, search
from .exceptions import NumericalError, ValidationError
from .fim import fim_entries_1d, fim_entries_2d
from .model import Design1D, GridDesign2D, OuParams, SheetParams

OUTPUT_DIR_ENV = "OUDESIGN_OUTPUT_DIR"


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.12g}"
    return str(value)


def _json_value(value):
    if isinstance(value, float):
        if math.isnan(value):
            return None
        return float(f"{value:.12g}")
    return value


def _emit(ctx, meta: dict, columns: list[str], rows: list[tuple]) -> None:
    fmt = ctx.obj["format"]
    if fmt == "json":
        doc = {
            "meta": meta,
            "columns": columns,
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = [f"# {key}: {json.dumps(val, default=str)}" for key, val in meta.items()]
        lines.append(",".join(columns))
        lines.extend(",".join(_fmt(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    output = ctx.obj["output"]
    if output is None:
        click.echo(text, nl=False)
        return
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(output):
        output = os.path.join(base, output)
    with open(output, "w", encoding="utf-8") as fh:
        fh.write(text)


def _meta(spec: dict, seed=None, tolerances: dict | None = None) -> dict:
    meta = {"tool": f"oudesign {__version__}", "spec": spec}
    if seed is not None:
        meta["seed"] = seed
    if tolerances:
        meta["tolerances"] = tolerances
    return meta


def _handle_errors(fn):
    @wraps(fn)
    def wrapper(ctx, *args, **kwargs):
        try:
            return fn(ctx, *args, **kwargs)
        except ValidationError as exc:
            _report_error(ctx, exc, 2)
        except NumericalError as exc:
            _report_error(ctx, exc, 3)

    return wrapper


def _report_error(ctx, exc, code):
    if ctx.obj.get("json_errors"):
        click.echo(
            json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}),
            err=True,
        )
    else:
        click.echo(f"error: {exc}", err=True)
    sys.exit(code)


def _parse_points(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise ValidationError(f"cannot parse design points {text!r}: {exc}") from exc


def _parse_grid(text: str) -> tuple[tuple[float, ...], tuple[float, ...]]:
    parts = text.split("x")
    if len(parts) != 2:
        raise ValidationError(f"grid spec must look like 's1,s2,...xt1,t2,...', got {text!r}")
    return _parse_points(parts[0]), _parse_points(parts[1])


def _param_range(lo: float, hi: float, points: int, log: bool) -> np.ndarray:
    if points < 2 or hi <= lo:
        raise ValidationError("parameter range needs hi > lo and at least two points")
    if log:
        if lo <= 0:
            raise ValidationError("log-spaced ranges need lo > 0")
        return np.geomspace(lo, hi, points)
    return np.linspace(lo, hi, points)


@click.group()
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True, help="Output document format.")
@click.option("--output", "-o", type=str, default=None,
              help=f"Output file (default stdout); relative paths resolve against ${OUTPUT_DIR_ENV}.")
@click.option("--json-errors", is_flag=True, help="Report errors as JSON on stderr.")
@click.version_option(version=__version__)
@click.pass_context
def main(ctx, fmt, output, json_errors):
    """Optimal designs for regression driven by Ornstein-Uhlenbeck noise."""
    ctx.ensure_object(dict)
    ctx.obj["format"] = fmt
    ctx.obj["output"] = output
    ctx.obj["json_errors"] = json_errors


@main.command("fim")
@click.option("--model", type=click.Choice(["process", "sheet"]), required=True)
@click.option("--beta", type=float, required=True)
@click.option("--gamma", type=float, default=None)
@click.option("--sigma", type=float, default=1.0, show_default=True)
@click.option("--design", type=str, default=None, help="1D points, e.g. 0,0.5,1")
@click.option("--grid", type=str, default=None, help="2D grid, e.g. 0,0.5,1x0,1")
@click.pass_context
@_handle_errors
def cmd_fim(ctx, model, beta, gamma, sigma, design, grid):
    """Information-matrix entries and matrix for a design."""
    spec = {"command": "fim", "model": model, "beta": beta, "gamma": gamma,
            "sigma": sigma, "design": design, "grid": grid}
    rows = []
    if model == "process":
        if design is None:
            raise ValidationError("--design is required for --model process")
        d = Design1D(_parse_points(design))
        entries = fim_entries_1d(OuParams(beta, sigma), d)
        matrix = entries.matrix()
        rows += [("entry", "l1", entries.l1), ("entry", "l2", entries.l2),
                 ("entry", "l3", entries.l3)]
    else:
        if gamma is None or grid is None:
            raise ValidationError("--gamma and --grid are required for --model sheet")
        s_pts, t_pts = _parse_grid(grid)
        g = GridDesign2D(Design1D(s_pts), Design1D(t_pts))
        entries = fim_entries_2d(SheetParams(beta, gamma, sigma), g)
        matrix = entries.matrix()
        se, te = entries.s_entries, entries.t_entries
        rows += [("entry", "l1", se.l1), ("entry", "l2", se.l2), ("entry", "l3", se.l3),
                 ("entry", "m1", te.l1), ("entry", "m2", te.l2), ("entry", "m3", te.l3)]
    for i in range(matrix.shape[0]):
        for j in range(matrix.shape[1]):
            rows.append(("matrix", f"a{i}{j}", matrix[i, j]))
    _emit(ctx, _meta(spec), ["section", "name", "value"], rows)


@main.group("optimize")
def optimize_group():
    """Design searches under the D or K criterion."""


def _emit_search(ctx, spec, tolerances, result, coords):
    columns = [*coords, "value", "converged", "collapsed", "iterations"]
    argopt = result.argopt if isinstance(result.argopt, tuple) else (result.argopt,)
    rows = [(*argopt, result.value, result.converged, result.collapsed, result.iterations)]
    _emit(ctx, _meta(spec, tolerances=tolerances), columns, rows)


@optimize_group.command("three-point")
@click.option("--beta", type=float, required=True)
@click.option("--criterion", type=click.Choice(["D", "K"], case_sensitive=False), required=True)
@click.option("--grid-resolution", type=int, default=2001, show_default=True)
@click.option("--refine-tol", type=float, default=1e-10, show_default=True)
@click.pass_context
@_handle_errors
def cmd_three_point(ctx, beta, criterion, grid_resolution, refine_tol):
    """Free point of the design {0, d, 1} on the unit interval."""
    spec = {"command": "optimize three-point", "beta": beta, "criterion": criterion.upper()}
    tol = {"grid_resolution": grid_resolution, "refine_tol": refine_tol}
    res = search.three_point_restricted_1d(
        OuParams(beta), criterion, grid_resolution, refine_tol
    )
    _emit_search(ctx, spec, tol, res, ["d_opt"])


@optimize_group.command("nine-point")
@click.option("--beta", type=float, required=True)
@click.option("--gamma", type=float, required=True)
@click.option("--criterion", type=click.Choice(["D", "K"], case_sensitive=False), required=True)
@click.option("--grid-resolution", type=int, default=201, show_default=True)
@click.option("--refine-tol", type=float, default=1e-8, show_default=True)
@click.pass_context
@_handle_errors
def cmd_nine_point(ctx, beta, gamma, criterion, grid_resolution, refine_tol):
    """Free coordinates of the grid {0, d, 1} x {0, delta, 1}."""
    spec = {"command": "optimize nine-point", "beta": beta, "gamma": gamma,
            "criterion": criterion.upper()}
    tol = {"grid_resolution": grid_resolution, "refine_tol": refine_tol}
    res = search.nine_point_restricted_2d(
        SheetParams(beta, gamma), criterion, grid_resolution, refine_tol
    )
    _emit_search(ctx, spec, tol, res, ["d_opt", "delta_opt"])


@optimize_group.command("two-point")
@click.option("--beta", type=float, required=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.pass_context
@_handle_errors
def cmd_two_point(ctx, beta, tol):
    """K-optimal spacing of the two-point design {0, d}."""
    spec = {"command": "optimize two-point", "beta": beta}
    res = search.two_point_k_optimal(OuParams(beta), tol)
    _emit_search(ctx, spec, {"tol": tol}, res, ["d_opt"])


@optimize_group.command("four-point")
@click.option("--beta", type=float, required=True)
@click.option("--gamma", type=float, required=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
@click.pass_context
@_handle_errors
def cmd_four_point(ctx, beta, gamma, tol):
    """K-optimal spacings of the 2x2 grid {0, d} x {0, delta}."""
    spec = {"command": "optimize four-point", "beta": beta, "gamma": gamma}
    res = search.four_point_grid_k_optimal(SheetParams(beta, gamma), tol)
    _emit_search(ctx, spec, {"tol": tol}, res, ["d_opt", "delta_opt"])


@optimize_group.command("equidistant")
@click.option("--beta", type=float, required=True)
@click.option("--n", type=int, required=True)
@click.option("--tol", type=float, default=1e-10, show_default=True)
@click.pass_context
@_handle_errors
def cmd_equidistant(ctx, beta, n, tol):
    """K-optimal step size of the equidistant n-point design."""
    spec = {"command": "optimize equidistant", "beta": beta, "n": n}
    res = search.equidistant_k_optimal_1d(OuParams(beta), n, tol)
    _emit_search(ctx, spec, {"tol": tol}, res, ["d_opt"])


@main.group("asymptotics")
def asymptotics_group():
    """Doubling ratios, closed-form limits, and limit surfaces."""


@asymptotics_group.command("limits")
@click.option("--beta", type=float, required=True)
@click.pass_context
@_handle_errors
def cmd_limits(ctx, beta):
    """Closed-form window-doubling limits at one rate."""
    spec = {"command": "asymptotics limits", "beta": beta}
    rows = [(
        beta,
        asymptotics.domain_doubling_limit_d(beta),
        asymptotics.domain_doubling_limit_k(beta),
        asymptotics.domain_doubling_limit_d_axis(beta),
    )]
    _emit(ctx, _meta(spec), ["beta", "limit_d", "limit_k", "limit_d_axis"], rows)


@asymptotics_group.command("double")
@click.option("--model", type=click.Choice(["process", "sheet"]), default="process",
              show_default=True)
@click.option("--beta", type=float, required=True)
@click.option("--gamma", type=float, default=None)
@click.option("--n", type=int, required=True)
@click.option("--m", type=int, default=None)
@click.option("--mode", type=str, required=True,
              help="process: infill|domain; sheet: infill-both|infill-one|domain-both|domain-one")
@click.pass_context
@_handle_errors
def cmd_double(ctx, model, beta, gamma, n, m, mode):
    """Criterion ratios for one doubled design."""
    spec = {"command": "asymptotics double", "model": model, "beta": beta,
            "gamma": gamma, "n": n, "m": m, "mode": mode}
    if model == "process":
        report = asymptotics.doubling_ratio_1d(OuParams(beta), n, mode)
    else:
        if gamma is None:
            raise ValidationError("--gamma is required for --model sheet")
        report = asymptotics.doubling_ratio_2d(SheetParams(beta, gamma), n, m if m else n, mode)
    rows = [(
        report.mode, report.n, report.m if report.m is not None else "",
        report.ratio_det, report.ratio_cond,
        report.limit_det if report.limit_det is not None else "",
        report.limit_cond if report.limit_cond is not None else "",
    )]
    _emit(ctx, _meta(spec),
          ["mode", "n", "m", "ratio_det", "ratio_cond", "limit_det", "limit_cond"], rows)


@asymptotics_group.command("surface")
@click.option("--mode", type=click.Choice(["both", "one"]), required=True)
@click.option("--param-min", type=float, default=0.05, show_default=True)
@click.option("--param-max", type=float, default=50.0, show_default=True)
@click.option("--grid-size", type=int, default=40, show_default=True)
@click.option("--tol", type=float, default=1e-3, show_default=True)
@click.pass_context
@_handle_errors
def cmd_surface(ctx, mode, param_min, param_max, grid_size, tol):
    """Numeric condition-number doubling-limit surface over a rate grid."""
    spec = {"command": "asymptotics surface", "mode": mode, "param_min": param_min,
            "param_max": param_max, "grid_size": grid_size}
    grid = _param_range(param_min, param_max, grid_size, log=True)
    cells = asymptotics.cond_limit_surface_2d(grid, grid, mode=mode, tol=tol)
    rows = [(c.beta, c.gamma, c.estimate, c.error_estimate, c.converged) for c in cells]
    _emit(ctx, _meta(spec, tolerances={"tol": tol}),
          ["beta", "gamma", "estimate", "error_estimate", "converged"], rows)


@asymptotics_group.command("kopt-curve")
@click.option("--family", type=click.Choice(["three-point", "nine-point"]), required=True)
@click.option("--beta-min", type=float, required=True)
@click.option("--beta-max", type=float, required=True)
@click.option("--points", type=int, default=50, show_default=True)
@click.option("--gamma-min", type=float, default=None)
@click.option("--gamma-max", type=float, default=None)
@click.option("--gamma-points", type=int, default=None)
@click.option("--log/--linear", default=False, show_default=True)
@click.pass_context
@_handle_errors
def cmd_kopt_curve(ctx, family, beta_min, beta_max, points, gamma_min, gamma_max,
                   gamma_points, log):
    """K-optimal coordinates swept over the rate parameter(s)."""
    spec = {"command": "asymptotics kopt-curve", "family": family,
            "beta_min": beta_min, "beta_max": beta_max, "points": points,
            "gamma_min": gamma_min, "gamma_max": gamma_max,
            "gamma_points": gamma_points, "log": log}
    betas = _param_range(beta_min, beta_max, points, log)
    if family == "three-point":
        rows = [
            (r.beta, r.d_opt, r.k_value, r.collapsed)
            for r in search.kopt_curve_1d(betas)
        ]
        _emit(ctx, _meta(spec), ["beta", "d_opt", "k_value", "collapsed"], rows)
    else:
        if gamma_min is None or gamma_max is None:
            raise ValidationError("nine-point curves need --gamma-min/--gamma-max")
        gammas = _param_range(gamma_min, gamma_max, gamma_points or points, log)
        rows = [
            (r.beta, r.gamma, r.d_opt, r.delta_opt, r.k_value, r.collapsed_s, r.collapsed_t)
            for r in search.kopt_surface_2d(betas, gammas)
        ]
        _emit(ctx, _meta(spec),
              ["beta", "gamma", "d_opt", "delta_opt", "k_value", "collapsed_s", "collapsed_t"],
              rows)


@main.group("simulate")
def simulate_group():
    """Monte Carlo efficiency comparisons of K- vs D-optimal designs."""


TABLE1_SMALL = (0.01, 0.03, 0.05, 0.10, 0.15)
TABLE1_LARGE = (10.0, 15.0, 20.0, 25.0, 30.0)


@simulate_group.command("eff")
@click.option("--beta", type=float, required=True)
@click.option("--gamma", type=float, default=None)
@click.option("--reps", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sigma", type=float, default=0.25, show_default=True)
@click.pass_context
@_handle_errors
def cmd_eff(ctx, beta, gamma, reps, seed, sigma):
    """Relative efficiency at a single rate (pair)."""
    spec = {"command": "simulate eff", "beta": beta, "gamma": gamma,
            "reps": reps, "sigma": sigma}
    config = mc.McConfig(replicates=reps, seed=seed, sigma=sigma)
    if gamma is None:
        rep = mc.run_efficiency_1d(OuParams(beta), config)
        rows = [(beta, rep.mse_k, rep.mse_d, rep.eff_percent, rep.mc_standard_error)]
        cols = ["beta", "mse_k", "mse_d", "eff_percent", "mc_se"]
    else:
        rep = mc.run_efficiency_2d(SheetParams(beta, gamma), config)
        rows = [(beta, gamma, rep.mse_k, rep.mse_d, rep.eff_percent, rep.mc_standard_error)]
        cols = ["beta", "gamma", "mse_k", "mse_d", "eff_percent", "mc_se"]
    _emit(ctx, _meta(spec, seed=seed), cols, rows)


@simulate_group.command("table1")
@click.option("--reps", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sigma", type=float, default=0.25, show_default=True)
@click.pass_context
@_handle_errors
def cmd_table1(ctx, reps, seed, sigma):
    """Efficiency grids over the two 5x5 rate blocks."""
    spec = {"command": "simulate table1", "reps": reps, "sigma": sigma,
            "small_block": list(TABLE1_SMALL), "large_block": list(TABLE1_LARGE)}
    config = mc.McConfig(replicates=reps, seed=seed, sigma=sigma)
    rows = []
    for block, values in (("small", TABLE1_SMALL), ("large", TABLE1_LARGE)):
        for b in values:
            for g in values:
                rep = mc.run_efficiency_2d(SheetParams(b, g), config)
                rows.append((block, b, g, rep.mse_k, rep.mse_d,
                             rep.eff_percent, rep.mc_standard_error))
    _emit(ctx, _meta(spec, seed=seed),
          ["block", "beta", "gamma", "mse_k", "mse_d", "eff_percent", "mc_se"], rows)


@simulate_group.command("curve")
@click.option("--interval", type=click.Choice(["lower", "upper"]), required=True)
@click.option("--points", type=int, default=25, show_default=True)
@click.option("--reps", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--sigma", type=float, default=0.25, show_default=True)
@click.pass_context
@_handle_errors
def cmd_curve(ctx, interval, points, reps, seed, sigma):
    """Efficiency sweep over the rates below (lower) or above (upper)
    the collapse interval."""
    spec = {"command": "simulate curve", "interval": interval, "points": points,
            "reps": reps, "sigma": sigma}
    bounds = search.collapse_interval()
    if interval == "lower":
        betas = np.linspace(0.02, bounds.lower - 0.01, points)
    else:
        betas = np.geomspace(bounds.upper + 0.05, 100.0, points)
    config = mc.McConfig(replicates=reps, seed=seed, sigma=sigma)
    rows = [
        (p.beta, p.mse_k, p.mse_d, p.eff_percent, p.mc_standard_error, p.collapsed)
        for p in mc.efficiency_curve(betas, config)
    ]
    _emit(ctx, _meta(spec, seed=seed),
          ["beta", "mse_k", "mse_d", "eff_percent", "mc_se", "collapsed"], rows)


if __name__ == "__main__":
    main()
