"""Command-line front end writing figure-ready CSV or JSON.

Commands
--------
derived         derived constants (gamma, beta, tanh theta, g_c, threshold)
spectrum        sector levels vs coupling: ED levels, G-function zeros, poles
gzeros          G-function zeros in an energy window at fixed coupling
special-points  couplings where a pole line carries a true eigenvalue
collapse        collapse-point classification and effective-well constants
ladder          geometric bound-state ladder: theory ratios and FD levels
gap             first excitation gap at one parameter point
gap-exponent    log-gap slope fit along x = -log10(1 - g/g_c)
gap-vs-delta    gap across delta = U at fixed near-critical coupling

Output contract: CSV starts with '#'-prefixed metadata lines (resolved
config, package versions), then a header row and data rows with floats at
17 significant digits; JSON mirrors the rows plus config/versions/summary
blocks and a failure manifest.  Identical configs produce byte-identical
data sections.  Exit status: 0 success, 2 invalid parameters, 3 finished
with failures (failure records also go to stderr as JSON lines).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, collapse, criticality, ed, gfunction, model
from .model import ModelParams, SectorLabel, all_sectors

__all__ = ["build_parser", "main", "console_main"]

SECTOR_NAMES = {
    "even+": SectorLabel(model.Q_EVEN, 1),
    "even-": SectorLabel(model.Q_EVEN, -1),
    "odd+": SectorLabel(model.Q_ODD, 1),
    "odd-": SectorLabel(model.Q_ODD, -1),
}


def _sectors_from(name: str) -> list[SectorLabel]:
    if name == "all":
        return list(all_sectors())
    return [SECTOR_NAMES[name]]


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


@dataclass
class RunResult:
    command: str
    config: dict
    columns: list[str]
    rows: list[tuple]
    summary: dict = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)


def _config_of(args: argparse.Namespace) -> dict:
    skip = {"handler", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _versions() -> dict:
    import scipy

    vers = {"tpstark": __version__, "numpy": np.__version__, "scipy": scipy.__version__}
    try:
        import numba

        vers["numba"] = numba.__version__
    except ImportError:
        pass
    return vers


def _write_csv(result: RunResult, stream) -> None:
    out = io.StringIO()
    out.write(f"# tpstark {result.command}\n")
    for key, value in sorted(result.config.items()):
        out.write(f"# config.{key} = {value}\n")
    for key, value in sorted(_versions().items()):
        out.write(f"# version.{key} = {value}\n")
    for key, value in sorted(result.summary.items()):
        out.write(f"# summary.{key} = {_fmt(value)}\n")
    out.write(",".join(result.columns) + "\n")
    for row in result.rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")
    for rec in result.failures:
        out.write("# failure: " + json.dumps(rec, sort_keys=True) + "\n")
    stream.write(out.getvalue())


def _write_json(result: RunResult, stream) -> None:
    payload = {
        "command": result.command,
        "config": result.config,
        "versions": _versions(),
        "summary": result.summary,
        "rows": [dict(zip(result.columns, row)) for row in result.rows],
        "failures": result.failures,
    }
    stream.write(json.dumps(payload, sort_keys=True, indent=2, allow_nan=True) + "\n")


def _emit_error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")


def _apply_threads(args: argparse.Namespace) -> int:
    n = args.threads
    if n is None:
        n = int(os.environ.get("TPSTARK_THREADS", "1"))
    if n < 1:
        raise ValueError("thread count must be positive")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, str(n))
    args.threads = n
    return n


# -- command handlers ---------------------------------------------------------

def _cmd_derived(args) -> RunResult:
    params = ModelParams(delta=args.delta, stark=args.u, coupling=args.g)
    d = model.derive_params(params)
    columns = ["delta", "u", "g", "gamma", "beta", "tanh_theta", "g_critical",
               "x", "threshold_energy"]
    row = (args.delta, args.u, args.g, d.gamma, d.beta, d.tanh_theta, d.g_crit,
           model.x_from_coupling(args.g, args.u), model.threshold_energy(args.delta, args.u))
    return RunResult("derived", _config_of(args), columns, [row])


def _spectrum_point(params: ModelParams, sector: SectorLabel, levels: int,
                    method: str, tol: float, rows: list, failures: list):
    """Append level rows for one (g, sector); return the energy window used."""
    x = model.x_from_coupling(params.coupling, params.stark)
    # ED supplies the window for the zero search even in gfunction-only mode
    spec = ed.converge(params, sectors=sector, count=levels, tol=tol)
    if method in ("ed", "both"):
        if not spec.converged:
            failures.append({"kind": "ed-unconverged", "g": params.coupling,
                             "sector_q": sector.q, "parity": sector.parity,
                             "residual": spec.residual})
        for i, e in enumerate(spec.energies):
            rows.append((params.coupling, x, sector.q, sector.parity, "ed", i,
                         float(e), model.scaled_energy(float(e), params, sector),
                         spec.residual))
    lo = float(spec.energies[0]) - 0.25
    hi = float(spec.energies[-1]) + 1e-6
    if method in ("gfunction", "both"):
        try:
            found = gfunction.find_zeros(params, sector, lo, hi)
            for i, e in enumerate(found.energies[:levels]):
                rows.append((params.coupling, x, sector.q, sector.parity,
                             "gfunction", i, float(e),
                             model.scaled_energy(float(e), params, sector), 0.0))
        except (gfunction.SeriesConvergenceError, gfunction.PoleHitError) as exc:
            failures.append({"kind": "gfunction", "g": params.coupling,
                             "sector_q": sector.q, "parity": sector.parity,
                             "message": str(exc)})
    return lo, hi


def _cmd_spectrum(args) -> RunResult:
    if args.g is not None:
        g_values = [args.g]
    else:
        if args.steps < 2:
            raise ValueError("need at least 2 steps for a sweep")
        g_values = list(np.linspace(args.g_min, args.g_max, args.steps))
    sectors = _sectors_from(args.sector)
    rows: list[tuple] = []
    failures: list[dict] = []
    for g in g_values:
        params = ModelParams(delta=args.delta, stark=args.u, coupling=float(g))
        windows: dict[float, tuple] = {}
        for sector in sectors:
            lo, hi = _spectrum_point(params, sector, args.levels, args.method,
                                     args.tol, rows, failures)
            if sector.q in windows:
                lo = min(lo, windows[sector.q][0])
                hi = max(hi, windows[sector.q][1])
            windows[sector.q] = (lo, hi)
        # pole lines depend on q only; one set of rows per (g, q)
        x = model.x_from_coupling(params.coupling, params.stark)
        for q, (lo, hi) in windows.items():
            for idx, e in gfunction.pole_energies(params, q, lo, hi):
                rows.append((params.coupling, x, q, 0, "pole", idx, e,
                             model.scaled_energy(e, params, q), 0.0))
    rows.sort(key=lambda r: (r[0], r[2], r[3], r[4], r[5]))
    columns = ["g", "x", "sector_q", "parity", "method", "level_index",
               "energy", "energy_scaled", "residual"]
    return RunResult("spectrum", _config_of(args), columns, rows, failures=failures)


def _cmd_gzeros(args) -> RunResult:
    params = ModelParams(delta=args.delta, stark=args.u, coupling=args.g)
    rows: list[tuple] = []
    failures: list[dict] = []
    for sector in _sectors_from(args.sector):
        try:
            found = gfunction.find_zeros(params, sector, args.e_min, args.e_max,
                                         grid_density=args.grid_density,
                                         refine_tol=args.refine_tol,
                                         series_tol=args.series_tol,
                                         n_max=args.n_max)
        except gfunction.SeriesConvergenceError as exc:
            failures.append({"kind": "series-unconverged", "sector_q": sector.q,
                             "parity": sector.parity, "message": str(exc)})
            continue
        for i, e in enumerate(found.energies):
            rows.append((sector.q, sector.parity, i, float(e),
                         model.scaled_energy(float(e), params, sector)))
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    columns = ["sector_q", "parity", "index", "energy", "energy_scaled"]
    return RunResult("gzeros", _config_of(args), columns, rows, failures=failures)


def _cmd_special_points(args) -> RunResult:
    sector = SECTOR_NAMES[args.sector]
    points = gfunction.find_nondegenerate_points(
        args.delta, args.u, args.pole_index, sector,
        x_min=args.x_min, x_max=args.x_max, grid_points=args.grid_points,
        n_max=args.n_max)
    rows = [(i, p.x, p.coupling, p.energy, p.pole_index, sector.q, sector.parity)
            for i, p in enumerate(points)]
    columns = ["index", "x", "g", "energy", "pole_index", "sector_q", "parity"]
    return RunResult("special-points", _config_of(args), columns, rows,
                     summary={"count": len(rows)})


def _cmd_collapse(args) -> RunResult:
    c = collapse.classify(args.delta, args.u)
    depth = collapse.depth_coefficient(args.delta, args.u, args.kappa_sq)
    try:
        nu2 = collapse.nu_squared(args.delta, args.u, args.kappa_sq)
    except ValueError:
        nu2 = math.nan
    slope = collapse.faddeev_log_slope(args.delta, args.u, kappa_sq=args.kappa_sq)
    columns = ["delta", "u", "kind", "threshold_energy", "collapse_energy",
               "depth", "nu_squared", "faddeev_log_slope"]
    row = (args.delta, args.u, c.kind.value, c.threshold_energy,
           c.collapse_energy_if_full if c.collapse_energy_if_full is not None else math.nan,
           depth, nu2, slope)
    return RunResult("collapse", _config_of(args), columns, [row],
                     summary={"kind": c.kind.value})


def _cmd_ladder(args) -> RunResult:
    ladder = collapse.ladder_ratios(args.delta, args.u, args.count - 1)
    fd = None
    if args.fd:
        fd = collapse.fd_bound_levels(args.delta, args.u, l_x=args.l_x,
                                      n_x=args.n_x, count=args.count,
                                      auto_domain=args.auto_domain,
                                      check_grid=not args.no_check_grid)
    rows = []
    failures: list[dict] = []
    for n in range(args.count):
        ratio = float(ladder.ratios[n])
        if fd is not None and n < len(fd.kappa_sq):
            k2 = float(fd.kappa_sq[n])
            fd_ratio = k2 / float(fd.kappa_sq[0])
            conv = bool(fd.grid_converged[n])
            if not conv:
                failures.append({"kind": "fd-grid-unconverged", "level": n})
            rows.append((n, ratio, k2, fd_ratio, int(conv)))
        else:
            rows.append((n, ratio, math.nan, math.nan, 0))
            if fd is not None:
                failures.append({"kind": "fd-level-missing", "level": n})
    columns = ["n", "ratio_theory", "kappa_sq_fd", "ratio_fd", "grid_converged"]
    summary = {"nu_squared": ladder.nu2, "decay_rate": ladder.decay_rate}
    return RunResult("ladder", _config_of(args), columns, rows,
                     summary=summary, failures=failures)


def _cmd_gap(args) -> RunResult:
    if args.g is None and args.x is None:
        raise ValueError("provide --g or --x")
    g = args.g if args.g is not None else model.coupling_from_x(args.x, args.u)
    params = ModelParams(delta=args.delta, stark=args.u, coupling=g)
    r = criticality.gap(params, tol=args.tol)
    failures = [] if r.converged else [{"kind": "ed-unconverged",
                                        "residual": r.residual}]
    columns = ["delta", "u", "g", "x", "gap", "converged", "residual", "k_used"]
    row = (args.delta, args.u, g, model.x_from_coupling(g, args.u), r.value,
           int(r.converged), r.residual, r.k_used)
    return RunResult("gap", _config_of(args), columns, [row], failures=failures)


def _cmd_gap_exponent(args) -> RunResult:
    fit = criticality.gap_exponent(args.u, x_min=args.x_min, x_max=args.x_max,
                                   n_points=args.points, tol=args.tol)
    curve = fit.curve
    rows = [(float(x), float(gap), int(bool(c)))
            for x, gap, c in zip(curve.x, curve.gaps, curve.converged)]
    failures = [{"kind": "ed-unconverged", "x": float(x)}
                for x, c in zip(curve.x, curve.converged) if not c]
    summary = {"slope": fit.slope, "intercept": fit.intercept,
               "exponent": fit.exponent, "r_squared": fit.r_squared,
               "x_min": fit.fit_window[0], "x_max": fit.fit_window[1],
               "n_used": fit.n_used, "n_excluded": fit.n_excluded}
    columns = ["x", "gap", "converged"]
    return RunResult("gap-exponent", _config_of(args), columns, rows,
                     summary=summary, failures=failures)


def _cmd_gap_vs_delta(args) -> RunResult:
    grid = np.linspace(args.delta_min, args.delta_max, args.steps)
    scan = criticality.gap_vs_delta(args.u, grid, detuning=args.detuning,
                                    tol=args.tol,
                                    fixed_truncation=args.fixed_truncation)
    rows = [(float(d), float((d - args.u) ** 2), float(g), int(bool(c)))
            for d, g, c in zip(scan.deltas, scan.gaps, scan.converged)]
    failures = [{"kind": "ed-unconverged", "delta": float(d)}
                for d, c in zip(scan.deltas, scan.converged) if not c]
    summary = {"coupling": scan.coupling, "method": scan.method}
    if scan.fit is not None:
        summary.update({"slope": scan.fit.slope, "intercept": scan.fit.intercept,
                        "r_squared": scan.fit.r_squared})
    columns = ["delta", "delta_minus_u_sq", "gap", "converged"]
    return RunResult("gap-vs-delta", _config_of(args), columns, rows,
                     summary=summary, failures=failures)


# -- parser -------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", default=None, help="output path (default stdout)")
    sub.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: TPSTARK_THREADS or 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tpstark", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("derived", help="derived constants at one point")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--g", type=float, required=True)
    _add_common(p)
    p.set_defaults(handler=_cmd_derived)

    p = subs.add_parser("spectrum", help="levels vs coupling, several methods")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--g", type=float, default=None, help="single coupling")
    p.add_argument("--g-min", type=float, default=0.05)
    p.add_argument("--g-max", type=float, default=0.45)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--levels", type=int, default=12)
    p.add_argument("--method", choices=("ed", "gfunction", "both"), default="both")
    p.add_argument("--sector", choices=("all",) + tuple(SECTOR_NAMES), default="all")
    p.add_argument("--tol", type=float, default=1e-10)
    _add_common(p)
    p.set_defaults(handler=_cmd_spectrum)

    p = subs.add_parser("gzeros", help="G-function zeros in an energy window")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--g", type=float, required=True)
    p.add_argument("--e-min", type=float, required=True)
    p.add_argument("--e-max", type=float, required=True)
    p.add_argument("--sector", choices=("all",) + tuple(SECTOR_NAMES), default="all")
    p.add_argument("--grid-density", type=int, default=2000)
    p.add_argument("--refine-tol", type=float, default=1e-10)
    p.add_argument("--series-tol", type=float, default=1e-14)
    p.add_argument("--n-max", type=int, default=5000)
    _add_common(p)
    p.set_defaults(handler=_cmd_gzeros)

    p = subs.add_parser("special-points",
                        help="couplings where a pole line carries an eigenvalue")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--pole-index", type=int, required=True)
    p.add_argument("--sector", choices=tuple(SECTOR_NAMES), default="even+")
    p.add_argument("--x-min", type=float, default=0.5)
    p.add_argument("--x-max", type=float, default=7.0)
    p.add_argument("--grid-points", type=int, default=600)
    p.add_argument("--n-max", type=int, default=300000)
    _add_common(p)
    p.set_defaults(handler=_cmd_special_points)

    p = subs.add_parser("collapse", help="collapse classification at (delta, U)")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--kappa-sq", type=float, default=0.0)
    _add_common(p)
    p.set_defaults(handler=_cmd_collapse)

    p = subs.add_parser("ladder", help="near-threshold bound-state ladder")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--count", type=int, default=6)
    p.add_argument("--fd", action="store_true", help="also solve FD levels")
    p.add_argument("--l-x", type=float, default=200.0)
    p.add_argument("--n-x", type=int, default=40001)
    p.add_argument("--auto-domain", action="store_true")
    p.add_argument("--no-check-grid", action="store_true")
    _add_common(p)
    p.set_defaults(handler=_cmd_ladder)

    p = subs.add_parser("gap", help="first excitation gap at one point")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--g", type=float, default=None)
    p.add_argument("--x", type=float, default=None,
                   help="alternative to --g: -log10(1 - g/g_c)")
    p.add_argument("--tol", type=float, default=1e-10)
    _add_common(p)
    p.set_defaults(handler=_cmd_gap)

    p = subs.add_parser("gap-exponent", help="fit z*nu_x along the coupling axis")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--x-min", type=float, default=1.5)
    p.add_argument("--x-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--tol", type=float, default=1e-10)
    _add_common(p)
    p.set_defaults(handler=_cmd_gap_exponent)

    p = subs.add_parser("gap-vs-delta", help="gap across delta = U near g_c")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--delta-min", type=float, required=True)
    p.add_argument("--delta-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=21)
    p.add_argument("--detuning", type=float, default=criticality.DEFAULT_DETUNING)
    p.add_argument("--fixed-truncation", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    _add_common(p)
    p.set_defaults(handler=_cmd_gap_vs_delta)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_threads(args)
        result = args.handler(args)
    except ValueError as exc:
        _emit_error("invalid-params", str(exc))
        return 2
    except RuntimeError as exc:
        _emit_error("unconverged", str(exc))
        return 3

    writer = _write_csv if args.format == "csv" else _write_json
    if args.out:
        with open(args.out, "w") as fh:
            writer(result, fh)
    else:
        writer(result, sys.stdout)
    for rec in result.failures:
        sys.stderr.write(json.dumps(rec, sort_keys=True) + "\n")
    return 3 if result.failures else 0


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
