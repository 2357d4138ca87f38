"""Command-line entry point: CSV grids and JSON reports for the heralded-state scheme."""

import argparse
import csv
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path

import numpy as np
from scipy import integrate

from . import entanglement, optimize
from .fock_oracle import compare_point
from .phase_space import NegativityConvergenceError, wigner_grid, wigner_negativity
from .scheme import SchemeParams, db_to_nepers, herald_probability, output_wavefunction
from .targets import TargetState, fidelity_cat_closed, fidelity_numeric, fidelity_scat_closed

EXIT_PRECONDITION = 3
EXIT_VERIFY = 4
THREADS_ENV = "HERALDED_THREADS"

# infidelity, probability error, distribution deficit
VERIFY_LIMITS = (1e-6, 1e-7, 1e-6)

DEFAULTS = {
    "phi": math.pi,
    "t": 1 / math.sqrt(2),
    "n": 0,
    "x_min": -8.0,
    "x_max": 8.0,
    "points": 801,
    "phi_steps": 20,
    "t_steps": 20,
    "tol": 1e-5,
    "resolution": 101,
    "bounds": "-5,5,-5,5",
    "grid_spec": "5x5x5",
    "n_max": 4,
}

COMMAND_DEFAULTS = {"fidelity": {"n": 1}}

_ANGLE = re.compile(r"^\s*([+-]?)((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+\.?\d*))?\s*$")


class PreconditionError(ValueError):
    pass


def parse_angle(text):
    """Radians, with pi literals: "pi", "0.5pi", "3pi/4", "pi/2"."""
    text = str(text)
    m = _ANGLE.match(text)
    if m:
        sign, num, den = m.groups()
        scale = float(num) if num else 1.0
        div = float(den) if den else 1.0
        return (-scale if sign == "-" else scale) * math.pi / div
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def _fmt(v):
    return f"{float(v):.17g}"


def _workers():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise PreconditionError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _parallel_map(func, items):
    """Order-preserving map, spread over worker processes when the thread count is above one."""
    items = list(items)
    workers = _workers()
    if workers == 1 or len(items) < 2:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * workers))))


@contextmanager
def _open_out(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            yield fh


def _dump_json(obj, fh):
    json.dump(obj, fh, sort_keys=True, indent=2, allow_nan=True)
    fh.write("\n")


def _sidecar(path, suffix):
    """psi.csv -> psi.json; a path without an extension just gains the suffix."""
    return Path(path).with_suffix(suffix) if path else None


def _write_rows(fh, header, rows):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else _fmt(v) for v in row])


def _squeezing(args):
    if args.r is not None and args.r_db is not None:
        raise PreconditionError("give either --r or --r-db, not both")
    if args.r_db is not None:
        return db_to_nepers(args.r_db)
    if args.r is None:
        raise PreconditionError("squeezing is required: --r (nepers) or --r-db (decibels)")
    return args.r


def _params(args):
    return SchemeParams(_squeezing(args), args.phi, args.t, args.n)


def _params_dict(p):
    return {"r": p.r, "phi": p.phi, "t": p.t, "n": p.n}


def cmd_wavefunction(args):
    if args.points < 2:
        raise PreconditionError("--points must be >= 2")
    if not args.x_max > args.x_min:
        raise PreconditionError("--x-max must exceed --x-min")
    p = _params(args)
    psi = output_wavefunction(p)
    x = np.linspace(args.x_min, args.x_max, args.points)
    values = psi(x)
    density = np.abs(values) ** 2
    with _open_out(args.out) as fh:
        _write_rows(fh, ["x", "re_psi", "im_psi", "abs2"], zip(x, values.real, values.imag, density))
    side = _sidecar(args.out, ".json")
    if side:
        report = {
            "params": _params_dict(p),
            "herald_probability": herald_probability(p),
            "normalization_residual": float(integrate.trapezoid(density, x)) - 1.0,
        }
        with open(side, "w", encoding="utf-8") as fh:
            _dump_json(report, fh)
    return 0


def _negativity_point(job):
    r, phi, t, n, tol = job
    try:
        return wigner_negativity(SchemeParams(r, phi, t, n), tol), None
    except (ValueError, NegativityConvergenceError) as exc:
        return math.nan, f"phi={_fmt(phi)} t={_fmt(t)}: {exc}"


def surface_axes(phi_steps, t_steps):
    """phi over (0, pi], t over the open interval (0, 1)."""
    return np.linspace(0, math.pi, phi_steps + 1)[1:], np.linspace(0, 1, t_steps + 2)[1:-1]


def cmd_negativity_surface(args):
    if args.phi_steps < 2 or args.t_steps < 2:
        raise PreconditionError("--phi-steps and --t-steps must be >= 2")
    if args.tol <= 0:
        raise PreconditionError("--tol must be positive")
    r = _squeezing(args)
    SchemeParams(r, 0.0, 0.0, args.n)
    phis, ts = surface_axes(args.phi_steps, args.t_steps)
    jobs = [(r, float(phi), float(t), args.n, args.tol) for phi in phis for t in ts]
    results = _parallel_map(_negativity_point, jobs)
    warnings = [w for _, w in results if w]
    with _open_out(args.out) as fh:
        _write_rows(fh, ["phi", "t", "negativity"], ((j[1], j[2], val) for j, (val, _) in zip(jobs, results)))
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    side = _sidecar(args.out, ".json")
    if side:
        with open(side, "w", encoding="utf-8") as fh:
            _dump_json({"r": r, "n": args.n, "tol": args.tol, "warnings": warnings}, fh)
    return 0


def cmd_entanglement(args):
    if args.resolution < 2:
        raise PreconditionError("--resolution must be >= 2")
    r = _squeezing(args)
    SchemeParams(r, 0.0, 0.0)
    phis = np.linspace(0, math.pi, args.resolution)
    ts = np.linspace(0, 1, args.resolution)
    degree = entanglement.degree_grid(r, phis, ts)
    rows = ((phi, t, degree[i, j], "1" if degree[i, j] > 1 else "0")
            for i, phi in enumerate(phis) for j, t in enumerate(ts))
    boundary = entanglement.separability_boundary(r, args.resolution)
    with _open_out(args.out) as fh:
        _write_rows(fh, ["phi", "t", "degree", "entangled"], rows)
        if args.out is None:
            fh.write("\n")
            _write_rows(fh, ["phi", "t_low", "t_high"], boundary)
    if args.out:
        with open(_sidecar(args.out, ".boundary.csv"), "w", newline="", encoding="utf-8") as fh:
            _write_rows(fh, ["phi", "t_low", "t_high"], boundary)
    return 0


def _parse_bounds(text):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise PreconditionError(f"--bounds must be four numbers x_min,x_max,p_min,p_max, got {text!r}") from None
    if len(vals) != 4:
        raise PreconditionError("--bounds needs exactly four numbers x_min,x_max,p_min,p_max")
    return tuple(vals)


def cmd_wigner(args):
    p = _params(args)
    grid = wigner_grid(p, _parse_bounds(args.bounds), args.resolution, args.resolution)
    with _open_out(args.out) as fh:
        grid.write_csv(fh)
    for w in grid.warnings:
        print(f"warning: {w}", file=sys.stderr)
    side = _sidecar(args.out, ".json")
    if side:
        with open(side, "w", encoding="utf-8") as fh:
            grid.write_header(fh)
    return 0


_TARGETS = {
    "cat": (TargetState.cat(2.0), fidelity_cat_closed, optimize.best_probability_cat, optimize.optimal_t_cat),
    "scat": (TargetState.squeezed_cat(0.5, 1.0), fidelity_scat_closed, optimize.best_probability_scat,
             optimize.optimal_t_scat),
}


def _fidelity_report(target, p):
    ts, closed, _, _ = _TARGETS[target]
    try:
        f_closed = closed(p.r, p.t, p.phi) if p.n == 1 else None
    except ValueError:
        f_closed = None
    return {
        "target": target,
        "F": fidelity_numeric(p, ts),
        "F_closed": f_closed,
        "P": herald_probability(p),
        "params": _params_dict(p),
    }


def cmd_fidelity(args):
    ts, _, best, optimal_t = _TARGETS[args.target]
    if not args.optimize:
        _dump_json(_fidelity_report(args.target, _params(args)), sys.stdout)
        return 0
    r_star, _ = best()
    p = SchemeParams(r_star, math.pi, optimal_t(r_star), 1)
    report = _fidelity_report(args.target, p)
    found = optimize.maximize(
        "fidelity_" + args.target, {"r": r_star}, {"t": (0.05, 0.999), "phi": (0.1, math.pi)}
    )
    report["maximizer"] = {"params": found.params, "F": found.value, "evaluations": found.evaluations}
    _dump_json(report, sys.stdout)
    return 0


def _parse_grid_spec(text):
    parts = text.lower().split("x")
    try:
        dims = [int(v) for v in parts]
    except ValueError:
        dims = []
    if len(dims) != 3 or min(dims) < 1:
        raise PreconditionError(f"--grid-spec must look like 5x5x5 (r x phi x t), got {text!r}")
    return dims


def verify_grid(nr, nphi, nt):
    """r over [0.3, 1.2], phi over (0, pi], t over (0, 1)."""
    rs = np.linspace(0.3, 1.2, nr)
    phis, ts = surface_axes(nphi, nt)
    return [(float(r), float(phi), float(t)) for r in rs for phi in phis for t in ts]


def _verify_point(job):
    r, phi, t, n_max, cutoff = job
    return compare_point(r, phi, t, n_max, cutoff)


def cmd_verify(args):
    nr, nphi, nt = _parse_grid_spec(args.grid_spec)
    if args.cutoff is not None and args.cutoff < 2:
        raise PreconditionError("--cutoff must be >= 2")
    jobs = [(r, phi, t, args.n_max, args.cutoff) for r, phi, t in verify_grid(nr, nphi, nt)]
    records = [c for batch in _parallel_map(_verify_point, jobs) for c in batch]
    f_lim, p_lim, d_lim = VERIFY_LIMITS
    breaches = [
        {"r": c.r, "phi": c.phi, "t": c.t, "n": c.n, "cutoff": c.cutoff, "infidelity": c.infidelity,
         "probability_error": c.probability_error, "distribution_deficit": c.distribution_deficit}
        for c in records
        if c.infidelity > f_lim or abs(c.probability_error) > p_lim or abs(c.distribution_deficit) > d_lim
    ]
    report = {
        "points": len(jobs),
        "comparisons": len(records),
        "limits": {"infidelity": f_lim, "probability_error": p_lim, "distribution_deficit": d_lim},
        "worst": {
            "infidelity": max(c.infidelity for c in records),
            "probability_error": max(abs(c.probability_error) for c in records),
            "distribution_deficit": max(abs(c.distribution_deficit) for c in records),
        },
        "breaches": breaches,
        "passed": not breaches,
    }
    with _open_out(args.out) as fh:
        _dump_json(report, fh)
    return 0 if not breaches else EXIT_VERIFY


def _add_scheme_flags(sub, with_n=True):
    sub.add_argument("--r", type=float, help="squeezing in nepers")
    sub.add_argument("--r-db", type=float, help="squeezing in decibels")
    sub.add_argument("--phi", type=parse_angle, help="relative phase in radians; pi literals allowed")
    sub.add_argument("--t", type=float, help="beam-splitter amplitude transmission")
    if with_n:
        sub.add_argument("--n", type=int, help="detected photon number")


def build_parser():
    parser = argparse.ArgumentParser(prog="heralded", description=__doc__)
    parser.add_argument("--config", type=Path, help="JSON file whose keys mirror the long flags")
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("wavefunction", help="sample the heralded wavefunction")
    _add_scheme_flags(sub)
    sub.add_argument("--x-min", type=float)
    sub.add_argument("--x-max", type=float)
    sub.add_argument("--points", type=int)
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_wavefunction)

    sub = subs.add_parser("negativity-surface", help="Wigner negativity over (phi, t)")
    sub.add_argument("--r", type=float)
    sub.add_argument("--r-db", type=float)
    sub.add_argument("--n", type=int)
    sub.add_argument("--phi-steps", type=int)
    sub.add_argument("--t-steps", type=int)
    sub.add_argument("--tol", type=float)
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_negativity_surface)

    sub = subs.add_parser("entanglement", help="entanglement degree grid and separability boundary")
    sub.add_argument("--r", type=float)
    sub.add_argument("--r-db", type=float)
    sub.add_argument("--resolution", type=int)
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_entanglement)

    sub = subs.add_parser("wigner", help="Wigner function on a rectangular grid")
    _add_scheme_flags(sub)
    sub.add_argument("--bounds", help="x_min,x_max,p_min,p_max")
    sub.add_argument("--resolution", type=int)
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_wigner)

    sub = subs.add_parser("fidelity", help="fidelity and probability against a cat target")
    sub.add_argument("--target", choices=sorted(_TARGETS), required=True)
    _add_scheme_flags(sub)
    sub.add_argument("--optimize", action="store_true", help="report the optimum instead of given params")
    sub.set_defaults(func=cmd_fidelity)

    sub = subs.add_parser("verify", help="closed forms against the truncated Fock simulation")
    sub.add_argument("--grid-spec", help="r x phi x t point counts, e.g. 5x5x5")
    sub.add_argument("--cutoff", type=int, help="Fock cutoff per mode (default grows with r)")
    sub.add_argument("--n-max", type=int)
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_verify)
    return parser


def _apply_config(args, parser):
    """Fill flags left unset on the command line from --config, then from DEFAULTS."""
    config = {}
    if args.config is not None:
        try:
            config = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read config {args.config}: {exc}")
        if not isinstance(config, dict):
            parser.error("config must be a JSON object")
    for key, value in config.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            parser.error(f"unknown config key {key!r} for {args.command}")
        if getattr(args, attr) is None:
            setattr(args, attr, parse_angle(value) if attr == "phi" else value)
    for attr, value in {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}.items():
        if hasattr(args, attr) and getattr(args, attr) is None:
            setattr(args, attr, value)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, parser)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
