"""Command-line runner for evaluations, scans and verifications.

Every command writes one artifact (JSON by default, CSV where tabular) to
stdout or ``--output``.  Exit status: 0 success or pass, 1 verification
failure, 2 usage error, 3 numerical non-convergence.

CSV layouts:
    scan-decay    p,rho,phi,value,representation,error_estimate
    error-sweep   r,R_p,main_term,P_p

Example:
    lame-bessel eval --p 2 --eta 5,0 --rep direct
    lame-bessel prop25 --p 2/5 --n 3 --delta-min 1e-4 --delta-max 1e-2
    lame-bessel identity-verify --p 2 --beta 1 --s 1.5 --x 0,0 --cutoff 24
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from importlib import metadata

import numpy as np

from . import asymptotics, gbessel, lattice, phase
from .errors import ConsistencyError, ConvergenceError, DomainError, LameBesselError, ResourceError
from .pnorm import PExponent, parse_p
from .quadrature import QuadratureSpec

SCHEMA = "lame-bessel/1"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3


def version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        from . import __version__
        return __version__


# ---------------------------------------------------------------------------
# deterministic output


def _fmt(x) -> str:
    if isinstance(x, bool) or x is None:
        return json.dumps(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return "null" if not math.isfinite(x) else format(x, ".17g")
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    if isinstance(x, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(v)}" for k, v in x.items()) + "}"
    if isinstance(x, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(v) for v in x) + "]"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(obj) -> str:
    """JSON with every float printed at 17 significant digits."""
    return _fmt(obj) + "\n"


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format(float(v), ".17g") if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# argument types


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated numbers, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _p_arg(text: str):
    try:
        value = parse_p(text)
        PExponent.of(value)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _quad(args) -> QuadratureSpec:
    return QuadratureSpec(abs_tol=args.tol, rel_tol=args.tol)


# ---------------------------------------------------------------------------
# commands; each returns (payload, exit status, csv or None)


def cmd_eval(args):
    spec = _quad(args)
    rep = args.rep
    if args.omega == 0 and rep in gbessel.REPRESENTATIONS:
        res = gbessel.j0(args.p, args.eta, rep, spec, full_output=True)
        return {"value": res.value, "error_estimate": res.error_estimate, "representation": rep}, EXIT_OK, None
    if rep == "series":
        value = gbessel.j_omega_series(args.p, args.omega, args.eta)
        return {"value": value, "error_estimate": None, "representation": rep}, EXIT_OK, None
    if args.omega <= 0:
        raise DomainError(f"representation {rep!r} needs --omega > 0")
    fn = {"nested": gbessel.j_omega, "kernel": gbessel.j_omega_kernel}.get(rep)
    if fn is None:
        raise DomainError(f"representation {rep!r} is not available for omega > 0")
    res = fn(args.p, args.omega, args.eta, spec, full_output=True)
    return {"value": res.value, "error_estimate": res.error_estimate, "representation": rep}, EXIT_OK, None


def _grid_rhos(args):
    return asymptotics.rho_grid(args.rho_min, args.rho_max, args.n_rho)


def cmd_scan_decay(args):
    spec = _quad(args)
    if args.mode == "hankel":
        rep = asymptotics.hankel_envelope_check(_grid_rhos(args), spec=spec)
        ok = rep.max_scaled_deviation < 1.0 and rep.trend_slope <= 0.1
        payload = {**rep.as_dict(), "pass": ok}
        rows = [["2", r, 0.0, d, "hankel-remainder", 0.0] for r, d in zip(rep.rho_values, rep.scaled_deviation)]
        return payload, EXIT_OK if ok else EXIT_FAIL, (asymptotics.CSV_COLUMNS, rows)
    grid = asymptotics.ScanGrid(_grid_rhos(args), (0.0,))
    if args.mode == "compact":
        phis = args.phi or [math.pi / 4]
        scan = asymptotics.decay_scan_compact(args.p, phis, grid, margin=args.margin, spec=spec)
        ok = abs(scan.fit.slope + 0.5) <= args.slope_tol
    else:
        pe = PExponent.of(args.p)
        phis = asymptotics.uniform_phi_grid(pe, args.per_quadrant)
        grid = asymptotics.ScanGrid(grid.rho_values, phis)
        scan = asymptotics.decay_scan_uniform(pe, grid, spec=spec)
        ok = scan.fit.slope <= scan.expected_slope + args.slope_tol and scan.ratio_trend <= args.slope_tol
    payload = {**scan.as_dict(), "pass": bool(ok)}
    rows = [pt.csv_row() for pt in scan.points]
    return payload, EXIT_OK if ok else EXIT_FAIL, (asymptotics.CSV_COLUMNS, rows)


def cmd_phase_stationary(args):
    fam = phase.PhaseFamily(args.kind, args.p, args.param)
    pts = phase.stationary_points(fam)
    payload = {
        "points": pts.points,
        "endpoint_flags": pts.endpoint_flags,
        "delta_dependent": pts.delta_dependent,
        "first_derivative": [phase.phase_derivative(fam, t, 1) for t in pts.points],
    }
    return payload, EXIT_OK, None


def cmd_prop25(args):
    grid = np.geomspace(args.delta_min, args.delta_max, args.n_delta)
    rep = phase.verify_prop25(args.p, args.n, grid, slope_tol=args.slope_tol)
    return rep.as_dict(), EXIT_OK if rep.passed else EXIT_FAIL, None


def cmd_lattice_count(args):
    c = lattice.count_lattice(args.p, args.s, strict=not args.closed)
    return {"count": c.count, "s": c.s, "strict": c.strict}, EXIT_OK, None


def cmd_error_sweep(args):
    pe = PExponent.of(args.p)
    rows = []
    for r in np.linspace(args.r_min, args.r_max, args.n_r):
        r = float(r)
        count = lattice.count_lattice(pe, r**pe.p, strict=not args.closed).count
        main = lattice.area_main_term(pe, r)
        rows.append([r, count, main, count - main])
    payload = {"rows": rows}
    return payload, EXIT_OK, (("r", "R_p", "main_term", "P_p"), rows)


def cmd_identity_verify(args):
    rep = lattice.verify_identity(args.p, args.beta, args.s, args.x, args.cutoff, _quad(args))
    return rep.as_dict(), EXIT_OK if rep.passed else EXIT_FAIL, None


COMMANDS = {
    "eval": cmd_eval,
    "scan-decay": cmd_scan_decay,
    "phase-stationary": cmd_phase_stationary,
    "prop25": cmd_prop25,
    "lattice-count": cmd_lattice_count,
    "error-sweep": cmd_error_sweep,
    "identity-verify": cmd_identity_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lame-bessel", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--output", default=None, help="write the artifact here instead of stdout")
    common.add_argument("--seed", type=int, default=None, help="recorded in the artifact")
    common.add_argument("--tol", type=float, default=1e-10, help="quadrature abs/rel tolerance")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate J_omega^[p] at one point")
    p.add_argument("--p", type=_p_arg, required=True)
    p.add_argument("--eta", type=_pair, required=True)
    p.add_argument("--omega", type=float, default=0.0)
    p.add_argument("--rep", default="direct",
                   choices=("direct", "oscillatory", "odd", "nested", "kernel", "series"))

    p = sub.add_parser("scan-decay", parents=[common],
                       help="decay scan; CSV columns p,rho,phi,value,representation,error_estimate")
    p.add_argument("--p", type=_p_arg, default="2")
    p.add_argument("--mode", choices=("compact", "uniform", "hankel"), default="compact")
    p.add_argument("--phi", type=_floats, default=None, help="comma-separated angles (compact mode)")
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--rho-min", type=float, default=20.0)
    p.add_argument("--rho-max", type=float, default=2000.0)
    p.add_argument("--n-rho", type=int, default=16)
    p.add_argument("--per-quadrant", type=int, default=64)
    p.add_argument("--slope-tol", type=float, default=0.05)

    p = sub.add_parser("phase-stationary", parents=[common], help="stationary points of a phase")
    p.add_argument("--p", type=_p_arg, required=True)
    p.add_argument("--kind", choices=[k.value for k in phase.PhaseKind], required=True)
    p.add_argument("--param", type=float, required=True, help="phi (compact kinds) or delta (axis kinds)")

    p = sub.add_parser("prop25", parents=[common], help="derivative scaling at the moving stationary point")
    p.add_argument("--p", type=_p_arg, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta-min", type=float, default=1e-4)
    p.add_argument("--delta-max", type=float, default=1e-2)
    p.add_argument("--n-delta", type=int, default=16)
    p.add_argument("--slope-tol", type=float, default=0.05)

    p = sub.add_parser("lattice-count", parents=[common], help="count m with |m|_p^p < s")
    p.add_argument("--p", type=_p_arg, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--closed", action="store_true", help="count |m|_p^p <= s instead")

    p = sub.add_parser("error-sweep", parents=[common], help="CSV columns r,R_p,main_term,P_p")
    p.add_argument("--p", type=_p_arg, required=True)
    p.add_argument("--r-min", type=float, required=True)
    p.add_argument("--r-max", type=float, required=True)
    p.add_argument("--n-r", type=int, default=50)
    p.add_argument("--closed", action="store_true")

    p = sub.add_parser("identity-verify", parents=[common], help="check the lattice series identity")
    p.add_argument("--p", type=_p_arg, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--x", type=_pair, default=(0.0, 0.0))
    p.add_argument("--cutoff", type=int, default=12)
    return ap


def _config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("output",)}
    return {k: list(v) if isinstance(v, tuple) else v for k, v in cfg.items()}


def run(args) -> int:
    cfg = _config(args)
    head = {"schema": SCHEMA, "version": version(), "command": args.command, "config": cfg}
    try:
        payload, status, table = COMMANDS[args.command](args)
    except (DomainError, ResourceError) as exc:
        status, payload, table = EXIT_USAGE, {"status": "error", "reason": type(exc).__name__, "message": str(exc)}, None
    except ConvergenceError as exc:
        status, payload, table = EXIT_NONCONV, {"status": "error", "reason": type(exc).__name__, "message": str(exc)}, None
    except (ConsistencyError, LameBesselError) as exc:
        status, payload, table = EXIT_FAIL, {"status": "error", "reason": type(exc).__name__, "message": str(exc)}, None
    else:
        payload = {"status": "ok" if status == EXIT_OK else "fail", **payload}
    if args.format == "csv" and table is not None:
        _emit(_csv_text(*table), args.output)
    else:
        _emit(dumps({**head, **payload}), args.output)
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.p = str(args.p)
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
