"""Command line entry point: ``occupancy <command> ...``.

Exit codes: 0 success, 2 domain error (bad parameters, sigma = 0, dimension
cap), 3 resource or tolerance error.
"""
from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .bartlett import QuadratureSpec, verify
from .errors import DomainError, OccupancyError, ParameterDomainError, ResourceError
from .exact import exact_pmf, pmf_moments
from .moments import edgeworth_coeffs, g_moments, xi_moments
from .precision import set_precision
from .scheme import SchemeParams, derive, diagnostics
from .simulate import SimConfig, empirical_pmf, mc_mean_ci

SCHEMA = 1
EXIT_DOMAIN = 2
EXIT_RESOURCE = 3


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _fractions(text: str) -> tuple:
    try:
        return tuple(Fraction(x.strip()) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _methods(text: str) -> tuple:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _q(x: Fraction) -> str:
    return str(x)


def _num(x, digits: int):
    if x is None:
        return None
    return float(f"{float(x):.{digits}g}")


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        when = _dt.datetime.fromtimestamp(int(epoch), tz=_dt.timezone.utc)
    else:
        when = _dt.datetime.now(tz=_dt.timezone.utc).replace(microsecond=0)
    return when.isoformat()


def manifest(command: str, params: dict, options: dict) -> dict:
    canonical = json.dumps({"command": command, "params": params, "options": options}, sort_keys=True)
    return {
        "command": command,
        "params": params,
        "options": options,
        "version": __version__,
        "timestamp": _timestamp(),
        "input_hash": hashlib.sha256(canonical.encode()).hexdigest(),
    }


def _emit(args, payload: dict, csv_text: str = None):
    if args.format == "csv" and csv_text is not None:
        text = "".join(f"# {k}: {json.dumps(v, sort_keys=True)}\n" for k, v in payload["manifest"].items())
        text += csv_text
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads(args) -> int:
    if args.threads:
        return args.threads
    return int(os.environ.get("OCCUPANCY_THREADS", "1"))


# -- commands ------------------------------------------------------------------

def cmd_exact(args) -> int:
    params = SchemeParams(args.cells, args.sets)
    pmf = exact_pmf(params)
    derived = derive(params)
    mean, var, c3, c4 = pmf_moments(pmf)
    d = args.digits
    scalars = {
        "Q_s": _q(derived.Q_s),
        "mean": _q(mean),
        "variance": _q(var),
        "sigma2": _q(derived.sigma2),
        "alpha": _q(derived.alpha),
        "b_N": None if derived.degenerate else _q(derived.b_N),
        "var_formula": _q(derived.var_mu0),
        "third_central": _q(c3),
        "fourth_central": _q(c4),
    }
    payload = {
        "schema": SCHEMA,
        "manifest": manifest("exact", {"N": params.N, "n": list(params.n)}, {"digits": d}),
        "pmf": {str(k): _q(p) for k, p in pmf.items()},
        "pmf_rows": pmf.to_json(),
        "derived": scalars,
    }
    if not derived.degenerate:
        gm = g_moments(derived)
        xim = xi_moments(derived)
        coeffs = edgeworth_coeffs(gm, xim)
        diag = diagnostics(derived, gm)
        payload["moments"] = {
            "exact_raw": {f"Eg^{j}": _q(v) for j, v in enumerate(gm.raw.g)},
            "Eg~3": _num(gm.g3, d),
            "Eg~4": _q(gm.g4),
            "Eg~2xi~": [_num(x, d) for x in gm.g2xi],
            "Eg~2xi~2": [_q(x) for x in gm.g2xi2],
            "E|g~|": _num(gm.abs_g1, d),
            "E|g~|^3": _num(gm.abs_g3, d),
            "E|g~|^5": _num(gm.abs_g5, d),
            "M2": _num(coeffs.M2, d),
            "M3": _num(coeffs.M3, d),
            "M4": _num(coeffs.M4, d),
        }
        payload["diagnostics"] = {
            "T_N": _num(diag.T_N, d),
            "L_N": _num(diag.L_N, d),
            "ratio_325": _num(diag.ratio_325, d),
            "sigma_Eg3": _num(diag.sigma_Eg3, d),
        }
    _emit(args, payload, pmf.to_csv(d))
    return 0


def cmd_compare(args) -> int:
    from .edgeworth import METHODS, approximate

    params = SchemeParams(args.cells, args.sets)
    for m in args.methods:
        if m not in METHODS:
            raise ParameterDomainError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    derived = derive(params)
    if derived.degenerate and any(m != "thm3" for m in args.methods):
        raise DomainError("sigma^2 = 0: the expansions are undefined")
    pmf = exact_pmf(params)
    d = args.digits
    results = []
    for m in args.methods:
        try:
            report = approximate(m, params, pmf, variant=args.variant)
        except OccupancyError as exc:
            results.append({"method": m, "status": f"error: {exc}", "sup_error": None})
            continue
        entry = report.to_json(d)
        entry["status"] = "ok"
        entry["sup_error"] = _num(report.sup_error, d)
        results.append(entry)
    payload = {
        "schema": SCHEMA,
        "manifest": manifest("compare", {"N": params.N, "n": list(params.n)},
                             {"methods": list(args.methods), "variant": args.variant, "digits": d}),
        "results": results,
    }
    lines = ["method,normalization,sup_error,status"]
    for r in results:
        sup = "" if r["sup_error"] is None else repr(r["sup_error"])
        lines.append(f"{r['method']},{r.get('normalization', '')},{sup},{json.dumps(r['status'])}")
    _emit(args, payload, "\n".join(lines) + "\n")
    return 0


def cmd_convergence(args) -> int:
    from .edgeworth import METHODS, approximate, sup_error_slope

    if args.method not in METHODS:
        raise ParameterDomainError(f"unknown method {args.method!r}")
    if len(args.N) < 3:
        raise ParameterDomainError("need at least 3 values of N")
    cases = [SchemeParams.from_proportions(N, args.p) for N in args.N]
    for params in cases:
        if derive(params).degenerate:
            raise DomainError("sigma^2 = 0 (a single set is deterministic)")
    d = args.digits
    sweep, rows = [], []
    for params in cases:
        report = approximate(args.method, params, variant=args.variant)
        sweep.append((params.N, report.sup_error))
        slope = sup_error_slope(sweep) if len(sweep) >= 3 else None
        rows.append({"N": params.N, "n": list(params.n), "sup_error": _num(report.sup_error, d),
                     "slope_so_far": _num(slope, d)})
    slope = sup_error_slope(sweep)
    lo, hi = args.window
    decreasing = all(b[1] < a[1] for a, b in zip(sweep, sweep[1:]))
    payload = {
        "schema": SCHEMA,
        "manifest": manifest("convergence", {"p": [_q(x) for x in args.p], "N": list(args.N)},
                             {"method": args.method, "variant": args.variant,
                              "window": list(args.window), "digits": d}),
        "rows": rows,
        "slope": _num(slope, d),
        "strictly_decreasing": decreasing,
        "pass": bool(lo <= slope <= hi and decreasing),
    }
    csv_lines = ["N,sup_error,slope_so_far"]
    csv_lines += [f"{r['N']},{r['sup_error']!r},{'' if r['slope_so_far'] is None else repr(r['slope_so_far'])}"
                  for r in rows]
    _emit(args, payload, "\n".join(csv_lines) + "\n")
    return 0


def cmd_bartlett(args) -> int:
    params = SchemeParams(args.cells, args.sets)
    quad = QuadratureSpec(panels=args.panels, nodes=args.nodes, tol=min(1e-10, args.tol * 1e-3))
    rows = verify(params, args.t, quad)
    ok = all(r["abs_diff"] <= args.tol for r in rows)
    payload = {
        "schema": SCHEMA,
        "manifest": manifest("bartlett", {"N": params.N, "n": list(params.n)},
                             {"t": list(args.t), "tol": args.tol, "panels": args.panels, "nodes": args.nodes}),
        "rows": rows,
        "pass": ok,
    }
    lines = ["t,bartlett_re,bartlett_im,exact_re,exact_im,abs_diff"]
    lines += [",".join(repr(r[k]) for k in ("t", "bartlett_re", "bartlett_im", "exact_re", "exact_im", "abs_diff"))
              for r in rows]
    _emit(args, payload, "\n".join(lines) + "\n")
    return 0 if ok else EXIT_RESOURCE


def cmd_simulate(args) -> int:
    params = SchemeParams(args.cells, args.sets)
    config = SimConfig(params, args.trials, args.seed)
    emp = empirical_pmf(config, threads=_threads(args))
    payload = {
        "schema": SCHEMA,
        "manifest": manifest("simulate", {"N": params.N, "n": list(params.n)},
                             {"trials": args.trials, "seed": args.seed}),
        **emp.to_json(),
    }
    if args.trials >= 2:
        mean, half = mc_mean_ci(emp)
        payload["mean"] = mean
        payload["mean_half_width_4se"] = half
    _emit(args, payload, emp.to_csv())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="occupancy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scheme=True):
        if scheme:
            p.add_argument("--cells", type=int, required=True, help="number of cells N")
            p.add_argument("--sets", type=_ints, required=True, help="set sizes, e.g. 12,20")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="write to this file instead of stdout")
        p.add_argument("--digits", type=int, default=15, help="significant digits for decimals")
        p.add_argument("--prec", type=int, default=128, help="working precision in bits (>= 128)")
        p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("exact", help="exact PMF and derived scalars")
    common(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("compare", help="approximation errors against the exact PMF")
    common(p)
    p.add_argument("--methods", type=_methods, default=("thm2", "thm3", "thm4", "gaussian"))
    p.add_argument("--variant", choices=("fourier", "printed"), default="fourier")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("convergence", help="sup-error sweep over N with fixed proportions")
    common(p, scheme=False)
    p.add_argument("--p", type=_fractions, required=True, help="set proportions, e.g. 0.3,0.5")
    p.add_argument("--N", type=_ints, required=True, help="cell counts, e.g. 20,40,80")
    p.add_argument("--method", default="thm2")
    p.add_argument("--variant", choices=("fourier", "printed"), default="fourier")
    p.add_argument("--window", type=_floats, default=(-2.0, -1.0), help="accepted slope range lo,hi")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("bartlett", help="characteristic function by quadrature vs exact")
    common(p)
    p.add_argument("--t", type=_floats, default=(0.5, 1.0, 2.0))
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--panels", type=int, default=4)
    p.add_argument("--nodes", type=int, default=16)
    p.set_defaults(func=cmd_bartlett)

    p = sub.add_parser("simulate", help="Monte Carlo empirical PMF")
    common(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        set_precision(args.prec)
        return args.func(args)
    except (DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
