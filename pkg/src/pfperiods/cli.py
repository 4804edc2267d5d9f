"""Command-line entry point.

    pfperiods <command> [--input PATH|-|JSON] [--tol T] [--seed S] [--output json|csv]

Exit codes: 0 ok, 2 malformed input, 3 degenerate or singular configuration,
4 convergence failure, 5 violated internal invariant.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import io
from .curve import BranchSet, CurveSpec
from .errors import (ConvergenceError, DegenerateCurveError, InputError, InvariantError,
                     SingularityError)
from .gauss_manin import gm_fd_residual
from .legendre import (Ebar_complete, K_complete, hyper_residual, legendre_system_residual,
                       scaled_step)
from .neumann import action_integrals
from .oracle import period_vector
from .picard_fuchs import (curvature_residual, pf_fd_residuals, route_equivalence,
                           verify_root_identities)
from .transport import monodromy, oracle_endpoint, path_safety, propagate
from .verify import curve_checks, run_all, sorted_pair_cycles

log = logging.getLogger("pfperiods")

COMMANDS = ("periods", "gm-check", "pf-check", "pf-transport", "monodromy", "actions",
            "legendre", "verify")
TOL_RANGE = (1e-14, 1e-2)

EXIT_OK, EXIT_INPUT, EXIT_DEGENERATE, EXIT_CONVERGENCE, EXIT_INTERNAL = 0, 2, 3, 4, 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--input", help="JSON file, '-' for stdin, or an inline JSON document")
    common.add_argument("--tol", type=float, default=1e-10,
                        help="quadrature / ODE tolerance, in [1e-14, 1e-2] (default 1e-10)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    common.add_argument("--output", choices=("json", "csv"), default=None,
                        help="output format (default: json; csv for gm-check)")
    common.add_argument("-v", "--verbose", action="store_true", help="diagnostics to stderr")
    p = _Parser(prog="pfperiods", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("periods", parents=[common], help="period vector J1..J5 of a cycle")
    sub.add_parser("gm-check", parents=[common], help="Gauss-Manin matrices vs FD (CSV)")
    sub.add_parser("pf-check", parents=[common], help="Picard-Fuchs matrices: FD, routes, curvature")
    sub.add_parser("pf-transport", parents=[common], help="transport periods along a path")
    sub.add_parser("monodromy", parents=[common], help="monodromy matrix of a closed path")
    sub.add_parser("actions", parents=[common], help="Neumann action variables")
    lg = sub.add_parser("legendre", parents=[common], help="elliptic baseline K, Ebar")
    lg.add_argument("--k", required=True, help="modulus as 're,im' or 're'")
    sub.add_parser("verify", parents=[common], help="run the verification suite")
    return p


# ----------------------------------------------------------------- helpers

def _curve(doc) -> CurveSpec:
    if not isinstance(doc, dict):
        raise InputError("input must be a JSON object")
    return io.parse_curve(doc.get("curve", doc))


def _cycles(doc, points, default_count=1):
    """Cycles from the input, else branch pairs of the sorted ``points``."""
    if "cycle" in doc:
        return [io.parse_cycle(doc["cycle"])]
    if "cycles" in doc:
        if not isinstance(doc["cycles"], list) or not doc["cycles"]:
            raise InputError("cycles must be a non-empty list")
        return [io.parse_cycle(c) for c in doc["cycles"]]
    return sorted_pair_cycles(points, default_count)


def _require_doc(args):
    doc = io.load_document(args.input)
    if doc is None:
        raise InputError(f"{args.command} needs --input")
    if not isinstance(doc, dict):
        raise InputError("input must be a JSON object")
    return doc


def _parse_k(text) -> complex:
    try:
        parts = [float(x) for x in text.split(",")]
    except ValueError as exc:
        raise InputError(f"--k: cannot parse {text!r}") from exc
    if len(parts) == 1:
        parts.append(0.0)
    if len(parts) != 2 or not all(np.isfinite(parts)):
        raise InputError("--k expects 're,im'")
    return complex(*parts)


def _sample_rows(samples, label=None):
    rows = []
    for t, y in samples:
        y = np.asarray(y)
        cols = y.T if y.ndim == 2 else [y]
        for c, J in enumerate(cols):
            row = [t] if label is None and y.ndim == 1 else [c + 1 if label is None else label, t]
            for z in J:
                row += [float(z.real), float(z.imag)]
            rows.append(row)
    return rows


def _sample_header(with_cycle):
    head = (["cycle"] if with_cycle else []) + ["t"]
    for i in range(1, 6):
        head += [f"J{i}_re", f"J{i}_im"]
    return head


# ----------------------------------------------------------------- commands

def cmd_periods(args):
    doc = _require_doc(args)
    curve = _curve(doc)
    e = curve.branch_set().points
    cycles = _cycles(doc, e)
    pvs = [period_vector(e, c, args.tol) for c in cycles]
    if "cycles" not in doc:
        return {"J": pvs[0].J, "err": pvs[0].err}
    return {"periods": [{"cycle": c, "J": p.J, "err": p.err} for c, p in zip(cycles, pvs)]}


def cmd_gm_check(args):
    doc = _require_doc(args)
    curve = _curve(doc)
    e = curve.branch_set().points
    cycle = _cycles(doc, e)[0]
    delta = _float(doc, "delta", 1e-5)
    rows = [[k, gm_fd_residual(e, k, cycle, delta, args.tol), delta] for k in range(1, 7)]
    if (args.output or "csv") == "csv":
        return io.csv_rows(["k", "residual", "delta"], rows)
    return {"cycle": cycle, "rows": [{"k": k, "residual": r, "delta": d} for k, r, d in rows]}


def cmd_pf_check(args):
    doc = _require_doc(args)
    curve = _curve(doc)
    cycle = _cycles(doc, curve.branch_set().points)[0]
    delta = _float(doc, "delta", 1e-5)
    r1, r2 = pf_fd_residuals(curve, cycle, delta, args.tol)
    return {
        "route_equivalence_residual": route_equivalence(curve),
        "fd_residuals": {"h1": r1, "h2": r2},
        "curvature_residual": curvature_residual(curve),
        "identity_residuals": verify_root_identities(curve.roots().array),
        "cycle": cycle,
    }


def _path_family(doc, curve):
    """(path, family, e0): ``family`` is what the transport routines expect.

    h-space: the curve with its moduli moved to the path start.  e-space: the
    curve's branch set with e_index moved to the path start.
    """
    path = io.parse_path(io._require(doc, "path", "input"))
    if path.space == "h":
        family = curve.with_moduli(*path.start)
        return path, family, family.branch_set().points
    e0 = curve.branch_set().points.copy()
    e0[path.index - 1] = path.start[0]
    return path, BranchSet(e0), BranchSet(e0).points


def _float(doc, key, default):
    v = doc.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
        raise InputError(f"{key} must be a positive number")
    return float(v)


def cmd_pf_transport(args):
    doc = _require_doc(args)
    curve = _curve(doc)
    path, family, e0 = _path_family(doc, curve)
    safety = path_safety(path, family)
    cycles = _cycles(doc, e0, 3)
    results, csv, res = [], [], None
    for n, cyc in enumerate(cycles, start=1):
        J0 = period_vector(e0, cyc, args.tol).J
        res = propagate(family, path, J0, args.tol, check=False, record=True)
        item = {"cycle": cyc, "J_start": J0, "J_end": res.J_end, "steps": res.steps,
                "max_local_error": res.max_local_error}
        if doc.get("oracle", True):
            Jo = oracle_endpoint(family, path, cyc, args.tol).J
            item["J_oracle_end"] = Jo
            item["relative_error"] = np.abs(res.J_end - Jo) / np.abs(Jo)
        results.append(item)
        csv += _sample_rows(res.samples, label=n)
    if args.output == "csv":
        return io.csv_rows(_sample_header(True), csv)
    return {"space": path.space, "start": path.start, "end": path.end,
            "path_safety": {"min_relative_gap": safety.min_separation,
                            "min_abs_discriminant": safety.min_discriminant,
                            "t_at_min": safety.t_min},
            "branch_points_end": res.branch_end, "transports": results}


def cmd_monodromy(args):
    doc = _require_doc(args)
    curve = _curve(doc)
    path, family, _ = _path_family(doc, curve)
    if not path.closed:
        raise InputError("monodromy needs a closed path (\"closed\": true)")
    tol = min(args.tol, 1e-10)
    m = monodromy(family, path, tol, oracle=bool(doc.get("oracle", True)))
    if args.output == "csv":
        res = propagate(family, path, m.B0, tol, check=False, record=True)
        return io.csv_rows(_sample_header(True), _sample_rows(res.samples))
    return {"M": m.M, "det": m.det, "norm_M_minus_I": float(np.linalg.norm(m.M - np.eye(5))),
            "basis": m.basis, "basis_periods": m.B0.T, "cycle_matrix": m.cycle_matrix.real,
            "residual_vs_oracle": m.residual_vs_oracle,
            "liouville_residual": m.liouville_residual,
            "convention": "J_after = M J_before; loop A then B has M_B M_A"}


def cmd_actions(args):
    doc = _require_doc(args)
    curve = _curve(doc)
    cycles = _cycles(doc, curve.branch_set().points, 5)
    r = action_integrals(curve, cycles, args.tol)
    return {"actions": r.actions, "direct": r.direct, "cycles": cycles, "h": r.h,
            "residuals": {"route_agreement": r.route_agreement, "imag": r.imag}}


def cmd_legendre(args):
    k = _parse_k(args.k)
    rK, rE = legendre_system_residual(k, scaled_step(k, 1e-5))
    return {"k": k, "K": K_complete(k), "Ebar": Ebar_complete(k),
            "residuals": {"eq1_K": rK, "eq1_Ebar": rE,
                          "hyper": hyper_residual(k, scaled_step(k, 1e-4))}}


def cmd_verify(args):
    if args.input is not None:
        doc = _require_doc(args)
        checks = curve_checks(_curve(doc), args.tol)
        report = {"curve": io.curve_to_json(_curve(doc)),
                  "checks": {c.name: c.as_dict() for c in checks}}
        ok = all(c.passed for c in checks)
    else:
        reports = run_all(args.seed)
        report = {"seed": args.seed,
                  "criteria": [{k: v for k, v in r.as_dict().items() if k != "runtime_s"}
                               for r in reports]}
        for r in reports:
            log.info("criterion %d: %s (%.2fs)", r.number, "pass" if r.passed else "FAIL",
                     r.runtime)
        ok = all(r.passed for r in reports)
    report["all_pass"] = ok
    if not ok:
        err = InvariantError("verification failed: a residual exceeds its threshold")
        err.document = report
        raise err
    return report


HANDLERS = {"periods": cmd_periods, "gm-check": cmd_gm_check, "pf-check": cmd_pf_check,
            "pf-transport": cmd_pf_transport, "monodromy": cmd_monodromy,
            "actions": cmd_actions, "legendre": cmd_legendre, "verify": cmd_verify}


def _error_doc(code, exc):
    err = {"code": code, "type": type(exc).__name__, "message": str(exc)}
    param = getattr(exc, "param", None)
    if param is not None:
        err["param"] = param
    return {"error": err}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        if not (TOL_RANGE[0] <= args.tol <= TOL_RANGE[1]):
            raise InputError(f"--tol must lie in [{TOL_RANGE[0]}, {TOL_RANGE[1]}]")
    except InputError as exc:
        print(f"pfperiods: error: {exc}", file=sys.stderr)
        stdout.write(io.dumps(_error_doc(EXIT_INPUT, exc)) + "\n")
        return EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        out = HANDLERS[args.command](args)
    except InputError as exc:
        code, err = EXIT_INPUT, exc
    except (DegenerateCurveError, SingularityError) as exc:
        code, err = EXIT_DEGENERATE, exc
    except ConvergenceError as exc:
        code, err = EXIT_CONVERGENCE, exc
    except InvariantError as exc:
        code, err = EXIT_INTERNAL, exc
    except Exception as exc:  # noqa: BLE001 - anything else is a bug
        log.exception("internal error")
        code, err = EXIT_INTERNAL, exc
    else:
        stdout.write(out if isinstance(out, str) else io.dumps(out) + "\n")
        return EXIT_OK
    if getattr(err, "document", None) is not None:
        stdout.write(io.dumps(err.document) + "\n")
    else:
        stdout.write(io.dumps(_error_doc(code, err)) + "\n")
    print(f"pfperiods: {type(err).__name__}: {err}", file=sys.stderr)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
