"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 numeric failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from typing import Optional, Sequence

import numpy as np

from . import counterexample as cx
from . import lp as lpmod
from . import steinhaus as st
from .errors import ConstructionError, ConvergenceError, DomainError
from .jacobi import JacobiParams, table
from .spaces import Family, parse_space, params_of

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4


class UsageError(Exception):
    pass


def _jsonable(obj):
    """NaN/inf to None, numpy scalars and arrays to plain Python."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _human_text(data: dict, indent: str = "") -> str:
    lines = []
    for key, val in data.items():
        if isinstance(val, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_human_text(val, indent + "  "))
        elif isinstance(val, list) and val and isinstance(val[0], dict):
            lines.append(f"{indent}{key}:")
            for item in val:
                lines.append(indent + "  - " + ", ".join(f"{k}={v}" for k, v in item.items()))
        else:
            lines.append(f"{indent}{key}: {val}")
    return "\n".join(lines)


def write_output(text: str, out: Optional[str]) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(out))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, data: dict, csv_header=None, csv_rows=None) -> None:
    if args.format == "json":
        text = json.dumps(_jsonable(data), indent=2)
    elif args.format == "csv":
        if csv_header is None:
            raise UsageError(f"--format csv is not available for {args.command}")
        text = _csv_text(csv_header, csv_rows)
    else:
        text = _human_text(_jsonable(data))
    write_output(text, args.out)


def _space(args):
    try:
        return parse_space(args.space)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _theorem_space(args):
    space = _space(args)
    if not st.min_alpha_for_theorem(space):
        raise UsageError(
            f"{space} has real dimension one: distance sets there need not lose density "
            f"(try `counterexample --space {space} --k 3`)"
        )
    return space


def _distances(text: Optional[str]) -> list[float]:
    if text is None or text.strip() == "":
        return []
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse distances {text!r}") from exc


def _positive(name: str, value) -> None:
    if not value > 0:
        raise UsageError(f"{name} must be positive, got {value}")


def _check_caps(args) -> None:
    for name in ("degree_cap", "k_verify", "grid", "tol", "n"):
        if hasattr(args, name):
            _positive("--" + name.replace("_", "-"), getattr(args, name))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _slack_rows(cert: st.BoundCertificate, k_verify: int):
    cols = lpmod.jacobi_columns(cert.constants.params, cert.plan.distances, k_verify)
    z = np.asarray(cert.z)
    slack = z[0] + cols[1:] @ z[1:]
    return [(k + 1, float(s)) for k, s in enumerate(slack)]


def cmd_bound(args) -> int:
    space = _theorem_space(args)
    cert = st.run_bound(
        space,
        args.n,
        degree_cap=args.degree_cap,
        grid_size=args.grid,
        k_verify=args.k_verify,
        tol=args.tol,
        start_fraction=args.start_fraction,
        shrink=args.shrink,
    )
    data = cert.to_json()
    _emit(args, data, ["k", "slack"], _slack_rows(cert, args.k_verify) if args.format == "csv" else None)
    return EXIT_OK if cert.accepted else EXIT_VERIFY


def cmd_distances(args) -> int:
    space = _theorem_space(args)
    constants = st.find_lemma_constants(params_of(space).jacobi, args.degree_cap, args.grid)
    plan = st.generate_distances(space, args.n, constants, args.start_fraction, shrink=args.shrink)
    data = {
        "space": space.name,
        "N": plan.N,
        "d0": constants.d0,
        "lambda": constants.lam,
        "epsilon": plan.epsilon,
        "distances": list(plan.distances),
        "r_trace": [s.to_json() for s in plan.r_trace],
    }
    rows = []
    for i, d in enumerate(plan.distances):
        step = plan.r_trace[i] if i < len(plan.r_trace) else None
        rows.append((i + 1, d, step.k0 if step else "", step.u0 if step else "", step.r if step else ""))
    _emit(args, data, ["i", "d", "k0", "u0", "r"], rows)
    return EXIT_OK


def cmd_certificate(args) -> int:
    """Certificate for user-supplied distances, checked against the spacing rule."""
    space = _theorem_space(args)
    ds = _distances(args.distances)
    if not ds:
        raise UsageError("--distances is required")
    N = len(ds)
    constants = st.find_lemma_constants(params_of(space).jacobi, args.degree_cap, args.grid)
    try:
        lpmod.check_distances(ds)
        steps = st.check_spacing(ds, constants, N)
    except DomainError as exc:
        sys.stderr.write(f"distances rejected: {exc}\n")
        return EXIT_VERIFY
    plan = st.DistancePlan(space, N, tuple(ds), st.epsilon_for(constants.lam, N), tuple(steps), math.nan, 1.0)
    cert = st.build_certificate(plan, constants, args.k_verify, args.tol)
    decay = st.verify_decay_claim(plan, constants, args.k_verify, args.tol)
    cert = st.BoundCertificate(plan, constants, cert.z, cert.S, cert.bound, cert.feasibility, decay)
    _emit(args, cert.to_json(), ["k", "slack"], _slack_rows(cert, args.k_verify) if args.format == "csv" else None)
    return EXIT_OK if cert.accepted else EXIT_VERIFY


def cmd_lp_solve(args) -> int:
    space = _space(args)
    params = params_of(space).jacobi
    ds = _distances(args.distances)
    lp = lpmod.build_truncation(params, ds, args.degree_cap)
    sol = lpmod.solve_primal(lp, tol=args.tol)
    data = lpmod.lp_to_json(lp, sol)
    data["space"] = space.name
    rows = sorted(sol.primal_f.items())
    _emit(args, data, ["k", "f"], rows)
    if sol.status is not lpmod.Status.OPTIMAL:
        sys.stderr.write(f"truncated LP not solved: {sol.status.value}\n")
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_counterexample(args) -> int:
    space = _space(args)
    if space.family not in (Family.SPHERE, Family.REAL_PROJECTIVE) or space.n != 2:
        raise UsageError(f"counterexample needs s1 or rp1, not {space}")
    fam = cx.build(space, args.k)
    data = cx.summary(fam, args.samples, args.seed)
    if args.format == "csv":
        write_output(cx.arcs_csv(fam), args.out)
    else:
        _emit(args, data)
    ok = data["analytic_ok"] and data["min_gap"] > 0 and data["total_measure"] >= data["lower_bound"]
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_jacobi_eval(args) -> int:
    if args.space is not None:
        params = params_of(_space(args)).jacobi
    elif args.alpha is not None and args.beta is not None:
        params = JacobiParams(args.alpha, args.beta)
    else:
        raise UsageError("give --space or both --alpha and --beta")
    if args.k < 0:
        raise UsageError("--k must be nonnegative")
    if args.t is not None:
        ts = np.asarray(_distances(args.t))
    else:
        if args.points < 2:
            raise UsageError("--points must be at least 2")
        ts = np.linspace(-1.0, 1.0, args.points)
    vals = table(params, args.k, ts)
    data = {
        "alpha": params.alpha,
        "beta": params.beta,
        "t": ts.tolist(),
        "values": {str(k): vals[k].tolist() for k in range(args.k + 1)},
    }
    rows = [(t, *vals[:, i]) for i, t in enumerate(ts)]
    _emit(args, data, ["t"] + [f"P{k}" for k in range(args.k + 1)], rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    """Recheck a certificate file independently of how it was produced."""
    try:
        with open(args.certificate, encoding="utf-8") as fh:
            data = json.load(fh)
        space = parse_space(data["space"])
        ds = [float(v) for v in data["distances"]]
        z = [float(v) for v in data["z"]]
        lam = float(data["lambda"])
        N = int(data["N"])
    except (OSError, ValueError, KeyError, TypeError, DomainError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from exc
    params = params_of(space).jacobi
    if (params.alpha, params.beta) != (data.get("alpha", params.alpha), data.get("beta", params.beta)):
        raise UsageError("certificate Jacobi parameters do not match its space")
    lp = lpmod.build_truncation(params, ds, 1)
    feas = lpmod.verify_dual(lp, z, args.k_verify, args.tol)
    bound = float(data["bound"])
    z_exp, _, bound_exp = st.certificate_vector(lam, N)
    checks = {
        "feasibility": feas.verdict is not lpmod.Verdict.VIOLATED,
        "bound_le_2^-N": bound <= 2.0**-N,
        "bound_formula": abs(bound - bound_exp) <= 1e-12,
        "z_formula": len(z) == len(z_exp) and max(abs(a - b) for a, b in zip(z, z_exp)) <= 1e-12,
    }
    out = {"space": space.name, "N": N, "feasibility": feas.to_json(), "checks": checks, "ok": all(checks.values())}
    _emit(args, out, ["check", "ok"], list(checks.items()))
    return EXIT_OK if out["ok"] else EXIT_VERIFY


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="steinhaus-cert", description="Density bounds for distance-avoiding sets")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, space_required=True):
        p.add_argument("--space", required=space_required, help="s<d>, rp<d>, cp<d>, hp<d> or op2")
        p.add_argument("--format", choices=["json", "csv", "human"], default="json")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--seed", type=int, default=0)

    def caps(p):
        p.add_argument("--degree-cap", type=int, default=5000)
        p.add_argument("--k-verify", type=int, default=10_000)
        p.add_argument("--grid", type=int, default=400)
        p.add_argument("--tol", type=float, default=1e-9)

    def plan_flags(p):
        p.add_argument("--n", type=int, required=True, help="number of distances")
        p.add_argument("--start-fraction", type=float, default=0.9)
        p.add_argument("--shrink", type=float, default=1.0, help="take d_{i+1} = shrink * r(d_i)")

    p = sub.add_parser("bound", help="full pipeline and certificate")
    common(p)
    caps(p)
    plan_flags(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("distances", help="admissible distance sequence only")
    common(p)
    caps(p)
    plan_flags(p)
    p.set_defaults(func=cmd_distances)

    p = sub.add_parser("certificate", help="certificate for given distances")
    common(p)
    caps(p)
    p.add_argument("--distances", required=True, help="comma-separated, decreasing")
    p.set_defaults(func=cmd_certificate)

    p = sub.add_parser("lp-solve", help="solve the degree-truncated primal")
    common(p)
    p.add_argument("--distances", default="", help="comma-separated distances")
    p.add_argument("--degree-cap", type=int, default=20, help="truncation degree K")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_lp_solve)

    p = sub.add_parser("counterexample", help="arc families on s1 and rp1")
    common(p)
    p.add_argument("--k", type=int, required=True, help="level")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("jacobi-eval", help="tabulate normalized Jacobi polynomials")
    common(p, space_required=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--k", type=int, required=True, help="maximum degree")
    p.add_argument("--t", default=None, help="comma-separated points")
    p.add_argument("--points", type=int, default=201)
    p.set_defaults(func=cmd_jacobi_eval)

    p = sub.add_parser("verify", help="recheck a certificate file")
    p.add_argument("certificate")
    p.add_argument("--format", choices=["json", "csv", "human"], default="json")
    p.add_argument("--out", default=None)
    p.add_argument("--k-verify", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _check_caps(args)
        return args.func(args)
    except (UsageError, DomainError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ConstructionError, ConvergenceError, ArithmeticError) as exc:
        sys.stderr.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
