"""Command-line front end.

    engine <interp|check|compare|end|cat|verify> --session FILE [options]

Every command prints a human-readable report on stdout, or a canonical JSON
mirror with --json.  Diagnostics go to stderr.  Exit codes: 0 success or
semantically true, 1 semantically false, 2 input error, 3 unknown name,
4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction

from .linalg import Matrix, Subspace, contains, image, kernel, map_subspace, rref
from .quiver import (Subdiagram, UnknownEdgeError, UnknownVertexError,
                     validate)
from .formula import (EquationSortMismatchError, FormulaSyntaxError,
                      NonComposablePathError, Sequent, UnknownSortError,
                      format_context, format_formula, normalize, parse_formula,
                      top)
from .interp import (Budget, DifferentQuiverError, InvalidRepresentationError,
                     check_sequent, compare_theories,
                     enumerate_formulas_in_context, interpret)
from .category import (NotASubobjectError, NotFunctionalError, biproduct,
                       cokernel_obj, hom_space, kernel_obj, make_morphism,
                       make_object, zero_point_formula)
from .endo import (DoesNotPreserveError, act_on_object, block_action_matrix,
                   compute_end, end_identity, end_multiply)
from .session import Session, SessionError, load_session

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_NAME = 3
EXIT_INTERNAL = 4

_INPUT_ERRORS = (SessionError, FormulaSyntaxError, UnknownSortError,
                 UnknownEdgeError, UnknownVertexError, NonComposablePathError,
                 EquationSortMismatchError, InvalidRepresentationError,
                 DifferentQuiverError, FileNotFoundError, ValueError)


def _sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _mat_json(m: Matrix) -> list[list[str]]:
    return [[str(x) for x in row] for row in m.entries]


def _space_json(s: Subspace) -> dict:
    return {"ambient_dim": s.ambient_dim, "dim": s.dim,
            "basis": _mat_json(s.basis)}


def _parse_coeffs(text: str) -> tuple[Fraction, ...]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if part:
            out.append(Fraction(part))
    if not out:
        raise ValueError("empty coefficient list")
    return tuple(out)


def _budget_from_args(args) -> Budget:
    kwargs = {}
    if args.max_context_vars is not None:
        kwargs["max_context_vars"] = args.max_context_vars
    if args.max_bound_vars is not None:
        kwargs["max_bound_vars"] = args.max_bound_vars
    if args.max_eqs is not None:
        kwargs["max_equations"] = args.max_eqs
    if args.max_path_len is not None:
        kwargs["max_path_length"] = args.max_path_len
    if args.coeffs is not None:
        kwargs["coefficients"] = _parse_coeffs(args.coeffs)
    budget = Budget(**kwargs)
    if min(budget.max_context_vars, budget.max_bound_vars,
           budget.max_equations, budget.max_path_length) < 0:
        raise ValueError("budget values must be non-negative")
    if budget.max_context_vars == 0:
        raise ValueError("budget needs at least one context variable")
    return budget


class _Report:
    def __init__(self, command: str, session_path: str, args: dict):
        self.data = {
            "command": command,
            "session": session_path,
            "session_sha256": _sha256(session_path),
            "args": args,
            "results": {},
        }
        self.lines: list[str] = []
        self._t0 = time.perf_counter()

    def line(self, text: str):
        self.lines.append(text)

    def emit(self, as_json: bool):
        self.data["timing_ms"] = round(
            (time.perf_counter() - self._t0) * 1000.0, 3)
        if as_json:
            print(json.dumps(self.data, sort_keys=True, indent=2))
        else:
            header = [f"command: {self.data['command']}",
                      f"session: {self.data['session']} "
                      f"sha256:{self.data['session_sha256'][:16]}"]
            for text in header + self.lines:
                print(text)


def _print_space(report: _Report, label: str, s: Subspace):
    report.line(f"{label}: ambient dim {s.ambient_dim}, dim {s.dim}")
    for row in s.basis.entries:
        report.line("  [" + ", ".join(str(x) for x in row) + "]")


def _object_results(obj) -> dict:
    return {
        "context": list(obj.context),
        "ambient_dim": obj.ambient_dim,
        "k": _space_json(obj.K),
        "k_prime": _space_json(obj.K_prime),
        "qdim": obj.qdim,
    }


def _get_object(session: Session, phi_name: str | None, psi_name: str | None,
                rep, flag: str):
    if phi_name is None:
        raise ValueError(f"missing {flag} for this cat operation")
    phi = session.formula(phi_name)
    if psi_name is None:
        psi = zero_point_formula(phi.context)
    else:
        psi = session.formula(psi_name)
    return make_object(phi, psi, rep)


def cmd_interp(args) -> int:
    session = load_session(args.session)
    rep = session.rep(args.rep)
    f = session.formula(args.formula)
    report = _Report("interp", args.session,
                     {"rep": args.rep, "formula": args.formula})
    space = interpret(f, rep)
    report.data["results"] = {
        "formula": format_formula(f),
        "context": format_context(f),
        "space": _space_json(space),
    }
    report.line(f"formula {args.formula}: {format_formula(f)}")
    _print_space(report, "interpretation", space)
    report.emit(args.json)
    return EXIT_OK


def cmd_check(args) -> int:
    session = load_session(args.session)
    rep = session.rep(args.rep)
    lhs = session.formula(args.lhs)
    rhs = session.formula(args.rhs)
    report = _Report("check", args.session,
                     {"rep": args.rep, "lhs": args.lhs, "rhs": args.rhs})
    seq = Sequent(lhs.context, lhs, rhs)
    valid = check_sequent(seq, rep)
    report.data["results"] = {"valid": valid,
                              "lhs": format_formula(lhs),
                              "rhs": format_formula(rhs)}
    report.line(f"sequent: {format_formula(lhs)}  |-  {format_formula(rhs)}")
    report.line(f"valid: {str(valid).lower()}")
    report.emit(args.json)
    return EXIT_OK if valid else EXIT_FALSE


def cmd_compare(args) -> int:
    session = load_session(args.session)
    rep_a = session.rep(args.rep_a)
    rep_b = session.rep(args.rep_b)
    budget = _budget_from_args(args)
    report = _Report("compare", args.session,
                     {"rep_a": args.rep_a, "rep_b": args.rep_b})
    result = compare_theories(rep_a, rep_b, budget)
    report.data["budget"] = budget.to_dict()
    report.data["results"] = result.to_dict()
    report.line(f"verdict: {result.verdict} (method: {result.method})")
    report.line(f"formulas considered: {result.formulas_considered}")
    if result.witness is not None:
        report.line(f"witness context: {format_context(result.witness.lhs)}")
        report.line(f"witness: {format_formula(result.witness.lhs)}  |-  "
                    f"{format_formula(result.witness.rhs)}")
        report.line(f"holds only in: {result.holds_in}")
    report.emit(args.json)
    return EXIT_OK if result.verdict == "equal" else EXIT_FALSE


def cmd_end(args) -> int:
    session = load_session(args.session)
    rep = session.rep(args.rep)
    problems = validate(rep)
    if problems:
        raise InvalidRepresentationError(problems[0])
    if args.vertices:
        verts = [v.strip() for v in args.vertices.split(",") if v.strip()]
        sub = Subdiagram.of(rep.quiver, verts)
    else:
        sub = Subdiagram.of(rep.quiver)
    report = _Report("end", args.session,
                     {"rep": args.rep, "vertices": list(sub.vertices)})
    alg = compute_end(rep, sub)
    report.data["results"] = {
        "vertices": list(sub.vertices),
        "dims": list(alg.dims),
        "dim": alg.dim,
        "basis": _mat_json(alg.basis.basis),
    }
    report.line(f"subdiagram vertices: {', '.join(sub.vertices) or '(none)'}")
    report.line(f"algebra dimension: {alg.dim}")
    for row in alg.basis.basis_rows():
        report.line("  [" + ", ".join(str(x) for x in row) + "]")
    report.emit(args.json)
    return EXIT_OK


def cmd_cat(args) -> int:
    session = load_session(args.session)
    rep = session.rep(args.rep)
    report = _Report("cat", args.session,
                     {"rep": args.rep, "operation": args.operation})
    res: dict = {"operation": args.operation}
    try:
        if args.operation == "object":
            obj = _get_object(session, args.phi, args.psi, rep)
            res["object"] = _object_results(obj)
            report.line(f"object qdim: {obj.qdim} "
                        f"(K dim {obj.K.dim}, K' dim {obj.K_prime.dim})")
        elif args.operation in ("morphism", "kernel", "cokernel"):
            dom = _get_object(session, args.dom_phi, args.dom_psi, rep)
            cod = _get_object(session, args.cod_phi, args.cod_psi, rep)
            theta = session.formula(args.theta)
            mor = make_morphism(dom, cod, theta, rep)
            if args.operation == "morphism":
                res["dom"] = _object_results(dom)
                res["cod"] = _object_results(cod)
                res["matrix"] = _mat_json(mor.map)
                report.line(f"morphism matrix ({mor.map.rows}x{mor.map.cols}):")
                for row in mor.map.entries:
                    report.line("  [" + ", ".join(str(x) for x in row) + "]")
            elif args.operation == "kernel":
                obj, incl = kernel_obj(mor)
                res["object"] = _object_results(obj)
                res["inclusion_matrix"] = _mat_json(incl.map)
                report.line(f"kernel qdim: {obj.qdim}")
            else:
                obj, proj = cokernel_obj(mor)
                res["object"] = _object_results(obj)
                res["projection_matrix"] = _mat_json(proj.map)
                report.line(f"cokernel qdim: {obj.qdim}")
        elif args.operation == "biproduct":
            a = _get_object(session, args.phi, args.psi, rep)
            b = _get_object(session, args.phi_b, args.psi_b, rep)
            bp = biproduct(a, b)
            res["object"] = _object_results(bp.obj)
            res["proj_a_matrix"] = _mat_json(bp.proj_a.map)
            res["proj_b_matrix"] = _mat_json(bp.proj_b.map)
            report.line(f"biproduct qdim: {bp.obj.qdim}")
        elif args.operation == "hom":
            dom = _get_object(session, args.dom_phi, args.dom_psi, rep)
            cod = _get_object(session, args.cod_phi, args.cod_psi, rep)
            budget = _budget_from_args_hom(args)
            hs = hom_space(dom, cod, rep, budget)
            res["dim"] = len(hs.basis)
            res["basis"] = [_mat_json(m.map) for m in hs.basis]
            res["budget"] = budget.to_dict()
            report.line(f"hom basis found: {len(hs.basis)} morphisms")
        else:
            raise ValueError(f"unknown cat operation {args.operation!r}")
    except (NotASubobjectError, NotFunctionalError) as exc:
        res["error"] = str(exc)
        if isinstance(exc, NotFunctionalError):
            res["failed_condition"] = exc.condition
        report.data["results"] = res
        report.line(f"failed: {exc}")
        report.emit(args.json)
        return EXIT_FALSE
    report.data["results"] = res
    report.emit(args.json)
    return EXIT_OK


def _budget_from_args_hom(args) -> Budget:
    kwargs = {"max_context_vars": 1}
    if args.max_bound_vars is not None:
        kwargs["max_bound_vars"] = args.max_bound_vars
    else:
        kwargs["max_bound_vars"] = 1
    if args.max_eqs is not None:
        kwargs["max_equations"] = args.max_eqs
    if args.max_path_len is not None:
        kwargs["max_path_length"] = args.max_path_len
    if args.coeffs is not None:
        kwargs["coefficients"] = _parse_coeffs(args.coeffs)
    return Budget(**kwargs)


def _verify_checks(session: Session):
    """Invariant suite over every representation in the session."""
    checks = []
    small = Budget(max_context_vars=1, max_bound_vars=1, max_equations=1,
                   max_path_length=1,
                   coefficients=(Fraction(-1), Fraction(0), Fraction(1)))

    def check(name: str, passed: bool, details: str = ""):
        checks.append({"name": name, "passed": bool(passed), "details": details})

    for name, f in session.formulas.items():
        rt = parse_formula(format_formula(f), session.quiver, format_context(f))
        check(f"formula {name}: print/parse round-trip", rt == f)
        check(f"formula {name}: normalize idempotent",
              normalize(normalize(f)) == normalize(f))

    for rep_name, rep in session.reps.items():
        problems = validate(rep)
        check(f"rep {rep_name}: shapes valid", not problems,
              "; ".join(problems))
        if problems:
            continue
        for e, m in zip(rep.quiver.edges, rep.mats):
            check(f"rep {rep_name}: rank-nullity edge {e.name}",
                  kernel(m).dim + image(m).dim == m.cols)
        spaces = []
        for ctx in [(v,) for v in rep.quiver.vertices]:
            for f in enumerate_formulas_in_context(rep.quiver, ctx, small):
                s = interpret(f, rep)
                spaces.append(s)
                if rref(s.basis) != s.basis:
                    check("interpretation canonical", False, format_formula(f))
                    break
        check(f"rep {rep_name}: interpretations canonical", True)
        alg = compute_end(rep)
        ok = True
        detail = ""
        elements = alg.elements()
        for f_ctx in [(v,) for v in rep.quiver.vertices]:
            for f in enumerate_formulas_in_context(rep.quiver, f_ctx, small):
                s = interpret(f, rep)
                for e in elements:
                    a = block_action_matrix(e, f_ctx, rep)
                    if not contains(s, map_subspace(a, s)):
                        ok = False
                        detail = format_formula(f)
                        break
                if not ok:
                    break
            if not ok:
                break
        check(f"rep {rep_name}: commutant preserves definable subspaces",
              ok, detail)
        ident = end_identity(alg)
        closure_ok = True
        for e1 in elements:
            for e2 in elements:
                prod = end_multiply(e1, e2)
                from .endo import contains_element
                if not contains_element(alg, prod):
                    closure_ok = False
        check(f"rep {rep_name}: commutant closed under product", closure_ok)
        for v in rep.quiver.vertices:
            if rep.dim_of(v) == 0:
                continue
            from .formula import top
            obj = make_object(top((v,)), zero_point_formula((v,)), rep)
            act = act_on_object(ident, obj, rep)
            check(f"rep {rep_name}: identity acts as identity on {v}",
                  act == Matrix.identity(obj.qdim))
    return checks


def cmd_verify(args) -> int:
    session = load_session(args.session)
    for rep_name, rep in session.reps.items():
        problems = validate(rep)
        if problems:
            raise InvalidRepresentationError(
                f"rep {rep_name!r}: " + "; ".join(problems))
    report = _Report("verify", args.session, {})
    checks = _verify_checks(session)
    failed = [c for c in checks if not c["passed"]]
    report.data["results"] = {"checks": checks, "failed": len(failed)}
    for c in checks:
        status = "ok" if c["passed"] else "FAIL"
        detail = f" ({c['details']})" if c["details"] else ""
        report.line(f"[{status}] {c['name']}{detail}")
    report.line(f"failed: {len(failed)} of {len(checks)}")
    report.emit(args.json)
    return EXIT_OK if not failed else EXIT_INTERNAL


def _add_budget_flags(p: argparse.ArgumentParser):
    p.add_argument("--max-context-vars", type=int, default=None)
    p.add_argument("--max-bound-vars", type=int, default=None)
    p.add_argument("--max-eqs", type=int, default=None)
    p.add_argument("--max-path-len", type=int, default=None)
    p.add_argument("--coeffs", type=str, default=None,
                   help="comma-separated coefficient list, e.g. -1,0,1,2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="engine",
        description="Exact engine for definable subspaces of quiver "
                    "representations over the rationals.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--session", required=True, help="session file")
        p.add_argument("--json", action="store_true",
                       help="emit the JSON report")

    p = sub.add_parser("interp", help="interpret a formula as a subspace")
    common(p)
    p.add_argument("--rep", required=True)
    p.add_argument("--formula", required=True)
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("check", help="decide a regular sequent")
    common(p)
    p.add_argument("--rep", required=True)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("compare", help="bounded theory comparison")
    common(p)
    p.add_argument("--rep-a", required=True)
    p.add_argument("--rep-b", required=True)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("end", help="endomorphism algebra of a restriction")
    common(p)
    p.add_argument("--rep", required=True)
    p.add_argument("--vertices", default=None,
                   help="comma-separated vertex list (default: all)")
    p.set_defaults(func=cmd_end)

    p = sub.add_parser("cat", help="category constructions")
    common(p)
    p.add_argument("operation",
                   choices=["object", "morphism", "kernel", "cokernel",
                            "biproduct", "hom"])
    p.add_argument("--rep", required=True)
    p.add_argument("--phi")
    p.add_argument("--psi")
    p.add_argument("--phi-b")
    p.add_argument("--psi-b")
    p.add_argument("--dom-phi")
    p.add_argument("--dom-psi")
    p.add_argument("--cod-phi")
    p.add_argument("--cod-psi")
    p.add_argument("--theta")
    _add_budget_flags(p)
    p.set_defaults(func=cmd_cat)

    p = sub.add_parser("verify", help="run the invariant suite on a session")
    common(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_NAME
    except (DoesNotPreserveError, AssertionError) as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
