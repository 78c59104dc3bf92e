"""Command-line driver.  Every command prints one JSON report on stdout.

Exit codes: 0 success, 1 mathematical failure (invalid structure, broken
complex, failed certificate), 2 malformed input, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
import time
from typing import Any

from . import __version__
from .cct import cct_check
from .cohomology import BrokenComplexError, PreconditionError, cohomology_tower, same_class
from .complexes import (
    alg_complex,
    cm_complex,
    da_complex,
    do_complex,
    mapping_pair,
    morphism_complex,
    phi_cap,
    pi_map,
    tau_full,
    tau_phi,
)
from .deformation import (
    apply_gauge,
    are_equivalent,
    infinitesimal,
    trivialize,
    validate_deformation,
)
from .exactlin import InputError
from .problem import Problem, load, to_jsonable
from .structures import regular_bimodule, triangle_phi_bimodule, validate

log = logging.getLogger("diffmor")

ERRATA = {
    "pi0": "degree-0 component of pi is (-d_M, -d_N) rather than the identity, which is not a chain map; "
    "the cone differential uses (-1)^n pi in every degree including 0",
    "lambda_term": "operator equations of a deformation include the weight term "
    "lam * sum mu_i(d_j x d_k) over i + j + k = n",
}


class MathFailure(Exception):
    """Raised to exit with status 1 after the report is printed."""


def _emit(report: dict) -> None:
    json.dump(to_jsonable(report), sys.stdout, indent=1)
    sys.stdout.write("\n")


def _findings(prob: Problem) -> list[dict]:
    out = []
    for name, A in prob.algebras.items():
        out += [v.as_dict() for v in validate(A, label=name).violations]
    for name, P in prob.bimodules.items():
        rep = validate(P, label=name)
        out += [dict(v.as_dict(), where=name) for v in rep.violations]
        if rep.ok:
            tri = validate(triangle_phi_bimodule(P), differential=False, label=name + " (triangle)")
            out += [dict(v.as_dict(), where=name) for v in tri.violations]
            R, W = mapping_pair(P)
            out += [dict(v.as_dict(), where=name) for v in validate(R, label=name + " ring").violations]
            out += [dict(v.as_dict(), where=name) for v in validate(W, label=name + " module").violations]
    return out


def cmd_validate(args, prob: Problem, report: dict) -> int:
    found = _findings(prob)
    for name, T in prob.deformations.items():
        rep = validate_deformation(T, threads=args.threads)
        found += [dict(d, where=name) for d in rep.as_dict()["violations"]]
        report["errata"]["lambda_term"] = ERRATA["lambda_term"]
    report["findings"] = found
    report["result"] = {"valid": not found}
    return 0 if not found else 1


def _require_valid(prob: Problem, report: dict) -> None:
    found = _findings(prob)
    report["findings"] = found
    if found:
        raise MathFailure("input structures are invalid")


def cmd_cohomology(args, prob: Problem, report: dict) -> int:
    _require_valid(prob, report)
    P = prob.phi_bimodule(args.name)
    if args.algebra:
        A = prob.algebras.get(args.algebra)
        if A is None:
            raise InputError(f"unknown algebra {args.algebra!r}")
        M = regular_bimodule(A)
    else:
        A, M = P.A, P.M
    builders = {
        "alg": lambda: alg_complex(A, M),
        "do": lambda: do_complex(A, M),
        "da": lambda: da_complex(A, M),
        "mor": lambda: morphism_complex(P),
        "cm": lambda: cm_complex(P),
    }
    if args.complex == "cm":
        report["errata"]["pi0"] = ERRATA["pi0"]
    cx = builders[args.complex]()
    tower = cohomology_tower(cx, args.max_degree, representatives=args.representatives, threads=args.threads)
    rows = []
    for r in tower:
        row = r.as_dict()
        if args.representatives:
            row["representatives"] = [list(c.coords) for c in r.representatives]
        rows.append(row)
    report["result"] = {"complex": args.complex, "betti": [r.betti for r in tower], "degrees": rows}
    return 0


def cmd_cct(args, prob: Problem, report: dict) -> int:
    _require_valid(prob, report)
    report["errata"]["pi0"] = ERRATA["pi0"]
    cert = cct_check(prob.phi_bimodule(args.name), args.max_degree, threads=args.threads)
    report["result"] = cert.as_dict()
    return 0 if cert.passes else 1


def _deformation(prob: Problem, name: str):
    try:
        return prob.deformations[name]
    except KeyError:
        raise InputError(f"unknown deformation {name!r}") from None


def cmd_deform(args, prob: Problem, report: dict) -> int:
    report["errata"]["lambda_term"] = ERRATA["lambda_term"]
    action = args.action
    if action == "validate":
        rep = validate_deformation(_deformation(prob, args.name), threads=args.threads)
        report["result"] = rep.as_dict()
        return 0 if rep.ok else 1
    if action == "infinitesimal":
        T = _deformation(prob, args.name)
        c = infinitesimal(T)
        cm = cm_complex(_self(T))
        residual = cm.slice(2).matrix @ c.coords
        report["errata"]["pi0"] = ERRATA["pi0"]
        report["result"] = {
            "blocks": {b.name: list(c.block(b.name)) for b in c.space.blocks},
            "is_cocycle": not any(residual),
            "is_coboundary": same_class(c, c.__class__.zero(c.space), cm.slice(1)),
        }
        return 0 if not any(residual) else 1
    if action == "equivalent":
        T1, T2 = _deformation(prob, args.a), _deformation(prob, args.b)
        for T in (T1, T2):
            if not validate_deformation(T).ok:
                raise MathFailure(f"deformation {T.name} is invalid")
        G = are_equivalent(T1, T2, args.order)
        cm = cm_complex(_self(T1))
        report["errata"]["pi0"] = ERRATA["pi0"]
        report["result"] = {
            "equivalent": G is not None,
            "infinitesimals_same_class": same_class(infinitesimal(T1), infinitesimal(T2), cm.slice(1))
            if T1.order >= 1 else True,
            "gauge": None if G is None else G.as_dict(),
        }
        if G is not None and not apply_gauge(T1.truncate(min(args.order, T1.order)), G).same_as(
            T2.truncate(min(args.order, T2.order))
        ):
            raise MathFailure("gauge found but does not reproduce the target")
        return 0
    if action == "trivialize":
        report["errata"]["pi0"] = ERRATA["pi0"]
        res = trivialize(_deformation(prob, args.name), args.order)
        report["result"] = res.as_dict()
        return 0
    raise InputError(f"unknown deform action {action!r}")


def _self(T):
    from .structures import self_coefficients

    return self_coefficients(T.base)


def cmd_selftest(args, prob: Problem | None, report: dict) -> int:
    from .fixtures import random_fixture

    rng = random.Random(args.seed)
    failures = []
    cases = []
    for k in range(args.count):
        P = random_fixture(rng)
        label = f"#{k} {P.name} lam={P.A.weight}"
        problems = []
        if not validate(P).ok:
            problems.append("invalid fixture")
        R, W = mapping_pair(P)
        complexes = {
            "alg": alg_complex(P.A, P.M), "do": do_complex(P.A, P.M), "da": da_complex(P.A, P.M),
            "mor": morphism_complex(P), "cm": cm_complex(P),
            "ring alg": alg_complex(R, W), "ring do": do_complex(R, W), "ring da": da_complex(R, W),
        }
        for label_cx, cx in complexes.items():
            for n in range(args.max_degree):
                if not (cx.slice(n + 1).matrix @ cx.slice(n).matrix).is_zero():
                    problems.append(f"{label_cx}: square at {n}")
        Pt = triangle_phi_bimodule(P)
        for n in range(args.max_degree):
            if not (complexes["ring da"].slice(n).matrix @ tau_full(P, n)
                    - tau_full(P, n + 1) @ complexes["cm"].slice(n).matrix).is_zero():
                problems.append(f"tau_full chain map at {n}")
            if not (phi_cap(R, W, n) @ tau_phi(P, n) - tau_phi(Pt, n) @ pi_map(P, n)).is_zero():
                problems.append(f"square at {n}")
        cases.append({"case": label, "ok": not problems, "problems": problems})
        failures += problems
    report["errata"]["pi0"] = ERRATA["pi0"]
    report["result"] = {"seed": args.seed, "cases": cases, "ok": not failures}
    return 0 if not failures else 1


def build_parser() -> argparse.ArgumentParser:
    def flags(suppress: bool) -> argparse.ArgumentParser:
        # subcommands must not overwrite values given before the subcommand name
        default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        parent = argparse.ArgumentParser(add_help=False)
        parent.add_argument("--threads", type=int, default=default(1), help="worker threads")
        parent.add_argument("--seed", type=int, default=default(0), help="seed for randomized self-tests")
        parent.add_argument("-v", "--verbose", action="store_true", default=default(False))
        return parent

    common = flags(True)
    p = argparse.ArgumentParser(prog="diffmor", description=__doc__.splitlines()[0], parents=[flags(False)])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check every axiom of every structure in FILE")
    s.add_argument("file")

    s = sub.add_parser("cohomology", parents=[common], help="Betti numbers of one complex")
    s.add_argument("file")
    s.add_argument("--complex", choices=["alg", "do", "da", "mor", "cm"], default="cm")
    s.add_argument("--max-degree", type=int, default=3)
    s.add_argument("--name", help="bimodule or morphism name (default: first)")
    s.add_argument("--algebra", help="for alg/do/da: use this algebra with itself as coefficients")
    s.add_argument("--representatives", action="store_true", help="include representative cocycles")

    s = sub.add_parser("cct", parents=[common], help="compare morphism and mapping-ring cohomology")
    s.add_argument("file")
    s.add_argument("--max-degree", type=int, default=3)
    s.add_argument("--name")

    s = sub.add_parser("deform", parents=[common], help="deformation tools")
    dsub = s.add_subparsers(dest="action", required=True)
    for action in ("validate", "infinitesimal"):
        d = dsub.add_parser(action, parents=[common])
        d.add_argument("file")
        d.add_argument("--name", required=True)
    d = dsub.add_parser("equivalent", parents=[common])
    d.add_argument("file")
    d.add_argument("--a", required=True)
    d.add_argument("--b", required=True)
    d.add_argument("--order", type=int, default=2)
    d = dsub.add_parser("trivialize", parents=[common])
    d.add_argument("file")
    d.add_argument("--name", required=True)
    d.add_argument("--order", type=int, default=2)

    s = sub.add_parser("selftest", parents=[common], help="random fixtures through every complex and chain map")
    s.add_argument("--count", type=int, default=10)
    s.add_argument("--max-degree", type=int, default=2)
    return p


COMMANDS = {
    "validate": cmd_validate,
    "cohomology": cmd_cohomology,
    "cct": cmd_cct,
    "deform": cmd_deform,
    "selftest": cmd_selftest,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    command = [args.command] + ([args.action] if args.command == "deform" else [])
    report: dict[str, Any] = {"command": " ".join(command), "input": getattr(args, "file", None),
                              "findings": [], "errata": {}, "result": None}
    start = time.perf_counter()
    code = 3
    try:
        prob = load(args.file) if hasattr(args, "file") else None
        code = COMMANDS[args.command](args, prob, report)
    except InputError as exc:
        report["error"] = f"malformed input: {exc}"
        code = 2
    except (MathFailure, BrokenComplexError, PreconditionError) as exc:
        report["error"] = str(exc)
        code = 1
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        log.exception("internal error")
        report["error"] = f"internal error: {type(exc).__name__}: {exc}"
        code = 3
    report["timing"] = {"seconds": round(time.perf_counter() - start, 3)}
    report["exit_code"] = code
    _emit(report)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
