"""Command-line interface.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage,
parse and configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from itertools import product
from typing import Any, Callable, Sequence

import numpy as np

from plie.enveloping import (
    DEFAULT_SIZE_LIMIT,
    RestrictedEnvelope,
    SizeBound,
    restricted_primitives,
    unit_eta_check,
)
from plie.fp import InvalidModulus
from plie.free import free_restricted_basis, witt_oracle_dimension
from plie.io import ParseError, algebra_to_dict, parse_algebra
from plie.lie import RestrictedLieAlgebra, check_axioms
from plie.monadic import (
    EtaFailure,
    TruncationTooSmall,
    default_max_degree,
    em_laws_check,
    mu0_from_restricted,
    p2u,
    roundtrip_check,
    sandwich_certificate,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _max_degree(args, L: RestrictedLieAlgebra) -> int:
    return args.max_degree if args.max_degree is not None else default_max_degree(L.p)


def cmd_check(args) -> dict:
    L = parse_algebra(args.file)
    report = check_axioms(L, samples=args.samples, seed=args.seed)
    return {
        "status": _status(report.passed),
        "algebra": algebra_to_dict(L),
        "checks": [
            {"name": "jacobi", "passed": not report.jacobi_failures, "failures": report.jacobi_failures},
            {
                "name": "restrictedness",
                "passed": not report.restrictedness_failures,
                "failures": report.restrictedness_failures,
            },
            {"name": "additivity", "passed": not report.additivity_failures, "failures": report.additivity_failures},
            {
                "name": "semilinearity",
                "passed": not report.semilinearity_failures,
                "failures": report.semilinearity_failures,
            },
        ],
        "samples": args.samples,
        "message": "all axioms hold" if report.passed else "axiom violations found",
    }


def cmd_env(args) -> dict:
    L = parse_algebra(args.file)
    env = RestrictedEnvelope(L, args.size_limit)
    monos = env.monomials
    names = [env.format(env.monomial(m)) for m in monos]
    if env.size <= 27:
        triples = list(product(monos, repeat=3))
        mode = "exhaustive"
    else:
        rng = np.random.default_rng(args.seed)
        triples = [tuple(monos[i] for i in rng.integers(0, env.size, size=3)) for _ in range(args.samples)]
        mode = "sampled"
    bad = []
    for a, b, c in triples:
        ua, ub, uc = env.monomial(a), env.monomial(b), env.monomial(c)
        if (ua * ub) * uc != ua * (ub * uc):
            bad.append([env.format(ua), env.format(ub), env.format(uc)])
    unit_ok = all(env.one() * env.monomial(m) == env.monomial(m) == env.monomial(m) * env.one() for m in monos)
    out: dict[str, Any] = {
        "status": _status(not bad and unit_ok),
        "p": L.p,
        "dim_L": L.dim,
        "dimension": env.size,
        "basis": names,
        "checks": [
            {"name": "associativity", "passed": not bad, "mode": mode, "triples": len(triples), "failures": bad[:20]},
            {"name": "unit", "passed": unit_ok},
        ],
    }
    if args.table:
        out["table"] = [
            [{env.format(env.monomial(m)): c for m, c in sorted(env.mono_mul(a, b).items())} for b in monos]
            for a in monos
        ]
    return out


def cmd_primitives(args) -> dict:
    L = parse_algebra(args.file)
    space = restricted_primitives(L, args.size_limit)
    eta = unit_eta_check(L, space)
    k = space.dim
    return {
        "status": _status(eta.passed),
        "dimension_u": space.env.size,
        "primitive_basis": [b.pretty() for b in space.basis],
        "brackets": {f"{i},{j}": space.brackets[i, j].tolist() for i in range(k) for j in range(i + 1, k)},
        "pmap": [row.tolist() for row in space.pmap],
        "checks": [{"name": "eta_isomorphism", **eta.to_dict()}],
    }


def cmd_free(args) -> dict:
    if args.p is None or args.rank is None or args.max_degree is None:
        raise UsageError("free requires --p, --rank and --max-degree")
    if args.rank < 1 or args.max_degree < 1:
        raise UsageError("--rank and --max-degree must be positive")
    layers = free_restricted_basis(args.p, args.rank, args.max_degree)
    dims = [layer.dim for layer in layers]
    out: dict[str, Any] = {"status": "pass", "p": args.p, "rank": args.rank, "max_degree": args.max_degree, "dims": dims}
    if args.oracle:
        oracle = [witt_oracle_dimension(args.p, args.rank, n) for n in range(1, args.max_degree + 1)]
        agree = oracle == dims
        out["witt_oracle_cross_check"] = oracle
        out["checks"] = [{"name": "witt_oracle_agreement", "passed": agree}]
        out["status"] = _status(agree)
    return out


def cmd_roundtrip(args) -> dict:
    L = parse_algebra(args.file)
    N = _max_degree(args, L)
    try:
        report = roundtrip_check(L, N, args.size_limit, seed=args.seed)
    except EtaFailure as exc:
        return {"status": "fail", "max_degree": N, "checks": [{"name": "eta_isomorphism", "passed": False, "error": str(exc)}]}
    return {"status": _status(report.passed), "max_degree": N, "checks": [{"name": "roundtrip", **report.to_dict()}]}


def cmd_em_check(args) -> dict:
    L = parse_algebra(args.file)
    N = _max_degree(args, L)
    try:
        A = mu0_from_restricted(L, N, args.size_limit)
    except EtaFailure as exc:
        return {"status": "fail", "max_degree": N, "checks": [{"name": "eta_isomorphism", "passed": False, "error": str(exc)}]}
    report = em_laws_check(A, seed=args.seed)
    return {"status": _status(report.passed), "max_degree": N, "checks": [{"name": "em_laws", **report.to_dict()}]}


def cmd_sandwich(args) -> dict:
    L = parse_algebra(args.file)
    N = _max_degree(args, L)
    try:
        V2 = p2u(L, N, args.size_limit)
    except EtaFailure as exc:
        return {"status": "fail", "max_degree": N, "checks": [{"name": "eta_isomorphism", "passed": False, "error": str(exc)}]}
    report = sandwich_certificate(V2, N, args.size_limit)
    return {"status": _status(report.passed), "max_degree": N, "checks": [{"name": "sandwich", **report.to_dict()}]}


COMMANDS: dict[str, Callable[[argparse.Namespace], dict]] = {
    "check": cmd_check,
    "env": cmd_env,
    "primitives": cmd_primitives,
    "free": cmd_free,
    "roundtrip": cmd_roundtrip,
    "em-check": cmd_em_check,
    "sandwich": cmd_sandwich,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["text", "json"], default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--size-limit", type=int, default=DEFAULT_SIZE_LIMIT, help="upper bound on p^dim L")
    common.add_argument("--samples", type=int, default=100, help="random samples for sampled checks")

    parser = argparse.ArgumentParser(prog="plie", description="Restricted Lie algebra computations over F_p.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="check the restricted Lie algebra axioms")
    p.add_argument("file")
    p = sub.add_parser("env", parents=[common], help="restricted enveloping algebra u(L)")
    p.add_argument("file")
    p.add_argument("--table", action="store_true", help="print the full multiplication table")
    p = sub.add_parser("primitives", parents=[common], help="primitives of u(L) and the unit isomorphism check")
    p.add_argument("file")
    p = sub.add_parser("free", parents=[common], help="layer dimensions of the free restricted Lie algebra")
    p.add_argument("--p", type=int)
    p.add_argument("--rank", type=int)
    p.add_argument("--max-degree", type=int)
    p.add_argument("--oracle", action="store_true", help="add the Witt-formula cross-check column")
    for name, text in [
        ("roundtrip", "recover L from the EM structure on its primitives"),
        ("em-check", "Eilenberg-Moore laws of the structure map"),
        ("sandwich", "filtered dimension certificate for the quotient of T(V)"),
    ]:
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("file")
        p.add_argument("--max-degree", type=int)
    return parser


def _text_lines(obj: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for key in sorted(obj):
            val = obj[key]
            if isinstance(val, (dict, list)) and val and not _is_flat(val):
                lines.append(f"{pad}{key}:")
                lines.extend(_text_lines(val, indent + 1))
            else:
                lines.append(f"{pad}{key}: {json.dumps(val)}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, (dict, list)) and not _is_flat(item):
                lines.append(f"{pad}-")
                lines.extend(_text_lines(item, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(item)}")
    return lines


def _is_flat(val: Any) -> bool:
    if isinstance(val, list):
        return all(not isinstance(v, (dict, list)) or (isinstance(v, list) and _is_flat(v)) for v in val)
    return False


def render_text(report: dict, elapsed: float) -> str:
    head = [f"command: {' '.join(report['command'])}", f"status: {report['status'].upper()}"]
    if "message" in report:
        head.append(report["message"])
    body = {k: v for k, v in report.items() if k not in ("command", "status", "message")}
    return "\n".join(head + _text_lines(body) + [f"elapsed: {elapsed:.3f}s"]) + "\n"


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_PASS
    start = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except (ParseError, InvalidModulus, UsageError, SizeBound, TruncationTooSmall) as exc:
        print(f"plie {args.command}: error: {exc}", file=stderr)
        return EXIT_USAGE
    report = {"command": [args.command, *argv[1:]], **report}
    if args.format == "json":
        stdout.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        stdout.write(render_text(report, time.perf_counter() - start))
    return EXIT_PASS if report["status"] == "pass" else EXIT_FAIL


def main() -> None:
    sys.exit(run())
