"""splitdyn command line: thin argparse wiring over the lab experiments.

Exit codes: 0 success, 2 precondition violation (bad input, hypothesis
failure), 3 budget exhausted (degree caps, orbit walks, root finding).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .constants import (
    M_MAX_DEFAULT,
    PRIME_BOUND_DEFAULT,
    REPORT_SCHEMA_VERSION,
)
from .heights import PrecisionOverflowError
from .jsonio import dumps_report, write_report
from .lab import (
    PreperiodicCurve,
    SemiconjugacyFails,
    run_bmz,
    run_chains,
    run_classify,
    run_eisenstein_family,
    run_gk_sweep,
    run_hasse,
    run_orbit,
    run_split,
)
from .mahler import RootFindingError
from .orbitcore import OrbitBudgetError
from .padic import OrbitMeetsVError
from .polynomials import DegreeCapError, PolyParseError, parse_poly
from .projective import parse_point
from .subvar import (
    BiPoly,
    ContainedInV,
    InconsistentVarietyError,
    StructuredVariety,
    UnsupportedVarietyError,
    parse_bipoly,
)
from .verify import verify_certificate

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_BUDGET = 3

_PRECONDITION_ERRORS = (
    PolyParseError,
    InconsistentVarietyError,
    UnsupportedVarietyError,
    OrbitMeetsVError,
    SemiconjugacyFails,
    ContainedInV,
    PreperiodicCurve,
    ValueError,
)
_BUDGET_ERRORS = (
    DegreeCapError,
    OrbitBudgetError,
    RootFindingError,
    PrecisionOverflowError,
)


def _load_maybe_file(text: str) -> str:
    if text.startswith("@"):
        with open(text[1:]) as fh:
            return fh.read()
    return text


def _parse_variety(text: str) -> StructuredVariety:
    return StructuredVariety.from_json(json.loads(_load_maybe_file(text)))


def _parse_point_tuple(text: str):
    return tuple(parse_point(part) for part in text.split(","))


def _parse_curve(text: str) -> BiPoly:
    text = _load_maybe_file(text).strip()
    if text.startswith("["):
        return BiPoly.from_rows(
            [[Fraction(str(c)) for c in row] for row in json.loads(text)]
        )
    return parse_bipoly(text)


def _parse_poly_list(text: str):
    return [parse_poly(part.strip()) for part in text.split(";") if part.strip()]


def _emit(report: dict, args) -> int:
    text = dumps_report(report)
    print(text)
    if args.json:
        write_report(report, args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splitdyn",
        description="Arithmetic dynamics of diagonally split polynomial maps "
        "(classification, p-adic Hasse certificates, height experiments). "
        f"Reports follow JSON schema version {REPORT_SCHEMA_VERSION} "
        "(docs/report_schema.json).",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--json", help="also write the report to this file")

    p = sub.add_parser("classify", help="special/disintegrated classification")
    p.add_argument("--f", required=True, help='polynomial, e.g. "x^2-2"')
    common(p)

    p = sub.add_parser("orbit", help="orbit mod p^m with tail/cycle structure")
    p.add_argument("--f", required=True)
    p.add_argument("--point", required=True, help='comma separated, e.g. "0,5"')
    p.add_argument("--p", required=True, type=int)
    p.add_argument("--m", type=int, default=1)
    common(p)

    p = sub.add_parser("chains", help="chain decomposition of a structured variety")
    p.add_argument("--f", required=True)
    p.add_argument("--variety", required=True, help="JSON or @file")
    common(p)

    p = sub.add_parser("hasse", help="p-adic certificate sweep")
    p.add_argument("--f", required=True)
    p.add_argument("--variety", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--prime-bound", type=int, default=PRIME_BOUND_DEFAULT)
    p.add_argument("--m-max", type=int, default=M_MAX_DEFAULT)
    p.add_argument(
        "--verify",
        action="store_true",
        help="re-run the independent checker on every certificate (also "
        "done during the sweep) and include the outcome",
    )
    common(p)

    p = sub.add_parser("bmz", help="curve vs periodic-graph intersection heights")
    p.add_argument("--f", required=True)
    p.add_argument("--F", required=True, help='bivariate curve, text or nested list, e.g. "y - x^2"')
    p.add_argument("--g-list", help='semicolon separated graphs, e.g. "x^2+1;x^4+2*x^2+2"')
    p.add_argument("--g-iterates", type=int, help="use g = f^m for m = 1..this")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n-steps", type=int, default=8, help="pushforward depth for height estimates")
    common(p)

    p = sub.add_parser("gk-sweep", help="G_k = f^k o Q - f^k o P growth sweep")
    p.add_argument("--f", required=True)
    p.add_argument("--P", required=True)
    p.add_argument("--Q", required=True)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--seed", type=int, default=42)
    common(p)

    p = sub.add_parser("eisenstein-family", help="the X^d + p family experiment")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--seed", type=int, default=42)
    common(p)

    p = sub.add_parser("split", help="reduce a split system through semiconjugacies")
    p.add_argument("--f-list", required=True, help="semicolon separated f_i")
    p.add_argument("--p-list", required=True, help="semicolon separated p_i")
    p.add_argument("--q", required=True)
    p.add_argument("--variety", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--prime-bound", type=int, default=PRIME_BOUND_DEFAULT)
    p.add_argument("--m-max", type=int, default=M_MAX_DEFAULT)
    common(p)

    p = sub.add_parser(
        "verify-certificate", help="independent brute-force check of a certificate"
    )
    p.add_argument("--f", required=True)
    p.add_argument("--variety", required=True)
    p.add_argument("--point", required=True)
    p.add_argument("--certificate", required=True, help="certificate JSON or @file")
    common(p)

    return parser


def _dispatch(args) -> int:
    if args.command == "classify":
        return _emit(run_classify(parse_poly(args.f)), args)
    if args.command == "orbit":
        return _emit(
            run_orbit(parse_poly(args.f), _parse_point_tuple(args.point), args.p, args.m),
            args,
        )
    if args.command == "chains":
        return _emit(run_chains(_parse_variety(args.variety), parse_poly(args.f)), args)
    if args.command == "hasse":
        report = run_hasse(
            parse_poly(args.f),
            _parse_variety(args.variety),
            _parse_point_tuple(args.point),
            args.prime_bound,
            args.m_max,
        )
        if args.verify:
            f = parse_poly(args.f)
            v = _parse_variety(args.variety)
            pt = _parse_point_tuple(args.point)
            report["verification"] = [
                {
                    "p": cert["p"],
                    "m": cert["m"],
                    "ok": bool(verify_certificate(f, v, pt, cert)),
                }
                for cert in report["results"]
            ]
        return _emit(report, args)
    if args.command == "bmz":
        f = parse_poly(args.f)
        if args.g_list:
            g_list = _parse_poly_list(args.g_list)
        elif args.g_iterates:
            g_list = [f.iterate(m) for m in range(1, args.g_iterates + 1)]
        else:
            raise ValueError("provide --g-list or --g-iterates")
        return _emit(
            run_bmz(f, _parse_curve(args.F), g_list, args.seed, args.n_steps), args
        )
    if args.command == "gk-sweep":
        return _emit(
            run_gk_sweep(
                parse_poly(args.f), parse_poly(args.P), parse_poly(args.Q),
                args.k_max, args.seed,
            ),
            args,
        )
    if args.command == "eisenstein-family":
        return _emit(run_eisenstein_family(args.d, args.p, args.k_max, args.seed), args)
    if args.command == "split":
        return _emit(
            run_split(
                _parse_poly_list(args.f_list),
                _parse_poly_list(args.p_list),
                parse_poly(args.q),
                _parse_variety(args.variety),
                _parse_point_tuple(args.point),
                args.prime_bound,
                args.m_max,
            ),
            args,
        )
    if args.command == "verify-certificate":
        cert = json.loads(_load_maybe_file(args.certificate))
        result = verify_certificate(
            parse_poly(args.f),
            _parse_variety(args.variety),
            _parse_point_tuple(args.point),
            cert,
        )
        report = {
            "schema_version": REPORT_SCHEMA_VERSION,
            "command": "verify-certificate",
            "config": {"certificate": cert},
            "results": {"ok": bool(result), "reason": result.reason,
                        "residues_seen": result.residues_seen},
            "summary": {"ok": bool(result)},
            "wall_clock_s": 0.0,
        }
        _emit(report, args)
        return EXIT_OK if result else EXIT_PRECONDITION
    raise AssertionError(f"unhandled command {args.command}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except _BUDGET_ERRORS as exc:
        print(f"error (budget): {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except _PRECONDITION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
