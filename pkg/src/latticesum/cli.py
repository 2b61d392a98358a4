"""Command-line interface: validation, exact sums, verification, tables.

Exit codes: 0 success, 2 domain error (bad polytope / violated check),
3 parse error, 4 numeric failure.
"""

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from .bernoulli1d import bernoulli_numbers, twisted_Q
from .emcore import _context, weighted_sum_polynomial
from .errors import (
    InternalError,
    LatticeSumError,
    NotRational,
    ParseError,
    QuadratureFailure,
)
from .exactnum import RationalAngle
from .multipoly import MultiPoly, format_rational, parse_polynomial
from .polytope import (
    HPolytope,
    choose_polarizing_vector,
    enumerate_lattice_points,
    polarize,
    validate,
    weighted_sum_bruteforce,
)
from .remainder import gaussian_bump, verify_main_theorem

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_PARSE = 3
EXIT_NUMERIC = 4


def _load_polytope(source: str) -> HPolytope:
    """Inline JSON (starts with '{') or a file path."""
    text = source.strip()
    if not text.startswith("{"):
        try:
            with open(text) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read polytope file {source!r}: {exc}") from exc
    return HPolytope.from_json(text)


def _emit(obj, fmt: str):
    if fmt == "json":
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        _emit_table(obj)


def _emit_table(obj, indent=""):
    if isinstance(obj, dict):
        for key, val in obj.items():
            if isinstance(val, (dict, list)):
                print(f"{indent}{key}:")
                _emit_table(val, indent + "  ")
            else:
                print(f"{indent}{key}: {val}")
    elif isinstance(obj, list):
        for val in obj:
            if isinstance(val, (dict, list)):
                _emit_table(val, indent + "  ")
            else:
                print(f"{indent}{val}")
    else:
        print(f"{indent}{obj}")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    H = _load_polytope(args.polytope)
    report = validate(H)
    out = {
        "valid": report.valid,
        "errors": [
            {"kind": kind.__name__, "indices": list(idx), "message": msg}
            for kind, idx, msg in report.errors
        ],
        "polytope": H.to_json(),
    }
    _emit(out, args.format)
    return EXIT_OK if report.valid else EXIT_DOMAIN


def cmd_sum(args) -> int:
    H = _load_polytope(args.polytope)
    p = parse_polynomial(args.poly, H.dim)
    value = weighted_sum_polynomial(H, p, args.k)
    if args.oracle:
        oracle = weighted_sum_bruteforce(H, p)
        out = {
            "sum": format_rational(value),
            "oracle": format_rational(oracle),
            "equal": value == oracle,
        }
        _emit(out, args.format)
        return EXIT_OK if value == oracle else EXIT_NUMERIC
    if args.format == "json":
        _emit({"sum": format_rational(value)}, "json")
    else:
        print(format_rational(value))
    return EXIT_OK


def cmd_count(args) -> int:
    H = _load_polytope(args.polytope)
    weighted = weighted_sum_polynomial(H, MultiPoly.constant(H.dim, 1))
    unweighted = len(enumerate_lattice_points(H))
    _emit(
        {"weighted": format_rational(weighted), "unweighted": unweighted},
        args.format,
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    H = _load_polytope(args.polytope)
    if args.mode == "poly":
        return _verify_poly(args, H)
    return _verify_smooth(args, H)


def _random_polynomial(rng: random.Random, dim: int, max_degree: int) -> MultiPoly:
    terms = {}
    for _ in range(rng.randint(1, 6)):
        budget = rng.randint(0, max_degree)
        expo = [0] * dim
        for _ in range(budget):
            expo[rng.randrange(dim)] += 1
        coeff = Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        terms[tuple(expo)] = terms.get(tuple(expo), Fraction(0)) + coeff
    return MultiPoly(dim, terms)


def _verify_poly(args, H: HPolytope) -> int:
    rng = random.Random(args.seed[0] if args.seed else 0)
    cases = []
    failures = 0
    for i in range(args.cases):
        p = _random_polynomial(rng, H.dim, args.degree)
        got = weighted_sum_polynomial(H, p, args.k)
        want = weighted_sum_bruteforce(H, p)
        ok = got == want
        failures += not ok
        cases.append({
            "polynomial": repr(p),
            "sum": format_rational(got),
            "oracle": format_rational(want),
            "equal": ok,
        })
    _emit({"mode": "poly", "cases": cases, "failures": failures}, args.format)
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


def _verify_smooth(args, H: HPolytope) -> int:
    from .polytope import bounding_box

    lo, hi = bounding_box(H)
    center = tuple((float(a) + float(b)) / 2 for a, b in zip(lo, hi))
    radius = max(float(b - a) for a, b in zip(lo, hi)) / 2 + 1.0
    f = gaussian_bump(H.dim, center, radius, width=radius / 4)
    seeds = args.seed or [0]
    k = args.k or 2
    reports = verify_main_theorem(H, f, k, seeds=seeds, tol=args.tol / 100)
    out = [r.to_json() for r in reports]
    worst = max(r.defect for r in reports)
    _emit({"mode": "smooth", "reports": out, "worst_defect": worst}, args.format)
    return EXIT_OK if worst < args.tol else EXIT_NUMERIC


def _cyclo_str(value) -> str:
    if value.is_rational():
        return format_rational(value.rational_part())
    return repr(value)


def cmd_tables(args) -> int:
    if args.kind == "bernoulli":
        table = bernoulli_numbers(args.max)
        out = {f"b{k}": format_rational(table[k]) for k in range(1, args.max + 1)}
    elif args.kind == "qvalues":
        if args.order < 2:
            raise ParseError("qvalues needs --order >= 2 (lambda = 1 uses L instead)")
        lam = RationalAngle(Fraction(1, args.order))
        z = lam.to_cyclotomic()
        linear = z / (1 - z) + Fraction(1, 2)
        out = {"linear": _cyclo_str(linear)}
        for m in range(2, args.max + 1):
            out[f"Q_{m}(0)"] = _cyclo_str(twisted_Q(m, lam).at_zero())
    else:  # groups
        H = _load_polytope(args.polytope)
        ctx = _context(H)
        out = {
            "orders": {
                str(sorted(s)): g.order for s, g in sorted(
                    ctx.groups.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))
                )
            },
            "flat_sizes": {
                str(sorted(s)): len(fs.members) for s, fs in sorted(
                    ctx.flats.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))
                )
            },
        }
    _emit(out, args.format)
    return EXIT_OK


def cmd_decompose(args) -> int:
    H = _load_polytope(args.polytope)
    seed = args.seed[0] if args.seed else 0
    xi = choose_polarizing_vector(H, seed)
    cones = []
    for C in polarize(H, xi):
        cones.append({
            "vertex": list(C.vertex.coords),
            "facets": list(C.facet_ids),
            "flips": sum(1 for s in C.flip.values() if s < 0),
            "flipped_facets": sorted(i for i, s in C.flip.items() if s < 0),
            "sign": (-1) ** C.flip_count,
        })
    _emit({"xi": list(xi.xi), "seed": seed, "cones": cones}, args.format)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticesum",
        description="Exact weighted lattice sums over simple integral polytopes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, polytope=True):
        if polytope:
            p.add_argument("--polytope", required=True,
                           help="polytope JSON (inline or file path)")
        p.add_argument("--format", choices=("json", "table"), default="table")

    p = sub.add_parser("validate", help="check polytope invariants")
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("sum", help="exact weighted sum of a polynomial")
    common(p)
    p.add_argument("--poly", required=True, help='polynomial, e.g. "2*x1^2*x2 + 1/3"')
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--oracle", action="store_true",
                   help="also compute the brute-force value and compare")
    p.set_defaults(fn=cmd_sum)

    p = sub.add_parser("count", help="weighted and plain lattice point counts")
    common(p)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("verify", help="verify the summation formula")
    common(p)
    p.add_argument("--mode", choices=("poly", "smooth"), default="poly")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--seed", type=int, nargs="*", default=None)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--cases", type=int, default=20)
    p.add_argument("--degree", type=int, default=3)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("tables", help="exact coefficient tables")
    p.add_argument("kind", choices=("bernoulli", "qvalues", "groups"))
    p.add_argument("--max", type=int, default=8)
    p.add_argument("--order", type=int, default=2,
                   help="order of the root of unity for qvalues")
    p.add_argument("--polytope", help="polytope JSON (groups table only)")
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.set_defaults(fn=cmd_tables)

    p = sub.add_parser("decompose", help="print polarized cones and flip counts")
    common(p)
    p.add_argument("--seed", type=int, nargs="*", default=None)
    p.set_defaults(fn=cmd_decompose)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (QuadratureFailure, NotRational, InternalError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except LatticeSumError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
