"""pg3 command line: info | quadric | check | audit | perturb.

Exit codes: 0 secant family / all checks pass, 10 hypothetical family,
20 violation / audit failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import audit, charax
from .family import FamilyFormatError, LineFamily, dumps_family, perturb, read_family, write_family
from .field import GEOMETRY_MAX_Q, FieldError, field_of_order, make_field
from .quadric import QuadricError, census, format_census, make_quadric, secant_family, standard_hyperbolic
from .space import GeometryError, build_geometry

EXIT_OK = 0
EXIT_HYPOTHETICAL = 10
EXIT_VIOLATION = 20
EXIT_USAGE = 2

VERDICT_EXIT = {
    charax.SECANT_FAMILY: EXIT_OK,
    charax.HYPOTHETICAL_FAMILY: EXIT_HYPOTHETICAL,
    charax.VIOLATION: EXIT_VIOLATION,
}


class UsageError(Exception):
    pass


def _field_from_args(args, required=True):
    try:
        if args.q is not None:
            return field_of_order(args.q, max_q=GEOMETRY_MAX_Q)
        if args.p is not None:
            if args.p == 2:
                raise UsageError("q must be odd")
            return make_field(args.p, args.e, max_q=GEOMETRY_MAX_Q)
    except FieldError as exc:
        raise UsageError(str(exc)) from None
    if required:
        raise UsageError("one of --q or --p is required")
    return None


def _geometry(field):
    try:
        return build_geometry(field)
    except (FieldError, GeometryError) as exc:
        raise UsageError(str(exc)) from None


def _load_family(path, geom=None):
    try:
        return read_family(path, geom)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except FamilyFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_info(args) -> int:
    field = _field_from_args(args)
    t0 = time.perf_counter()
    geom = _geometry(field)
    elapsed = time.perf_counter() - t0
    print(f"q={geom.q} points={geom.n_points} lines={geom.n_lines} planes={geom.n_planes}")
    print(f"build_time={elapsed:.3f}s", file=sys.stderr)
    return EXIT_OK


def cmd_quadric(args) -> int:
    geom = _geometry(_field_from_args(args))
    try:
        if args.gram is not None:
            g = args.gram
            quad = make_quadric(geom, [g[0:4], g[4:8], g[8:12], g[12:16]])
        else:
            quad = standard_hyperbolic(geom)
    except QuadricError as exc:
        raise UsageError(str(exc)) from None
    if args.emit_family:
        write_family(secant_family(quad), args.emit_family)
    if args.emit_census or not args.emit_family:
        print(format_census(census(quad)))
    return EXIT_OK


def cmd_check(args) -> int:
    field = _field_from_args(args, required=False)
    family = _load_family(args.family)
    if field is not None and field != family.geom.field:
        raise UsageError(f"--q {field.q} does not match family file over GF({family.geom.q})")
    report = charax.reconstruct(family, threads=args.threads)
    js = json.dumps(report.to_json(), sort_keys=True)
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(js + "\n")
    sys.stdout.write(js + "\n" if args.json else report.to_text())
    return VERDICT_EXIT[report.verdict]


def cmd_audit(args) -> int:
    field = _field_from_args(args)
    geom = _geometry(field)
    families = None
    if args.family:
        families = [_load_family(path, geom) for path in args.family]
    checks = audit.run_audit(geom, families, seeds=args.seeds, threads=args.threads)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([c.to_json() for c in checks], fh, sort_keys=True, indent=1)
            fh.write("\n")
    sys.stdout.write(audit.format_checks(checks))
    if args.replay:
        fams = families if families is not None else audit.default_families(geom, args.seeds)
        for c in checks:
            if c.status == "fail" and c.counterexample.get("family") is not None:
                sys.stdout.write("\n" + audit.replay(c, fams[c.counterexample["family"]]))
    return EXIT_OK if audit.all_passed(checks) else EXIT_VIOLATION


def cmd_perturb(args) -> int:
    family = _load_family(args.family)
    try:
        out = perturb(family, args.swaps, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out:
        write_family(out, args.out)
    else:
        sys.stdout.write(dumps_family(out))
    return EXIT_OK


def _add_field_args(p: argparse.ArgumentParser, required_note: str = ""):
    p.add_argument("--q", type=int, help="field order (odd prime power <= 13)")
    p.add_argument("--p", type=int, help="characteristic, with --e")
    p.add_argument("--e", type=int, default=1, help="exponent (default 1)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pg3", description="Secant-line families of hyperbolic quadrics in PG(3,q)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="point/line/plane counts")
    _add_field_args(p)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("quadric", help="emit the secant family or census of a hyperbolic quadric")
    _add_field_args(p)
    p.add_argument("--gram", type=int, nargs=16, metavar="G", help="16 field elements, row-major")
    p.add_argument("--emit-family", metavar="PATH")
    p.add_argument("--emit-census", action="store_true")
    p.set_defaults(func=cmd_quadric)

    p = sub.add_parser("check", help="recognize a line family")
    _add_field_args(p)
    p.add_argument("--family", required=True, metavar="PATH")
    p.add_argument("--report", metavar="PATH", help="write the JSON report here")
    p.add_argument("--json", action="store_true", help="print the JSON report")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("audit", help="run the lemma audit")
    _add_field_args(p)
    p.add_argument("--seeds", type=int, default=10, help="transformed quadrics besides the standard one")
    p.add_argument("--family", action="append", metavar="PATH", help="audit these families instead")
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--replay", action="store_true", help="print a trace for each failed check")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("perturb", help="swap members for non-members")
    p.add_argument("--family", required=True, metavar="PATH")
    p.add_argument("--swaps", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_perturb)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"pg3: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
