"""``berkres`` command line: exact reports on maps and Lattès families."""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .berkovich import (
    SegmentSpec,
    TypeIIPoint,
    crucial_weights,
    endpoint_masses,
    min_res_loc_on_segment,
    ord_res_at,
    segment_weights,
)
from .errors import BerkresError, ParseError
from .io import dumps, input_hash, load_map, rows_to_csv, to_plain
from .lattes import LattesSpec, default_precision, lattes_report
from .maps import (
    iteration_exponent,
    normalize,
    normalized_ord_res,
    reduce,
    resultant_ord,
)
from .measures import condition_C_check
from .theorem import MAX_DETERMINANT_DEGREE, iteration_formula_check, main_theorem_check, resultant_power_identity_check
from .valued import parse_rational

DEFAULT_DENOMINATOR = 12


class UsageError(ParseError):
    pass


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for degenerate maps
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _keyed(tokens: list, keys: tuple, what: str) -> dict:
    """``key=value`` tokens, with bare tokens filling the positional ``keys`` in order."""
    out: dict = {}
    bare = [k for k in keys]
    for tok in tokens:
        if "=" in tok:
            k, v = tok.split("=", 1)
            if k not in keys:
                raise UsageError(f"{what}: unknown key {k!r}")
            out[k] = v
        else:
            free = [k for k in bare if k not in out]
            if not free:
                raise UsageError(f"{what}: too many values")
            out[free[0]] = tok
    return out


def _rational(text: str, what: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what}: not a rational number: {text!r}") from None


def _segment(args, field) -> SegmentSpec:
    vals = _keyed(args.segment or [], ("lo", "hi", "a"), "--segment")
    center = field.parse(vals.get("a", "0"))
    lo = _rational(vals.get("lo", "0"), "--segment lo")
    hi = _rational(vals.get("hi", "1"), "--segment hi")
    try:
        return SegmentSpec(center, lo, hi, args.denominator)
    except ValueError as exc:
        raise UsageError(f"--segment: {exc}") from None


def _point(args, field) -> TypeIIPoint:
    vals = _keyed(args.at or [], ("a", "rho"), "--at")
    return TypeIIPoint(field.parse(vals.get("a", "0")), _rational(vals.get("rho", "0"), "--at rho"))


def _seg_json(seg: SegmentSpec) -> dict:
    return {"center": str(seg.center), "lo": seg.lo, "hi": seg.hi, "denominator": seg.denominator}


def _point_json(zeta: TypeIIPoint) -> dict:
    return {"center": str(zeta.center), "rho": zeta.rho}


def cmd_analyze(args):
    _, phi, digest = load_map(args.map)
    pair, shift = normalize(phi)
    report = reduce(pair)
    out = {
        "degree": phi.degree,
        "R": normalized_ord_res(pair),
        "resultant_ord": resultant_ord(phi),
        "normalizing_shift": shift,
        "good_reduction": report.good_reduction,
        "semistable": report.semistable,
        "in_indeterminacy": report.in_indeterminacy,
        "reduction": report.to_json(),
    }
    return digest, {}, out, None


def cmd_iterate_check(args):
    _, phi, digest = load_map(args.map)
    pair, _ = normalize(phi)
    d = pair.degree
    records = []
    for n in range(1, args.max_n + 1):
        rec = iteration_formula_check(pair, n).to_json()
        if n >= 2 and d**n <= MAX_DETERMINANT_DEGREE:
            rec["power_identity"] = resultant_power_identity_check(pair, n)
        records.append(rec)
    out = {
        "degree": d,
        "in_indeterminacy": reduce(pair).in_indeterminacy,
        "records": records,
        "all_match": all(r["match"] for r in records),
    }
    rows = [(r["n"], r["N"], r["Rn"], r["predicted"], r["match"]) for r in records]
    return digest, {"max_n": args.max_n}, out, (["n", "N", "R_n", "predicted", "match"], rows)


def cmd_ordres(args):
    field, phi, digest = load_map(args.map)
    if args.at:
        zeta = _point(args, field)
        value = ord_res_at(phi, zeta)
        out = {"point": _point_json(zeta), "value": value}
        return digest, {}, out, (["rho", "value"], [(zeta.rho, value)])
    seg = _segment(args, field)
    res = resultant_ord(phi)
    samples = [(r, ord_res_at(phi, seg.point(r), res_ord=res)) for r in seg.grid()]
    out = {"segment": _seg_json(seg), "samples": [{"rho": r, "value": v} for r, v in samples]}
    return digest, {"denominator": seg.denominator}, out, (["rho", "value"], samples)


def cmd_minresloc(args):
    field, phi, digest = load_map(args.map)
    seg = _segment(args, field)
    profile = min_res_loc_on_segment(phi, seg)
    out = profile.to_json()
    out["notes"] = list(profile.notes)
    return digest, {"denominator": seg.denominator}, out, (["rho", "value"], profile.samples)


def cmd_weights(args):
    field, phi, digest = load_map(args.map)
    seg = _segment(args, field)
    profile = min_res_loc_on_segment(phi, seg)
    d = phi.degree
    interior = crucial_weights(profile, d)
    out = {
        "segment": _seg_json(seg),
        "interior": [{"rho": r, "mass": w} for r, w in interior],
        "endpoints": endpoint_masses(profile, d),
        "weights": [{"rho": r, "mass": w} for r, w in segment_weights(profile, d)],
        "convention": "endpoints treated as leaves of the support tree",
    }
    rows = segment_weights(profile, d)
    return digest, {"denominator": seg.denominator}, out, (["rho", "mass"], rows)


def cmd_measure(args):
    field, phi, digest = load_map(args.map)
    zeta = _point(args, field)
    res = condition_C_check(phi, zeta, args.nmax)
    out = res.to_json()
    rows = []
    if res.measure is not None:
        rows = [(m.label(), m.mass_lower, m.mass_upper, m.conjugates) for m in res.measure.masses]
    return digest, {"nmax": args.nmax}, out, (["direction", "lower", "upper", "conjugates"], rows)


def cmd_theorem_check(args):
    field, phi, digest = load_map(args.map)
    seg = _segment(args, field)
    report = main_theorem_check(phi, args.max_n, seg, map_id=Path(args.map).name,
                                measure_depth=args.nmax, scan_iterates=args.scan_iterates)
    out = report.to_json()
    d = phi.degree
    out["exponents"] = {str(n): iteration_exponent(d, n) for n in range(1, args.max_n + 1)}
    rows = [(r.n, r.N, r.Rn, r.predicted, r.match, r.semistable) for r in report.records]
    params = {"max_n": args.max_n, "nmax": args.nmax, "denominator": seg.denominator}
    return digest, params, out, (["n", "N", "R_n", "predicted", "match", "semistable"], rows)


def cmd_lattes(args):
    P = args.precision if args.precision is not None else default_precision(args.m)
    D = args.denominator
    spec = LattesSpec(args.m, P)
    rep = lattes_report(spec, D, iterate_n=args.iterate, verify_stability=args.verify,
                        scan_iterates=args.scan_iterates)
    params = {"m": args.m, "precision": P, "denominator": D, "verify": args.verify, "iterate": args.iterate}
    digest = input_hash(dumps(params))
    rows = [(k, e["computed"], e["predicted"], e["match"]) for k, e in sorted(rep.entries.items())]
    return digest, params, rep.to_json(), (["quantity", "computed", "predicted", "match"], rows)


def _add_segment(p, default_D=DEFAULT_DENOMINATOR):
    p.add_argument("--segment", nargs="+", metavar="SPEC",
                   help="a=<scalar> lo=<rat> hi=<rat>, or bare 'lo hi' (default 0 1 about a=0)")
    p.add_argument("--denominator", type=int, default=default_D, help="grid spacing 1/D")


def _add_at(p):
    p.add_argument("--at", nargs="+", metavar="SPEC", help="a=<scalar> rho=<rat> (default: the Gauss point)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="berkres", description=__doc__)
    parser.add_argument("--version", action="version", version=f"berkres {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for stdout)")
    common.add_argument("--csv", metavar="PATH", help="write a CSV table to PATH ('-' for stdout)")
    common.add_argument("--quiet", action="store_true", help="no human-readable summary")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="resultant and reduction at the Gauss point")
    p.add_argument("map")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("iterate-check", parents=[common], help="R of iterates against N R")
    p.add_argument("map")
    p.add_argument("--max-n", type=int, default=3)
    p.set_defaults(func=cmd_iterate_check)

    p = sub.add_parser("ordres", parents=[common], help="ordRes at a point or along a segment")
    p.add_argument("map")
    _add_segment(p)
    _add_at(p)
    p.set_defaults(func=cmd_ordres)

    p = sub.add_parser("minresloc", parents=[common], help="minimize ordRes over a segment grid")
    p.add_argument("map")
    _add_segment(p)
    p.set_defaults(func=cmd_minresloc)

    p = sub.add_parser("weights", parents=[common], help="point masses from slope breaks")
    p.add_argument("map")
    _add_segment(p)
    p.set_defaults(func=cmd_weights)

    p = sub.add_parser("measure", parents=[common], help="residue measure and barycenter test")
    p.add_argument("map")
    _add_at(p)
    p.add_argument("--nmax", type=int, default=6, help="preimage levels summed")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("theorem-check", parents=[common], help="iteration formula at MinResLoc")
    p.add_argument("map")
    p.add_argument("--max-n", type=int, default=3)
    p.add_argument("--nmax", type=int, default=6, help="preimage levels for the measure test")
    p.add_argument("--scan-iterates", action="store_true", help="also minimize R of each iterate on the grid")
    _add_segment(p)
    p.set_defaults(func=cmd_theorem_check)

    p = sub.add_parser("lattes", parents=[common], help="Lattès maps from the Tate curve")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--precision", type=int, default=None, help="q-adic precision P")
    p.add_argument("--denominator", type=int, default=24)
    p.add_argument("--verify", action="store_true", help="repeat at precision 2P and compare")
    p.add_argument("--iterate", type=int, default=0, help="run the iteration check up to this n")
    p.add_argument("--scan-iterates", action="store_true")
    p.set_defaults(func=cmd_lattes)
    return parser


def _human(command: str, body: dict) -> str:
    lines = [f"berkres {command}"]
    for k in sorted(body):
        v = to_plain(body[k])
        if isinstance(v, (dict, list)):
            continue
        lines.append(f"  {k}: {v}")
    for k in ("verdict", "witnesses", "argmin", "weights"):
        v = body.get(k)
        if isinstance(v, list):
            lines.append(f"  {k}: {', '.join(str(x) if not isinstance(x, dict) else _flat(x) for x in to_plain(v))}")
    return "\n".join(lines) + "\n"


def _flat(d: dict) -> str:
    return "(" + ", ".join(f"{k}={v}" for k, v in sorted(d.items())) + ")"


def _write(path: str, text: str, stdout) -> None:
    if path == "-":
        stdout.write(text)
    else:
        Path(path).write_text(text)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        digest, params, body, table = args.func(args)
    except BerkresError as exc:
        stderr.write(f"berkres: error: {exc}\n")
        return exc.exit_code
    except OSError as exc:
        stderr.write(f"berkres: error: {exc}\n")
        return 1
    report = {"command": args.command, "version": __version__, "input_sha256": digest,
              "parameters": params}
    report.update(body)
    if args.json:
        _write(args.json, dumps(report), stdout)
    if args.csv and table is not None:
        header, rows = table
        _write(args.csv, rows_to_csv(header, rows), stdout)
    if not args.quiet and args.json != "-" and args.csv != "-":
        stdout.write(_human(args.command, body))
    return 0


if __name__ == "__main__":
    sys.exit(main())
