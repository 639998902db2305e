"""Map files, deterministic report serialization, and input hashing."""
from __future__ import annotations

import csv
import hashlib
import io
import json
from fractions import Fraction
from pathlib import Path

from .errors import ParseError
from .maps import HomogeneousPair
from .valued import (
    QQ,
    Fp,
    LaurentField,
    PadicField,
    PadicScalar,
    PrimeResidueField,
    PuiseuxScalar,
    ScalarParseError,
    format_rational,
)


class MapFileError(ParseError):
    pass


def field_from_json(spec: dict):
    kind = spec.get("kind", "laurent")
    residue = spec.get("residue", "Q")
    ram = spec.get("ramification", 1)
    if not isinstance(ram, int) or ram < 1:
        raise MapFileError(f"ramification must be a positive integer, got {ram!r}")
    if kind == "padic":
        if residue != "Fp" or "p" not in spec:
            raise MapFileError("a p-adic field needs residue 'Fp' and a prime 'p'")
        if ram != 1:
            raise MapFileError("the p-adic backend is unramified")
        try:
            return PadicField(int(spec["p"]))
        except ValueError as exc:
            raise MapFileError(str(exc)) from None
    if kind != "laurent":
        raise MapFileError(f"unknown field kind {kind!r}")
    if residue == "Q":
        return LaurentField(QQ, ram)
    if residue == "Fp":
        if "p" not in spec:
            raise MapFileError("residue 'Fp' needs 'p'")
        try:
            return LaurentField(PrimeResidueField(int(spec["p"])), ram)
        except ValueError as exc:
            raise MapFileError(str(exc)) from None
    raise MapFileError(f"unknown residue field {residue!r}")


def map_from_json(data: dict):
    """``(field, pair)`` from a decoded map file."""
    for key in ("field", "degree", "numerator", "denominator"):
        if key not in data:
            raise MapFileError(f"map file lacks {key!r}")
    field = field_from_json(data["field"])
    d = data["degree"]
    num, den = data["numerator"], data["denominator"]
    if not isinstance(d, int) or d < 1:
        raise MapFileError(f"degree must be a positive integer, got {d!r}")
    for name, coeffs in (("numerator", num), ("denominator", den)):
        if not isinstance(coeffs, list) or len(coeffs) != d + 1:
            raise MapFileError(f"{name} needs {d + 1} coefficients")
    scalars = []
    for name, coeffs in (("numerator", num), ("denominator", den)):
        row = []
        for i, text in enumerate(coeffs):
            try:
                row.append(field.parse(str(text)))
            except ScalarParseError as exc:
                err = MapFileError(f"{name}[{i}]: {exc}")
                err.position = exc.position
                raise err from None
        scalars.append(tuple(row))
    try:
        pair = HomogeneousPair(*scalars)
    except ValueError as exc:
        raise MapFileError(str(exc)) from None
    return field, pair


def map_to_json(pair: HomogeneousPair) -> dict:
    field = pair.field
    return {
        "field": field.to_json(),
        "degree": pair.degree,
        "numerator": [field.format(c) for c in pair.num],
        "denominator": [field.format(c) for c in pair.den],
    }


def read_bytes(path) -> bytes:
    return Path(path).read_bytes()


def load_map(path):
    """``(field, pair, sha256 of the file)``."""
    raw = read_bytes(path)
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MapFileError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise MapFileError(f"{path}: expected a JSON object")
    field, pair = map_from_json(data)
    return field, pair, input_hash(raw)


def input_hash(raw) -> str:
    if isinstance(raw, str):
        raw = raw.encode()
    return hashlib.sha256(raw).hexdigest()


def to_plain(x):
    """Recursively replace exact numbers and ring elements by strings; floats are refused."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, float):
        raise TypeError("floats never appear in reports")
    if isinstance(x, (PuiseuxScalar, PadicScalar)):
        return x.field.format(x)
    if isinstance(x, Fp):
        return str(x.v)
    if isinstance(x, dict):
        return {str(k): to_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_plain(v) for v in x]
    if hasattr(x, "to_json"):
        return to_plain(x.to_json())
    return str(x)


def dumps(report) -> str:
    return json.dumps(to_plain(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def rows_to_csv(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([to_plain(v) for v in r])
    return buf.getvalue()
