"""JSON encoding of specs and reports with exact rationals ("p/q" strings)."""

from __future__ import annotations

import dataclasses
import json
import re
from fractions import Fraction
from pathlib import Path

import jsonschema

from .exact import PrimeSet, QMatrix
from .groups import AbelianSpec, BSElement, BSSpec, SpecError, SplitElement, SplitSpec, UnipotentSpec

SCHEMA_VERSION = "1"
SAFE_INT = 2 ** 53

_RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
    ]
}
_VECTOR = {"type": "array", "items": {"$ref": "#/$defs/rational"}, "minItems": 1}
_MATRIX = {"type": "array", "items": {"$ref": "#/$defs/vector"}, "minItems": 1}
_PRIMES = {"type": "array", "items": {"type": "integer", "minimum": 2}, "uniqueItems": True}
_COMMON = {"name": {"type": "string"}, "description": {"type": "string"}, "kind": {}}

SPEC_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "farhull-group-spec-v1",
    "title": "Group spec",
    "$defs": {
        "rational": _RATIONAL,
        "vector": _VECTOR,
        "matrix": _MATRIX,
        "primes": _PRIMES,
        "module": {
            "type": "object",
            "required": ["generators"],
            "properties": {"generators": {"type": "array", "items": {"$ref": "#/$defs/vector"}, "minItems": 1},
                           "primes": {"$ref": "#/$defs/primes"}},
            "additionalProperties": False,
        },
    },
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": ["abelian", "unipotent", "split", "bs"]}},
    "oneOf": [
        {
            "properties": {**_COMMON, "kind": {"const": "abelian"},
                           "generators": {"type": "array", "items": {"$ref": "#/$defs/vector"}, "minItems": 1},
                           "primes": {"$ref": "#/$defs/primes"}},
            "required": ["kind", "generators"],
            "additionalProperties": False,
        },
        {
            "properties": {**_COMMON, "kind": {"const": "unipotent"},
                           "generators": {"type": "array", "items": {"$ref": "#/$defs/matrix"}, "minItems": 1}},
            "required": ["kind", "generators"],
            "additionalProperties": False,
        },
        {
            "properties": {**_COMMON, "kind": {"const": "split"}, "module": {"$ref": "#/$defs/module"},
                           "actors": {"type": "array", "items": {"$ref": "#/$defs/matrix"}, "minItems": 1}},
            "required": ["kind", "module", "actors"],
            "additionalProperties": False,
        },
        {
            "properties": {**_COMMON, "kind": {"const": "bs"}, "n": {"type": "integer"},
                           "unit": {"$ref": "#/$defs/rational"}},
            "required": ["kind", "n"],
            "additionalProperties": False,
        },
    ],
}


class SpecValidationError(SpecError):
    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{message} (at {path})" if path else message)


# ---------------------------------------------------------------------------
# encoding


def encode_rational(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def decode_rational(x) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise SpecValidationError(f"rational must be an integer or a 'p/q' string, got {x!r}")
    if isinstance(x, str) and not re.fullmatch(r"-?\d+(/\d+)?", x):
        raise SpecValidationError(f"bad rational string {x!r}")
    return Fraction(x)


def to_jsonable(obj):
    """Exact JSON-compatible structure: Fractions -> strings, large ints -> strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj if abs(obj) <= SAFE_INT else str(obj)
    if isinstance(obj, Fraction):
        return encode_rational(obj)
    if isinstance(obj, float):
        raise TypeError("floats are not exact; refusing to serialize")
    if isinstance(obj, QMatrix):
        return [[encode_rational(x) for x in row] for row in obj.tolist()]
    if isinstance(obj, PrimeSet):
        return list(obj.primes)
    if isinstance(obj, BSElement):
        return {"scale": encode_rational(obj.scale), "translation": encode_rational(obj.translation)}
    if isinstance(obj, SplitElement):
        return {"v": [encode_rational(x) for x in obj.v], "e": list(obj.e)}
    if isinstance(obj, (AbelianSpec, UnipotentSpec, SplitSpec, BSSpec)):
        return spec_to_dict(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, range)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)


def report(command: str, result) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "result": to_jsonable(result)}


# ---------------------------------------------------------------------------
# specs


def _vec(v):
    return tuple(decode_rational(x) for x in v)


def _mat(m):
    return QMatrix([list(_vec(r)) for r in m])


def validate_spec_dict(data: dict) -> None:
    if not isinstance(data, dict) or data.get("kind") not in ("abelian", "unipotent", "split", "bs"):
        got = data.get("kind") if isinstance(data, dict) else data
        raise SpecValidationError(f"'kind' must be one of abelian, unipotent, split, bs (got {got!r})", "/kind")
    validator = jsonschema.Draft202012Validator(SPEC_SCHEMA)
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        # for oneOf failures report the branch matching the declared kind
        err = errors[0]
        if err.validator == "oneOf" and err.context:
            kind = data.get("kind") if isinstance(data, dict) else None
            branch = {"abelian": 0, "unipotent": 1, "split": 2, "bs": 3}.get(kind)
            ctx = [c for c in err.context if branch is None or c.relative_schema_path[0] == branch]
            if ctx:
                err = min(ctx, key=lambda c: len(c.absolute_path))
        path = "/" + "/".join(str(p) for p in err.absolute_path)
        raise SpecValidationError(err.message, path)


def _primes(ps, path) -> PrimeSet:
    try:
        return PrimeSet(tuple(sorted(ps)))
    except ValueError as exc:
        raise SpecValidationError(str(exc), path) from None


def spec_from_dict(data: dict):
    validate_spec_dict(data)
    kind = data["kind"]
    if kind == "abelian":
        return AbelianSpec(tuple(_vec(g) for g in data["generators"]), _primes(data.get("primes", ()), "/primes"))
    if kind == "unipotent":
        return UnipotentSpec(tuple(_mat(g) for g in data["generators"]))
    if kind == "split":
        mod = data["module"]
        module = AbelianSpec(tuple(_vec(g) for g in mod["generators"]), _primes(mod.get("primes", ()), "/module/primes"))
        return SplitSpec(module, tuple(_mat(a) for a in data["actors"]))
    return BSSpec(data["n"], decode_rational(data.get("unit", 1)))


def spec_to_dict(spec) -> dict:
    def vec(v):
        return [encode_rational(x) for x in v]

    def mat(m):
        return [vec(r) for r in m.tolist()]

    if isinstance(spec, AbelianSpec):
        return {"kind": "abelian", "generators": [vec(g) for g in spec.generators], "primes": list(spec.primes.primes)}
    if isinstance(spec, UnipotentSpec):
        return {"kind": "unipotent", "generators": [mat(g) for g in spec.generators]}
    if isinstance(spec, SplitSpec):
        return {"kind": "split",
                "module": {"generators": [vec(g) for g in spec.module.generators],
                           "primes": list(spec.module.primes.primes)},
                "actors": [mat(a) for a in spec.actors]}
    out = {"kind": "bs", "n": spec.n}
    if spec.unit != 1:
        out["unit"] = encode_rational(spec.unit)
    return out


def load_spec(path) -> object:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"invalid JSON: {exc.msg}", f"line {exc.lineno}") from None
    return spec_from_dict(data)
