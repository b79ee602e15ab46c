"""JSON schemas for every document the command line reads or writes."""

import jsonschema

from cupform.errors import SchemaError

SCHEMA_TAG = "cupform/1"

RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$"},
    ]
}

FORM = {
    "type": "object",
    "required": ["vars", "degree", "terms"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "vars": {"type": "integer", "minimum": 1},
        "degree": {"type": "integer", "minimum": 0},
        "terms": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["exps", "coef"],
                "properties": {
                    "exps": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "coef": RATIONAL,
                },
            },
        },
    },
}

POINT = {
    "oneOf": [
        {"type": "array", "items": RATIONAL, "minItems": 1},
        {
            "type": "object",
            "required": ["coords"],
            "properties": {"coords": {"type": "array", "items": RATIONAL, "minItems": 1}},
        },
    ]
}

PHI = {
    "type": "object",
    "required": ["n", "basis", "values"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "n": {"type": "integer", "minimum": 1},
        "basis": {"type": "integer", "minimum": 1},
        "values": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["mono", "value"],
                "properties": {
                    "mono": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "value": RATIONAL,
                },
            },
        },
    },
}

TENSOR = {
    "type": "object",
    "required": ["shape", "entries"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "shape": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "entries": {"type": "array", "items": RATIONAL},
    },
}

BLOWUP = {
    "type": "object",
    "required": ["k", "a"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "k": {"type": "integer", "minimum": 0},
        "a": RATIONAL,
        "R": {"type": "array", "items": FORM},
    },
}

_OUT_RATIONAL = {"type": "string", "pattern": r"^-?\d+(/\d+)?$"}

_WF_POINT = {
    "type": "object",
    "required": ["point", "f_value", "c", "ell"],
    "properties": {
        "point": {"type": "object", "required": ["coords"]},
        "f_value": _OUT_RATIONAL,
        "c": _OUT_RATIONAL,
        "ell": {"type": "array", "items": _OUT_RATIONAL},
    },
}

# key fields per command; reports may carry more
_RESULTS = {
    "hessian": {"required": ["mode", "hessian"]},
    "honest": {"required": ["honest"], "properties": {"honest": {"type": "boolean"}}},
    "nondegenerate": {
        "required": ["status", "heuristic"],
        "properties": {"status": {"enum": ["yes", "no", "inconclusive"]}},
    },
    "rank-at": {"required": ["rank"]},
    "wf-member": {"required": ["member"]},
    "wf-search": {
        "required": ["certified_points", "complete", "heuristic", "numeric_candidates"],
        "properties": {"certified_points": {"type": "array", "items": _WF_POINT}},
    },
    "normal-form": {"required": ["case", "change_matrix", "leading_scalar", "residual_form"]},
    "peel": {"required": ["points"], "properties": {"points": {"type": "array", "items": _WF_POINT}}},
    "build-form": {"required": ["form"]},
    "intersection-of": {"required": ["phi"]},
    "blowup": {"required": ["form"]},
    "blowup-point": {"required": ["form", "a", "a_default"]},
    "exceptional-rank": {"required": ["k", "rank_lower", "certificate", "heuristic"]},
    "candidates": {
        "required": ["cap", "complete", "candidates", "heuristic"],
        "properties": {"candidates": {"type": "array", "items": _WF_POINT}},
    },
    "tensor-rank": {"required": ["lower", "upper", "heuristic"]},
    "hyperdet": {"required": ["value"]},
    "paper-examples": {"required": ["examples"]},
}


def report_schema(command):
    result = {"type": "object"}
    result.update(_RESULTS.get(command, {}))
    return {
        "type": "object",
        "required": ["schema", "command", "result"],
        "properties": {
            "schema": {"const": SCHEMA_TAG},
            "command": {"const": command},
            "result": result,
        },
    }


ERROR = {
    "type": "object",
    "required": ["schema", "error"],
    "properties": {
        "schema": {"const": SCHEMA_TAG},
        "error": {
            "type": "object",
            "required": ["code", "message"],
            "properties": {"code": {"type": "string"}, "message": {"type": "string"}},
        },
    },
}


def validate(doc, schema, what="input"):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"{what}: {exc.message} at {path}") from None
