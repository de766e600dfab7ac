"""JSON Schemas (draft 2020-12) for everything the CLI writes.

Plain dictionaries, so they can be dumped for documentation or checked with
any validator.  Non-finite floats are written as the strings ``"inf"``,
``"-inf"`` or ``"nan"``.
"""
from __future__ import annotations

NUMBER = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf", "nan"]}]}
INT = {"type": "integer"}
BOOL = {"type": "boolean"}
COMPLEX = {"type": "object", "required": ["re", "im"], "additionalProperties": False,
           "properties": {"re": NUMBER, "im": NUMBER}}
EXACT = {"oneOf": [{"type": "number"}, {"type": "string"}]}


def _row(props: dict) -> dict:
    return {"type": "object", "required": list(props), "additionalProperties": False,
            "properties": props}


ROWS = {
    "check": _row({"generation": INT, "b": INT, "alpha": NUMBER, "beta": NUMBER,
                   "gamma_re": NUMBER, "gamma_im": NUMBER, "separating": BOOL,
                   "condition_c_ok": BOOL, "condition_d_ok": BOOL}),
    "reduce": _row({"generation": INT, "a": NUMBER, "q": NUMBER, "c_re": NUMBER, "c_im": NUMBER}),
    "reconstruct": _row({"index": INT, "alpha": NUMBER, "beta": NUMBER, "gamma_re": NUMBER,
                         "gamma_im": NUMBER, "b": INT}),
    "transfer": _row({"row": INT, "col": INT, "re": NUMBER, "im": NUMBER}),
    "bands": _row({"band": INT, "lower": NUMBER, "upper": NUMBER}),
    "weyl": _row({"energy_re": NUMBER, "energy_im": NUMBER, "basepoint": NUMBER,
                  "m_plus_re": NUMBER, "m_plus_im": NUMBER,
                  "m_minus_re": NUMBER, "m_minus_im": NUMBER}),
    "reflectionless": _row({"energy": NUMBER, "eta": {"oneOf": [NUMBER, {"type": "null"}]},
                            "defect": NUMBER}),
    "eigs-halfline": _row({"index": INT, "energy": NUMBER}),
    "eigs-tree": _row({"index": INT, "energy": NUMBER, "multiplicity": INT}),
    "compare": _row({"index": INT, "tree": NUMBER, "direct_sum": NUMBER, "mismatch": NUMBER}),
    "examples": _row({"name": {"type": "string"}, "status": {"enum": ["PASS", "FAIL"]},
                      "detail": {"type": "string"}}),
}


def envelope(command: str) -> dict:
    """Schema of the ``{"command", "status", "rows", "summary"}`` document."""
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["command", "status", "rows", "summary"],
        "additionalProperties": False,
        "properties": {
            "command": {"const": command},
            "status": {"const": "ok"},
            "rows": {"type": "array", "items": ROWS[command]},
            "summary": {"type": "object"},
        },
    }


VERTEX_COUPLING = {
    "type": "object",
    "required": ["b"],
    "additionalProperties": False,
    "properties": {
        "alpha": EXACT, "beta": EXACT,
        "gamma": {"oneOf": [EXACT, {"type": "object", "additionalProperties": False,
                                    "properties": {"re": EXACT, "im": EXACT}}]},
        "b": {"type": "integer", "minimum": 1},
        "eigenphases": {"type": "array", "items": EXACT},
    },
}

TREE_SPEC = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["gaps", "generations"],
    "additionalProperties": False,
    "properties": {
        "gaps": {"type": "array", "minItems": 1, "items": EXACT},
        "generations": {"type": "array", "items": VERTEX_COUPLING},
        "root_angle": EXACT,
        "period": {"type": "array", "items": INT, "minItems": 2, "maxItems": 2},
    },
}

ERROR = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["error", "message", "generation", "exit_code"],
    "additionalProperties": False,
    "properties": {
        "error": {"type": "string"},
        "message": {"type": "string"},
        "generation": {"oneOf": [INT, {"type": "null"}]},
        "exit_code": {"enum": [1, 2]},
    },
}
