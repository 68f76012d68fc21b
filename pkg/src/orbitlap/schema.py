"""JSON schemas of the reports printed by the command-line tool."""

__all__ = ["ESTIMATE_SCHEMA", "CLASSIFY_SCHEMA", "INCONCLUSIVE_SCHEMA", "LOGLIK_SCHEMA", "SCHEMAS"]

_NUM = {"type": "number"}
_NUM_OR_NULL = {"type": ["number", "null"]}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _NUM}}
_MODEL = {"enum": ["full", "finite", "leftright"]}
_CLASS = {"enum": ["unstable", "semistable_not_polystable", "polystable", "stable"]}

ESTIMATE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": [
        "command", "model", "stability", "lie_dim", "mle_unique", "has_mle", "alpha", "c",
        "objective", "objective_unbounded", "concentration", "concentrations", "factors",
        "iterations", "residual", "converged", "status", "stabilizer_scope",
    ],
    "properties": {
        "command": {"const": "estimate"},
        "model": _MODEL,
        "stability": _CLASS,
        "lie_dim": {"type": ["integer", "null"], "minimum": 0},
        "mle_unique": {"enum": ["unique", "finite-family", "infinite-family", "none"]},
        "has_mle": {"type": "boolean"},
        "alpha": _NUM_OR_NULL,
        "c": _NUM_OR_NULL,
        "objective": _NUM_OR_NULL,
        "objective_unbounded": {"type": "boolean"},
        "concentration": {"oneOf": [_MATRIX, {"type": "null"}]},
        "concentrations": {"type": "array", "items": _MATRIX},
        "factors": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["psi1", "psi2"],
                    "properties": {"psi1": _MATRIX, "psi2": _MATRIX},
                },
            ]
        },
        "iterations": {"type": "integer", "minimum": 0},
        "residual": _NUM_OR_NULL,
        "converged": {"type": "boolean"},
        "status": {"enum": ["converged", "singular", "vanishing", "stagnant", "max_iter"]},
        "stabilizer_scope": {"type": "string"},
    },
}

CLASSIFY_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["command", "model", "stability", "lie_dim", "stabilizer_basis", "diagnostics", "stabilizer_scope"],
    "properties": {
        "command": {"const": "classify"},
        "model": _MODEL,
        "stability": _CLASS,
        "lie_dim": {"type": ["integer", "null"], "minimum": 0},
        "stabilizer_basis": {"type": "array", "items": {"type": "array", "items": _MATRIX}},
        "diagnostics": {"type": "object"},
        "stabilizer_scope": {"type": "string"},
    },
}

INCONCLUSIVE_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["command", "model", "stability", "error", "diagnostics"],
    "properties": {
        "command": {"enum": ["estimate", "classify"]},
        "model": _MODEL,
        "stability": {"const": "inconclusive"},
        "error": {"type": "string"},
        "diagnostics": {"type": "object"},
    },
}

LOGLIK_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["command", "kind", "n", "nu", "observed", "observed_offset", "complete"],
    "properties": {
        "command": {"const": "loglik"},
        "kind": {"enum": ["vector", "matrix"]},
        "n": {"type": "integer", "minimum": 1},
        "nu": _NUM,
        "observed": _NUM,
        "observed_offset": _NUM,
        "complete": _NUM,
    },
}

SCHEMAS = {
    "estimate": ESTIMATE_SCHEMA,
    "classify": CLASSIFY_SCHEMA,
    "inconclusive": INCONCLUSIVE_SCHEMA,
    "loglik": LOGLIK_SCHEMA,
}
