"""JSON schema for problem files."""

_EXPR = {"type": "string", "minLength": 1}
_NAME = {"type": "string", "pattern": "^[A-Za-z][A-Za-z0-9_]*$"}
_COMPONENTS = {"type": "object", "additionalProperties": {"type": ["string", "number"]}}
_NAMES = {"type": "array", "items": _NAME}

_CHART = {
    "type": "object",
    "required": ["base", "fibers"],
    "additionalProperties": False,
    "properties": {
        "base": {"type": "array", "items": {"type": "string", "pattern": "^[A-Za-z]$"}, "minItems": 1},
        "fibers": {"type": "object", "additionalProperties": _NAME, "minProperties": 1},
        "order": {"type": "integer", "minimum": 0, "maximum": 4},
        "extras": _NAMES,
        "max_order": {"type": "integer", "minimum": 1, "maximum": 6},
    },
}

_CONSTANTS = {
    "type": "object",
    "required": ["names", "entries"],
    "additionalProperties": False,
    "properties": {
        "names": {"type": "array", "items": _NAME, "minItems": 1},
        "entries": {
            "type": "array",
            "items": {"type": "array", "prefixItems": [_NAME, _NAME, _NAME, {"type": ["string", "number"]}],
                      "minItems": 4, "maxItems": 4},
        },
    },
}

_FORM = {
    "oneOf": [
        _COMPONENTS,
        {"type": "object", "required": ["combine"], "additionalProperties": False,
         "properties": {"combine": _COMPONENTS}},
    ]
}

_SYSTEM = {
    "type": "object",
    "required": ["chart", "constants", "forms"],
    "additionalProperties": False,
    "properties": {
        "chart": _NAME,
        "constants": _NAME,
        "of": _NAME,
        "forms": {"type": "object", "additionalProperties": _FORM},
        "gamma": _NAME,
    },
}

_GAMMA = {
    "type": "object",
    "required": ["chart", "entries"],
    "additionalProperties": False,
    "properties": {
        "chart": _NAME,
        "entries": {"type": "object", "additionalProperties": {"type": "array", "items": {"type": ["string", "number"]}}},
        "matrix": {"type": "object", "additionalProperties": {
            "type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 2, "maxItems": 2}},
    },
}

_XI = {
    "type": "object",
    "required": ["fibers", "forms", "entries"],
    "additionalProperties": False,
    "properties": {
        "fibers": {"type": "array", "items": _NAME, "minItems": 1},
        "forms": {"oneOf": [_NAME, {"type": "array", "items": _NAME}]},
        "entries": {"type": "object", "additionalProperties": _COMPONENTS},
    },
}

_PDE = {
    "type": "object",
    "required": ["chart", "F"],
    "additionalProperties": False,
    "properties": {"chart": _NAME, "F": _EXPR},
}

_BACKLUND = {
    "type": "object",
    "required": ["chart", "unknown"],
    "additionalProperties": False,
    "properties": {
        "chart": _NAME,
        "unknown": _NAME,
        "rhs": {"type": "array", "items": _EXPR},
        "from": {
            "type": "object", "required": ["system", "pattern"], "additionalProperties": False,
            "properties": {"system": _NAME, "pattern": _NAME},
        },
    },
    "oneOf": [{"required": ["rhs"]}, {"required": ["from"]}],
}

_PATTERN = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "xi": _NAME,
        "coefficients": _COMPONENTS,
        "slots": {"type": "array", "items": {"type": "string"}, "minItems": 3, "maxItems": 3},
        "variable": _NAME,
    },
    "oneOf": [{"required": ["xi"]}, {"required": ["coefficients"]}, {"required": ["slots", "variable"]}],
}

_FRAME = {
    "type": "object",
    "required": ["coordinates", "frames", "constants", "variable", "tau"],
    "additionalProperties": False,
    "properties": {
        "coordinates": {"type": "array", "items": _NAME, "minItems": 1},
        "frames": {"type": "array", "items": _NAME, "minItems": 1},
        "constants": _NAME,
        "variable": _NAME,
        "tau": _COMPONENTS,
        "zero": {"type": "array", "items": _NAME},
    },
}

_GRID = {
    "type": "object",
    "required": ["x0", "y0", "x1", "y1"],
    "additionalProperties": False,
    "properties": {
        "x0": {"type": "number"}, "y0": {"type": "number"},
        "x1": {"type": "number"}, "y1": {"type": "number"},
        "h": {"type": "number", "exclusiveMinimum": 0},
        "nx": {"type": "integer", "minimum": 2}, "ny": {"type": "integer", "minimum": 2},
    },
    "oneOf": [{"required": ["h"]}, {"required": ["nx", "ny"]}],
}

_SOLUTION = {
    "type": "object",
    "required": ["base", "fields"],
    "additionalProperties": False,
    "properties": {
        "base": {"type": "array", "items": {"type": "string"}},
        "fields": {"type": "object", "additionalProperties": _EXPR, "minProperties": 1},
        "require": _EXPR,
    },
}

_TASK_KINDS = ["jacobi", "lie", "zero-curvature", "lax", "lax-numeric", "riccati", "backlund",
               "backlund-numeric", "closure", "residual-scan"]

_TASK = {
    "type": "object",
    "required": ["name", "kind"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "kind": {"enum": _TASK_KINDS},
        "constants": _NAME,
        "system": _NAME,
        "systems": _NAMES,
        "pde": _NAME,
        "targets": {"type": "object", "additionalProperties": _NAME},
        "xi": _NAME,
        "gamma": _NAME,
        "pattern": _NAME,
        "frame": _NAME,
        "solution": _NAME,
        "compare": _NAME,
        "grid": _NAME,
        "loop": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
        "steps": {"type": "integer", "minimum": 1},
        "initial": {"type": ["string", "number"]},
        "display": {"type": "object"},
        "expect": {"type": "array", "items": _EXPR},
        "max_error": {"type": "number", "minimum": 0},
        "max_defect": {"type": "number", "minimum": 0},
        "min_defect": {"type": "number", "minimum": 0},
        "max_residual": {"type": "number", "minimum": 0},
        "min_residual": {"type": "number", "minimum": 0},
    },
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["name", "charts", "tasks"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "charts": {"type": "object", "additionalProperties": _CHART, "minProperties": 1},
        "constants": {"type": "object", "additionalProperties": _CONSTANTS},
        "systems": {"type": "object", "additionalProperties": _SYSTEM},
        "tables": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gamma": {"type": "object", "additionalProperties": _GAMMA},
                "xi": {"type": "object", "additionalProperties": _XI},
            },
        },
        "pdes": {"type": "object", "additionalProperties": _PDE},
        "patterns": {"type": "object", "additionalProperties": _PATTERN},
        "backlund": {"type": "object", "additionalProperties": _BACKLUND},
        "frames": {"type": "object", "additionalProperties": _FRAME},
        "numeric": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "grids": {"type": "object", "additionalProperties": _GRID},
                "solutions": {"type": "object", "additionalProperties": _SOLUTION},
            },
        },
        "tasks": {"type": "array", "items": _TASK, "minItems": 1},
    },
}

TASK_KINDS = tuple(_TASK_KINDS)
