"""JSON document schemas, loaders and writers.

Infinite costs travel as the string ``"inf"`` (``"-inf"`` for log values).
"""

import csv
import io as _io
import json
import math

import jsonschema
import numpy as np

from .errors import ParseError, ValidationError
from .plausibility import Axis, DiscreteDistribution, GridDensity
from .pushforward import Projection, Relabel
from .semiring import SemiringMode
from .tropical import CostMeasure, TropicalMatrix

_NUM_OR_INF = {"anyOf": [{"type": "number"}, {"enum": ["inf", "Infinity"]}]}
_LOG_VALUE = {"anyOf": [{"type": "number"}, {"enum": ["-inf", "inf"]}]}
_MODE = {"enum": ["additive", "maxitive"]}

_DISCRETE = {
    "type": "object",
    "properties": {
        "mode": _MODE,
        "normalized": {"type": "boolean"},
        "weights": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
        "outcomes": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"label": {}, "weight": {"type": "number", "minimum": 0}},
                "required": ["label", "weight"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["mode"],
    "oneOf": [{"required": ["weights"]}, {"required": ["outcomes"]}],
}

_GRID = {
    "type": "object",
    "properties": {
        "mode": _MODE,
        "normalized": {"type": "boolean"},
        "axes": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "lower": {"type": "number"},
                    "upper": {"type": "number"},
                    "points": {"type": "integer", "minimum": 2},
                },
                "required": ["lower", "upper", "points"],
            },
        },
        "values": {"type": "array", "items": {"type": "number", "minimum": 0}},
    },
    "required": ["mode", "axes", "values"],
}

SCHEMAS = {
    "distribution": _DISCRETE,
    "grid": _GRID,
    "transform": {
        "type": "object",
        "oneOf": [
            {
                "properties": {"relabel": {"type": "object"}},
                "required": ["relabel"],
                "additionalProperties": False,
            },
            {
                "properties": {
                    "project": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0}}
                },
                "required": ["project"],
                "additionalProperties": False,
            },
        ],
    },
    "costs": {
        "type": "object",
        "properties": {
            "costs": {"type": "object", "additionalProperties": _NUM_OR_INF},
            "normalized": {"type": "boolean"},
            "steps": {"type": "integer", "minimum": 0},
        },
        "required": ["costs"],
    },
    "matrix": {
        "type": "object",
        "properties": {
            "matrix": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _NUM_OR_INF}},
            "labels": {"type": "array", "items": {"type": "string"}},
        },
        "required": ["matrix"],
    },
    "model": {
        "type": "object",
        "properties": {
            "model": {"enum": ["normal", "quadratic", "logistic"]},
            "data": {"type": "array", "items": {"type": "number"}},
            "box": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
            },
            "mean": {"type": "array", "items": {"type": "number"}},
            "precision": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
            "x": {"type": "array", "items": {"type": "number"}},
            "y": {"type": "array", "items": {"type": "number"}},
            "noise": {"type": "number", "exclusiveMinimum": 0},
            "interest": {
                "type": "object",
                "oneOf": [
                    {"properties": {"coordinate": {"type": "integer", "minimum": 0}}, "required": ["coordinate"]},
                    {"properties": {"linear": {"type": "array", "items": {"type": "number"}}}, "required": ["linear"]},
                ],
            },
        },
        "required": ["model"],
    },
    "axioms": {
        "type": "object",
        "properties": {
            "passed": {"type": "boolean"},
            "reports": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "mode": _MODE,
                        "exhaustive": {"type": "boolean"},
                        "passed": {"type": "boolean"},
                        "laws": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "properties": {
                                    "law": {"enum": ["empty", "omega", "union"]},
                                    "passed": {"type": "boolean"},
                                    "checked": {"type": "integer"},
                                    "counterexamples": {"type": "array"},
                                },
                                "required": ["law", "passed", "checked"],
                            },
                        },
                    },
                    "required": ["mode", "passed", "laws"],
                },
            },
        },
        "required": ["passed", "reports"],
    },
    "comparison": {
        "type": "object",
        "properties": {
            "source": {"anyOf": [_DISCRETE, _GRID]},
            "additive": {"anyOf": [_DISCRETE, _GRID]},
            "maxitive": {"anyOf": [_DISCRETE, _GRID]},
            "argmax": {"type": "object", "properties": {"additive": {}, "maxitive": {}}},
            "argmax_flip": {"type": "boolean"},
        },
        "required": ["additive", "maxitive", "argmax", "argmax_flip"],
    },
    "profile": {
        "type": "object",
        "properties": {
            "model": {"type": "string"},
            "param_names": {"type": "array", "items": {"type": "string"}},
            "t": {"type": "array", "items": {"type": "number"}},
            "log_profile": {"type": "array", "items": _LOG_VALUE},
            "argmax": {"type": "array", "items": {"type": "array", "items": _LOG_VALUE}},
        },
        "required": ["t", "log_profile", "argmax"],
    },
    "distances": {
        "type": "object",
        "properties": {
            "scale": {"type": "number"},
            "rows": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "theta_1": {},
                        "theta_2": {},
                        "relation": {"enum": ["preferred", "dispreferred", "equivalent"]},
                        "distance": _NUM_OR_INF,
                    },
                    "required": ["theta_1", "theta_2", "relation", "distance"],
                },
            },
        },
        "required": ["rows"],
    },
    "manifest": {
        "type": "object",
        "properties": {
            "subcommand": {"type": "string"},
            "inputs": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {"path": {"type": "string"}, "sha256": {"type": "string"}},
                    "required": ["path", "sha256"],
                },
            },
            "seed": {"type": "integer"},
            "options": {"type": "object"},
            "outputs": {"type": "array", "items": {"type": "string"}},
            "versions": {"type": "object"},
        },
        "required": ["subcommand", "inputs", "seed", "options", "outputs", "versions"],
    },
}


def validate(doc, kind):
    try:
        jsonschema.validate(doc, SCHEMAS[kind])
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ParseError(f"{kind} document invalid at {path}: {exc.message}") from None


def parse_json(text, source="<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: not valid JSON ({exc.msg} at line {exc.lineno})") from None


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return parse_json(fh.read(), str(path))


def _inf(x):
    if isinstance(x, str):
        return math.inf if x in ("inf", "Infinity") else -math.inf
    return float(x)


def jsonable(obj):
    """Replace non-finite floats and numpy scalars/arrays with JSON-safe values."""
    if isinstance(obj, dict):
        return {(k if isinstance(k, str) else str(k)): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if v == math.inf:
            return "inf"
        if v == -math.inf:
            return "-inf"
        return v
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(doc):
    return json.dumps(jsonable(doc), indent=2, allow_nan=False) + "\n"


# distributions


def is_grid_doc(doc):
    return isinstance(doc, dict) and "axes" in doc


def distribution_from_doc(doc):
    if is_grid_doc(doc):
        validate(doc, "grid")
        axes = tuple(Axis(a["lower"], a["upper"], a["points"]) for a in doc["axes"])
        return GridDensity(axes, np.asarray(doc["values"], dtype=float), doc["mode"], doc.get("normalized"))
    validate(doc, "distribution")
    mode = SemiringMode.parse(doc["mode"])
    if "weights" in doc:
        return DiscreteDistribution.from_dict(doc["weights"], mode, doc.get("normalized"))
    labels = [o["label"] for o in doc["outcomes"]]
    weights = [o["weight"] for o in doc["outcomes"]]
    return DiscreteDistribution(tuple(labels), tuple(weights), mode, doc.get("normalized"))


def distribution_to_doc(dist):
    if isinstance(dist, GridDensity):
        return {
            "mode": str(dist.mode),
            "normalized": bool(dist.normalized),
            "axes": [{"lower": ax.lower, "upper": ax.upper, "points": ax.points} for ax in dist.axes],
            "values": dist.values.ravel().tolist(),
        }
    doc = {"mode": str(dist.mode), "normalized": bool(dist.normalized)}
    if all(isinstance(lab, str) for lab in dist.labels):
        doc["weights"] = dist.as_dict()
    else:
        doc["outcomes"] = [{"label": jsonable(lab), "weight": w} for lab, w in zip(dist.labels, dist.weights)]
    return doc


def transform_from_doc(doc):
    validate(doc, "transform")
    if "relabel" in doc:
        return Relabel(doc["relabel"])
    return Projection(tuple(doc["project"]))


def costs_from_doc(doc):
    validate(doc, "costs")
    return CostMeasure(tuple(doc["costs"]), tuple(_inf(v) for v in doc["costs"].values()), doc.get("normalized"))


def costs_to_doc(cm, **extra):
    return {"costs": {str(k): v for k, v in cm.as_dict().items()}, "normalized": bool(cm.normalized), **extra}


def matrix_from_doc(doc):
    validate(doc, "matrix")
    rows = doc["matrix"]
    if len({len(r) for r in rows}) != 1:
        raise ParseError("matrix rows differ in length")
    return TropicalMatrix([[_inf(v) for v in r] for r in rows], doc.get("labels"))


def format_float(x):
    """Shortest round-trip text for a float (``inf``/``-inf`` spelled out)."""
    x = float(x)
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return repr(x)


def csv_text(header, rows):
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()
