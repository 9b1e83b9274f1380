"""JSON job configurations: schema, validation and object construction."""

from __future__ import annotations

import math

import jsonschema

from .expr import DSLError, ParseError, parse

SCHEMA_VERSION = "v1"
CHART_COUNTS = {"sphere2": 2, "circle3": 3, "torus4": 4}
COCYCLE_CATALOG = ("trivial", "clutching", "flat-circle", "torus-line", "direct-sum")

DEFAULT_THRESHOLDS = {
    "cocycle": 1e-10,
    "gluing": 1e-9,
    "tensoriality": 1e-9,
    "projector": 1e-12,
    "closedness": 1e-8,
    "chart": 1e-9,
    "route": 1e-6,
    "integrality": 1e-3,
    "invariance": 1e-6,
}

_expr_matrix = {
    "type": "array", "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": {"type": ["string", "number"]}},
}

_number_matrix = {
    "type": "array", "minItems": 1,
    "items": {"type": "array", "minItems": 1, "items": {"type": "number"}},
}

_cocycle = {
    "type": "object",
    "properties": {
        "catalog": {"enum": list(COCYCLE_CATALOG)},
        "degree": {"type": "integer"},
        "rank": {"type": "integer", "minimum": 1},
        "holonomy": {"oneOf": [
            {"type": "number"},
            {"type": "object", "properties": {"angle": {"type": "number"}},
             "required": ["angle"], "additionalProperties": False},
            _number_matrix,
        ]},
        "parts": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/cocycle"}},
        "transitions": {
            "type": "array", "minItems": 1,
            "items": {
                "type": "object",
                "properties": {
                    "from": {"type": "integer", "minimum": 0},
                    "to": {"type": "integer", "minimum": 0},
                    "matrix": _expr_matrix,
                },
                "required": ["from", "to", "matrix"],
                "additionalProperties": False,
            },
        },
    },
    "oneOf": [{"required": ["catalog"]}, {"required": ["transitions", "rank"]}],
    "additionalProperties": False,
}

_partition = {
    "oneOf": [
        {"enum": ["A", "B"]},
        {"type": "object",
         "properties": {"bumps": {"type": "array", "minItems": 1,
                                  "items": {"type": ["string", "number"]}},
                        "name": {"type": "string"}},
         "required": ["bumps"], "additionalProperties": False},
    ]
}

_thresholds = {
    "type": "object",
    "properties": {k: {"type": "number", "exclusiveMinimum": 0} for k in DEFAULT_THRESHOLDS},
    "additionalProperties": False,
}

BUNDLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$defs": {"cocycle": _cocycle},
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "job": {"const": "bundle-report"},
        "manifold": {"enum": list(CHART_COUNTS)},
        "resolution": {"type": "integer", "minimum": 8},
        "cocycle": {"$ref": "#/$defs/cocycle"},
        "partitions": {"type": "array", "minItems": 1, "maxItems": 2, "items": _partition},
        "p": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 0}},
        "thresholds": _thresholds,
    },
    "required": ["schema", "manifold", "resolution", "cocycle", "p"],
    "additionalProperties": False,
}

_element = {"oneOf": [
    {"type": "array", "items": {"type": ["integer", "string"]}},
    {"type": "object", "additionalProperties": {"type": ["integer", "string"]}},
]}

_algebra_matrix = {"type": "array", "minItems": 1,
                   "items": {"type": "array", "minItems": 1, "items": _element}}

ALGEBRA_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "job": {"const": "algebra-report"},
        "algebra": {"oneOf": [
            {"type": "string"},
            {"type": "object",
             "properties": {
                 "name": {"type": "string"},
                 "description": {"type": "string"},
                 "basis": {"type": "array", "items": {"type": "string"}},
                 "unit": {"type": "array", "items": {"type": ["integer", "string"]}},
                 "products": {"type": "array", "items": {"type": "array", "items": {
                     "type": "array", "items": {"type": ["integer", "string"]}}}},
             },
             "required": ["unit", "products"], "additionalProperties": False},
        ]},
        "n_max": {"type": "integer", "minimum": 0},
        "idempotents": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "Q": _algebra_matrix,
                    "p": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                    "conjugators": {"type": "array", "items": _algebra_matrix},
                },
                "required": ["Q"],
                "additionalProperties": False,
            },
        },
    },
    "required": ["schema", "algebra", "n_max"],
    "additionalProperties": False,
}

SCHEMAS = {"bundle-report": BUNDLE_SCHEMA, "algebra-report": ALGEBRA_SCHEMA}


class ConfigError(ValueError):
    """Schema violation or unresolvable reference in a job configuration."""


def job_kind(config, default=None):
    if isinstance(config, dict) and "job" in config:
        return config["job"]
    return default


def schema_errors(config, kind):
    if kind not in SCHEMAS:
        return [f"unknown job kind {kind!r}"]
    validator = jsonschema.Draft202012Validator(SCHEMAS[kind])
    out = []
    for err in sorted(validator.iter_errors(config), key=lambda e: list(e.path)):
        where = "/".join(str(p) for p in err.path) or "<root>"
        out.append(f"{where}: {err.message}")
    return out


def check_schema(config, kind):
    errs = schema_errors(config, kind)
    if errs:
        raise ConfigError("; ".join(errs))


def thresholds(config):
    out = dict(DEFAULT_THRESHOLDS)
    out.update(config.get("thresholds", {}))
    return out


# ---------------------------------------------------------------------------
# Dry-run resolution
# ---------------------------------------------------------------------------

def _parse_diag(src, where, diags):
    if isinstance(src, (int, float)):
        return
    try:
        parse(src)
    except ParseError as exc:
        diags.append(f"{where}: parse error at offset {exc.offset}: {exc}")
    except DSLError as exc:
        diags.append(f"{where}: {exc}")


def _cocycle_diags(spec, manifold, where, diags):
    r = CHART_COUNTS[manifold]
    if "catalog" in spec:
        cat = spec["catalog"]
        need = {"clutching": "sphere2", "flat-circle": "circle3", "torus-line": "torus4"}
        if cat in need and need[cat] != manifold:
            diags.append(f"{where}: catalog cocycle {cat!r} needs manifold {need[cat]}")
        if cat in ("clutching", "torus-line") and "degree" not in spec:
            diags.append(f"{where}: catalog cocycle {cat!r} needs a degree")
        if cat == "flat-circle" and "holonomy" not in spec:
            diags.append(f"{where}: flat-circle needs a holonomy")
        if cat == "direct-sum":
            for k, part in enumerate(spec.get("parts", [])):
                _cocycle_diags(part, manifold, f"{where}/parts/{k}", diags)
            if not spec.get("parts"):
                diags.append(f"{where}: direct-sum needs parts")
        return
    n = spec["rank"]
    for k, tr in enumerate(spec["transitions"]):
        w = f"{where}/transitions/{k}"
        i, j = tr["from"], tr["to"]
        if i >= r or j >= r:
            diags.append(f"{w}: chart index out of range (manifold has {r} charts)")
        if i == j:
            diags.append(f"{w}: transition from a chart to itself")
        m = tr["matrix"]
        if len(m) != n or any(len(row) != n for row in m):
            diags.append(f"{w}: matrix is not {n}x{n}")
        for a, row in enumerate(m):
            for b, e in enumerate(row):
                _parse_diag(e, f"{w}/matrix/{a}/{b}", diags)


def resolve_bundle(config):
    """Diagnostics for a schema-valid bundle config (no numerics)."""
    diags = []
    manifold = config["manifold"]
    _cocycle_diags(config["cocycle"], manifold, "cocycle", diags)
    r = CHART_COUNTS[manifold]
    for k, part in enumerate(config.get("partitions", ["A"])):
        if isinstance(part, dict):
            if len(part["bumps"]) != r:
                diags.append(f"partitions/{k}: expected {r} bumps, got {len(part['bumps'])}")
            for c, e in enumerate(part["bumps"]):
                _parse_diag(e, f"partitions/{k}/bumps/{c}", diags)
    return diags


def resolve_algebra(config):
    from .nc.algebra import CATALOG
    diags = []
    alg = config["algebra"]
    if isinstance(alg, str):
        if alg not in CATALOG:
            diags.append(f"algebra: unknown catalog algebra {alg!r}")
        return diags
    m = len(alg["products"])
    if len(alg["unit"]) != m:
        diags.append("algebra/unit: wrong length")
    if any(len(row) != m or any(len(v) != m for v in row) for row in alg["products"]):
        diags.append("algebra/products: table must be m x m x m")
    if "basis" in alg and len(alg["basis"]) != m:
        diags.append("algebra/basis: wrong number of labels")
    return diags


def validate_config(config, kind=None):
    """Schema check plus dry-run resolution.  Returns a list of diagnostics."""
    kind = job_kind(config, kind)
    if not isinstance(config, dict):
        return ["<root>: configuration must be a JSON object"]
    if kind is None:
        return ["job: missing job kind"]
    errs = schema_errors(config, kind)
    if errs:
        return errs
    if kind == "bundle-report":
        return resolve_bundle(config)
    return resolve_algebra(config)


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------

def _holonomy(h):
    if isinstance(h, dict):
        return complex(math.cos(h["angle"]), math.sin(h["angle"]))
    return h


def build_cocycle(atlas, spec):
    from . import cocycle as C

    if "catalog" not in spec:
        maps = {(tr["to"], tr["from"]): tr["matrix"] for tr in spec["transitions"]}
        return C.Cocycle(atlas, spec["rank"], maps, "explicit")
    cat = spec["catalog"]
    if cat == "trivial":
        return C.trivial_cocycle(atlas, spec.get("rank", 1))
    if cat == "clutching":
        return C.make_clutching(atlas, spec["degree"], spec.get("rank", 1))
    if cat == "flat-circle":
        return C.flat_circle_cocycle(atlas, _holonomy(spec["holonomy"]))
    if cat == "torus-line":
        return C.torus_line_bundle(atlas, spec["degree"])
    return C.direct_sum(*[build_cocycle(atlas, part) for part in spec["parts"]])


def build_partitions(atlas, config):
    from .geometry import build_partition, catalog_partition

    out = []
    for k, part in enumerate(config.get("partitions", ["A"])):
        if isinstance(part, str):
            out.append(catalog_partition(atlas, part))
        else:
            out.append(build_partition(atlas, part["bumps"], part.get("name", f"custom{k}")))
    return out


__all__ = [
    "SCHEMA_VERSION", "BUNDLE_SCHEMA", "ALGEBRA_SCHEMA", "DEFAULT_THRESHOLDS", "ConfigError",
    "validate_config", "check_schema", "schema_errors", "thresholds", "build_cocycle",
    "build_partitions", "job_kind", "CHART_COUNTS",
]
