"""JSON schemas for CLI envelopes and per-command payloads (also exported to docs/schemas)."""

SCHEMA_VERSION = "1"

_num = {"type": "number"}
_int = {"type": "integer"}
_entries4 = {"type": "array", "items": _num, "minItems": 4, "maxItems": 4}
_int_entries4 = {"type": "array", "items": _int, "minItems": 4, "maxItems": 4}


def _obj(props: dict, required=None) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
    }


TRUNCATED_VALUE = _obj(
    {
        "k": _int,
        "N": _int,
        "g": _entries4,
        "radius": _num,
        "value_re": _num,
        "value_im": _num,
        "tail_bound": _num,
        "term_count": _int,
    }
)

LATTICE_BALL = _obj(
    {
        "N": _int,
        "radius": _num,
        "count": _int,
        "elements": {"type": "array", "items": _int_entries4},
        "exhaustive": {"type": "boolean"},
    }
)

CERTIFICATE = _obj(
    {
        "k": _int,
        "N": _int,
        "T": _num,
        "mass_inside": _num,
        "mass_total": _num,
        "lattice_trivial": {"type": "boolean"},
        "witness": {"oneOf": [{"type": "null"}, _int_entries4]},
        "verified": {"type": "boolean"},
        "probes": {"type": "array", "items": TRUNCATED_VALUE},
        "adelic": {"type": "object"},
    },
    required=["k", "N", "T", "mass_inside", "mass_total", "lattice_trivial", "witness", "verified", "probes"],
)

ROOT_SYSTEM = _obj(
    {
        "rank": _int,
        "positive_roots": {"type": "array", "items": {"type": "array", "items": {"type": ["integer", "string"]}}},
        "multiplicities": {"type": "array", "items": _int},
    }
)

PAYLOAD_SCHEMAS = {
    "lp-norm": _obj({"k": _int, "p": _num, "value": _num, "discretization_error_estimate": _num,
                     "tail_bound": _num, "closed_form": _num}),
    "poincare-eval": TRUNCATED_VALUE,
    "cuspidality": _obj({"k": _int, "N": _int, "residual": _num, "bound": _num, "within_bound": {"type": "boolean"}}),
    "certificate": CERTIFICATE,
    "level-threshold": _obj(
        {
            "k": _int,
            "n0": _int,
            "T": _num,
            "rejected": {"type": "array", "items": _obj({"N": _int, "witness": _int_entries4})},
        }
    ),
    "gamma-ball": LATTICE_BALL,
    "quotient-norm": _obj({"N": _int, "value": _num, "search_radius": _num}),
    "casimir-report": _obj({"k": _int, "eigenvalue_re": _num, "eigenvalue_im": _num,
                            "relative_spread": _num, "sample_count": _int}),
    "sweep": _obj(
        {
            "rows": {
                "type": "array",
                "items": _obj(
                    {
                        "k": _int,
                        "N": _int,
                        "verified": {"type": "boolean"},
                        "T": _num,
                        "min_nontrivial_opnorm": {"type": ["number", "null"]},
                        "probe_margin": _num,
                    }
                ),
            },
            "truncated": {"type": "boolean"},
        }
    ),
}

ENVELOPE_SCHEMA = _obj(
    {
        "config": _obj({"command": {"type": "string"}, "params": {"type": "object"}, "format": {"type": "string"}}),
        "result": {},
        "wall_time": {"type": ["number", "null"]},
        "library_version": {"type": "string"},
        "determinism_seed": {"type": "null"},
        "status": {"enum": ["ok", "error"]},
        "error": _obj({"type": {"type": "string"}, "message": {"type": "string"}}),
    },
    required=["config", "result", "wall_time", "library_version", "determinism_seed", "status"],
)
