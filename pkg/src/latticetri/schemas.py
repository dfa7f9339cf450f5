"""JSON Schemas (draft 2020-12) for the ``--json`` documents of each subcommand.

Every document carries ``schema`` = ``latticetri.<subcommand>/<version>``;
bump the version whenever a field changes meaning or disappears.
"""

from __future__ import annotations

SCHEMA_VERSION = 1

_num = {"type": "number"}
_int = {"type": "integer"}
_str = {"type": "string"}
_bool = {"type": "boolean"}
_opt_num = {"type": ["number", "null"]}
_opt_str = {"type": ["string", "null"]}
_int_list = {"type": "array", "items": _int}


def _doc(cmd: str, props: dict, required=None) -> dict:
    props = {"schema": {"const": f"latticetri.{cmd}/{SCHEMA_VERSION}"}, "version": _str, **props}
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "properties": props,
        "required": sorted(required if required is not None else props),
        "additionalProperties": False,
    }


def _obj(props: dict, required=None) -> dict:
    return {"type": "object", "properties": props, "required": sorted(required if required is not None else props), "additionalProperties": False}


_hull = {
    "A": _str,
    "A_float": _num,
    "B": _int,
    "I": _int,
    "D": _int,
    "X": _int,
    "Y": _int,
    "N": _int,
    "pick_holds": _bool,
    "segments": {"type": "array", "items": _obj({"slope": _str, "n": _int, "x_length": _int})},
    "vertices": {"type": "array", "items": {"type": "array", "items": _int, "minItems": 2, "maxItems": 2}},
    "ambiguous_columns": _int_list,
}

_argmax = {
    "alpha": _str,
    "alpha_float": _num,
    "s_range": {"type": "array", "items": _str, "minItems": 2, "maxItems": 2},
    "max_count": _int,
    "max_deficit": _num,
    "maximizing_sets": {
        "type": "array",
        "items": _obj({"beta_lo": _str, "beta_hi": _str, "beta_lo_float": _num, "beta_hi_float": _num, "degenerate": _bool}),
    },
    "canonical_slopes": {"type": "array", "items": _opt_str},
    "ties": _bool,
    "engine": {"enum": ["stream", "window"]},
    "canonical_rule": _str,
}

_area_report = _obj(
    {
        "alpha": _str,
        "alpha_float": _num,
        "method": {"enum": ["candidate-scan", "exact-sweep"]},
        "q_max": _int,
        "window_c": _num,
        "overall_sup": _num,
        "overall_sup_exact": _opt_str,
        "best_count": _int,
        "best_beta": _opt_num,
        "neighborhood_sup": _opt_num,
        "best_candidate": {"type": ["object", "null"]},
        "n_candidates": _int,
        "aborted": _bool,
    }
)

SCHEMAS = {
    "count": _doc(
        "count",
        {
            "alpha": _str,
            "alpha_float": _num,
            "beta": _str,
            "count": {"type": "integer", "minimum": 0},
            "deficit": _num,
            "deficit_exact": _str,
            "ambiguous_columns": _int_list,
        },
    ),
    "deficit-curve": _doc(
        "deficit-curve",
        {
            "beta": _str,
            "points": {
                "type": "array",
                "items": _obj(
                    {
                        "alpha": _str,
                        "alpha_float": _num,
                        "count": _int,
                        "deficit": _num,
                        "predicted_coeff": _opt_num,
                        "residual": _opt_num,
                        "ambiguous_columns": _int,
                    }
                ),
            },
            "max_abs_residual": _opt_num,
        },
    ),
    "hull": _doc("hull", _hull),
    "pick": _doc(
        "pick",
        {
            "vertices": {"type": "array", "items": {"type": "array", "items": _int}},
            "A": _str,
            "B": _int,
            "I": _int,
            "identity_holds": _bool,
            "brute_I": {"type": ["integer", "null"]},
            "brute_B": {"type": ["integer", "null"]},
        },
    ),
    "argmax": _doc("argmax", _argmax),
    "scan-argmax": _doc(
        "scan-argmax",
        {
            "rows": {
                "type": "array",
                "items": _obj({"alpha": _str, "alpha_float": _num, "max_count": _int, "max_deficit": _num, "canonical_slopes": _str}),
            },
            "frequency": {"type": "array", "items": _obj({"slope": _str, "hits": _int, "in_lambda": _bool})},
        },
    ),
    "lambda": _doc(
        "lambda",
        {
            "q_max": _int,
            "members": {
                "type": "array",
                "items": _obj(
                    {
                        "slope": _str,
                        "p": _int,
                        "q": _int,
                        "limsup_coeff": _str,
                        "limsup_coeff_float": _num,
                        "margin": {"type": "integer", "minimum": 1},
                        "period_float": _num,
                    }
                ),
            },
        },
    ),
    "dimension": _doc(
        "dimension",
        {
            "epsilons": {"type": "array", "items": _str},
            "counts": _int_list,
            "exponent": _opt_num,
            "intercept": _num,
            "residuals": {"type": "array", "items": _num},
        },
        required=["schema", "version", "epsilons", "counts", "exponent"],
    ),
    "align": _doc(
        "align",
        {
            "query": {"type": "object"},
            "hits": {"type": "array", "items": {"type": "object", "required": ["k", "alpha"]}},
        },
    ),
    "badarea": _doc(
        "badarea",
        {
            "gamma_target": _num,
            "threshold": _num,
            "anchor": _int,
            "targets": {"type": "array", "items": _int_list},
            "tried": _int,
            "results": {"type": "array", "items": _obj({"alpha": _str, "alpha_float": _num, "overall_sup": _num})},
            "near_miss": {"type": ["object", "null"]},
            "reports": {"type": "array", "items": _area_report},
        },
    ),
    "evaluate-area": _doc("evaluate-area", _area_report["properties"]),
    "density": _doc(
        "density",
        {
            "sqrt_beta": _str,
            "T": _int,
            "measured": {"type": "number", "minimum": 0, "maximum": 1},
            "predicted": _num,
            "measure": _str,
            "complement": _str,
            "breakpoints": _int,
        },
    ),
    "figure4": _doc(
        "figure4",
        {
            "alpha": _str,
            "alpha_float": _num,
            "q_max": _int,
            "grid": _int,
            "rows": _int,
            "max_deficit": _num,
            "max_beta": _str,
            "overall_sup": _num,
        },
        required=["schema", "version", "alpha", "alpha_float", "q_max", "grid", "rows", "max_deficit", "max_beta"],
    ),
    "cache": _doc(
        "cache",
        {"root": _str, "entries": {"type": "array", "items": {"type": "object"}}, "removed": _int},
        required=["schema", "version", "root"],
    ),
}
