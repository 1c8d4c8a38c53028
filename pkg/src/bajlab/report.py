"""Deterministic report serialization: JSON documents and CSV tables.

Identical inputs must produce byte-identical JSON, so this module formats
every float itself (17 significant digits), keeps key order fixed, and
never embeds timestamps or environment details.
"""

from __future__ import annotations

import dataclasses
import math
from pathlib import Path

import numpy as np

from .analysis import ConstantFit, EquivalenceWitness, Quadratic, QuadraticFormFit
from .decide import Classification
from .generator import GeneratorPair, ValidationReport


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot enter a report")
    return format(float(x), ".17g")


def json_dumps(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, fixed float formatting."""
    pieces: list[str] = []
    _write_json(obj, pieces, 0)
    return "".join(pieces) + "\n"


def _write_json(obj, out: list[str], depth: int) -> None:
    pad = "  " * depth
    inner = "  " * (depth + 1)
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append('"' + obj.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, value) in enumerate(obj.items()):
            out.append(f'{inner}"{key}": ')
            _write_json(value, out, depth + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        out.append("[\n")
        for i, value in enumerate(items):
            out.append(inner)
            _write_json(value, out, depth + 1)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(pad + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


# -- fit reports (uniform shape: kind, constants, residual, spread, nodes,
#    tolerance, plus diagnostics) --------------------------------------------


def fit_report(fit) -> dict:
    if isinstance(fit, EquivalenceWitness):
        return {
            "kind": "equivalence_witness",
            "constants": {"a": fit.a, "b": fit.b, "c": fit.c, "d": fit.d,
                          "det_normalized": fit.det_normalized},
            "residual": fit.residual,
            "spread": None,
            "nodes": fit.nodes,
            "tolerance": fit.tolerance,
            "ok": fit.ok,
        }
    if isinstance(fit, ConstantFit):
        return {
            "kind": "constant_fit",
            "constants": {"value": fit.value},
            "residual": None,
            "spread": fit.spread,
            "nodes": fit.nodes,
            "tolerance": fit.tolerance,
            "ok": fit.ok,
        }
    if isinstance(fit, QuadraticFormFit):
        return {
            "kind": "quadratic_form",
            "constants": {"a": fit.a, "b": fit.b, "c": fit.c},
            "residual": fit.residual,
            "spread": None,
            "nodes": fit.nodes,
            "tolerance": fit.tolerance,
            "ok": fit.ok,
            "condition": fit.condition,
            "hint": fit.hint,
        }
    if isinstance(fit, Quadratic):
        return {
            "kind": "ratio_quadratic",
            "constants": {"c0": fit.c0, "c1": fit.c1, "c2": fit.c2},
            "residual": fit.residual,
            "spread": None,
            "nodes": fit.nodes,
            "tolerance": fit.tolerance,
            "ok": fit.ok,
            "condition": fit.condition,
            "positive": fit.positive,
        }
    raise TypeError(f"not a fit result: {type(fit).__name__}")


def _jsonable(value):
    if isinstance(value, (EquivalenceWitness, ConstantFit, QuadraticFormFit, Quadratic)):
        return fit_report(value)
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: _jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def validation_json(report: ValidationReport) -> dict:
    return {
        "ok": report.ok,
        "min_g": report.min_g,
        "min_abs_wronskian": report.min_abs_wronskian,
        "wronskian_sign": report.wronskian_sign,
        "samples_used": report.samples_used,
    }


def evidence_json(evidence: dict) -> dict | None:
    if not evidence:
        return None
    return {key: _jsonable(entry) for key, entry in evidence.items()}


def classification_json(cls: Classification) -> dict:
    return {
        "tag": cls.tag,
        "witness": fit_report(cls.witness) if cls.witness is not None else None,
        "gamma": fit_report(cls.gamma) if cls.gamma is not None else None,
        "alpha": fit_report(cls.alpha) if cls.alpha is not None else None,
        "beta": fit_report(cls.beta) if cls.beta is not None else None,
        "quadratic_forms": (
            {"first": fit_report(cls.quad_a), "second": fit_report(cls.quad_b)}
            if cls.quad_a is not None else None),
        "polynomials": (
            {"p": fit_report(cls.poly_p), "q": fit_report(cls.poly_q)}
            if cls.poly_p is not None else None),
        "delta": cls.delta,
        "max_deviation": cls.verdict.max_deviation,
        "evidence": evidence_json(cls.evidence),
    }


def pair_inputs(pair: GeneratorPair, names=("f", "g")) -> dict:
    return {
        names[0]: pair.f.source,
        names[1]: pair.g.source,
        "domain": [pair.domain.lo, pair.domain.hi],
    }


# -- CSV ----------------------------------------------------------------------


def table_csv(xs, values) -> str:
    lines = ["x,value"]
    for x, v in zip(np.asarray(xs).ravel(), np.asarray(values).ravel()):
        lines.append(f"{format_float(x)},{format_float(v)}")
    return "\n".join(lines) + "\n"


def grid_csv(x, y, mean_a, mean_b) -> str:
    lines = ["x,y,meanA,meanB,diff"]
    for xi, yi, ai, bi in zip(np.asarray(x).ravel(), np.asarray(y).ravel(),
                              np.asarray(mean_a).ravel(), np.asarray(mean_b).ravel()):
        lines.append(",".join([format_float(xi), format_float(yi),
                               format_float(ai), format_float(bi),
                               format_float(ai - bi)]))
    return "\n".join(lines) + "\n"


def wide_csv(header: list[str], columns: list) -> str:
    lines = [",".join(header)]
    for row in zip(*[np.asarray(c).ravel() for c in columns]):
        lines.append(",".join(format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def write_text(path: Path, content: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content)
    return path
