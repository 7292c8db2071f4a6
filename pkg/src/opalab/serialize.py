"""Deterministic JSON encoding and file formats for library values.

Numbers render at 17 significant digits, complex values as [re, im] pairs,
and dict keys come out sorted, so identical values serialize to identical
bytes.  The tiny writer exists because byte-level reproducibility of the
run artifacts is part of the CLI contract.
"""

from __future__ import annotations

import json
from dataclasses import asdict, is_dataclass

import numpy as np

from .errors import InvalidInputError
from .series import CoeffSeries, ZeroFreeReport
from .boundary import BoundarySet, PiecewisePartition


def _format_float(x: float) -> str:
    if not np.isfinite(x):
        if np.isnan(x):
            return '"nan"'
        return '"inf"' if x > 0 else '"-inf"'
    if x == int(x) and abs(x) < 1e16:
        return "%.1f" % x
    return "%.17g" % x


def dumps(obj, indent: int = 0) -> str:
    """Deterministic JSON text for plain dict/list/str/number trees."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [
            '%s%s: %s' % (inner, json.dumps(str(k)), dumps(obj[k], indent + 2))
            for k in sorted(obj, key=str)
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        parts = [inner + dumps(v, indent + 2) for v in seq]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    raise TypeError("cannot serialize %r" % type(obj))


def complex_pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def to_jsonable(value):
    """Convert library values into plain trees that ``dumps`` understands."""
    if isinstance(value, CoeffSeries):
        return {
            "coeffs": [complex_pair(c) for c in value.coeffs],
            "tail_bound": value.tail_bound,
        }
    if isinstance(value, BoundarySet):
        return {
            "points": list(value.points),
            "arcs": [[c, hw] for c, hw in value.arcs],
            "sample_density": value.sample_density,
        }
    if isinstance(value, PiecewisePartition):
        return {
            "pieces": [
                {"piece": to_jsonable(piece), "v": complex_pair(v)}
                for piece, v in value.pieces
            ],
            "epsilon": value.epsilon,
        }
    if isinstance(value, ZeroFreeReport):
        return {
            "zero_free": value.zero_free,
            "winding_number": value.winding_number,
            "min_modulus_on_circle": value.min_modulus_on_circle,
            "grid_size": value.grid_size,
            "indeterminate": value.indeterminate,
        }
    if is_dataclass(value) and not isinstance(value, type):
        out = {}
        for name in value.__dataclass_fields__:
            out[name] = to_jsonable(getattr(value, name))
        return out
    if isinstance(value, complex):
        return complex_pair(value)
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return [complex_pair(c) for c in value]
        return [float(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    return value


def coeff_series_to_json(a: CoeffSeries) -> dict:
    return to_jsonable(a)


def coeff_series_from_json(data: dict) -> CoeffSeries:
    try:
        coeffs = [complex(re, im) for re, im in data["coeffs"]]
        tail = float(data.get("tail_bound", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError("malformed coefficient file: %s" % exc)
    return CoeffSeries(coeffs, tail)


def boundary_set_from_json(data: dict) -> BoundarySet:
    try:
        points = tuple(float(p) for p in data.get("points", []))
        arcs = tuple((float(c), float(h)) for c, h in data.get("arcs", []))
        kwargs = {}
        if "sample_density" in data:
            kwargs["sample_density"] = float(data["sample_density"])
    except (TypeError, ValueError) as exc:
        raise InvalidInputError("malformed boundary-set file: %s" % exc)
    return BoundarySet(points=points, arcs=arcs, **kwargs)


def targets_from_json(data: dict) -> dict:
    """Target files: {"targets": [[angle, re, im], ...]} -> {angle: complex}."""
    try:
        return {float(t): complex(re, im) for t, re, im in data["targets"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError("malformed target file: %s" % exc)


def load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
