"""JSON input parsing and deterministic JSON/CSV emission.

Tree spec::

    {"gaps": [1, 1, 1],
     "generations": [{"alpha": 0, "beta": 0, "gamma": {"re": 0, "im": 0},
                      "b": 2, "eigenphases": ["pi"]}, ...],
     "root_angle": "dirichlet"}

Halfline spec, explicit or by periodic cell::

    {"origin": 0, "points": [1, 2, 3], "couplings": [{"a": 1, "q": 0, "c": 0}, ...],
     "left_boundary": "dirichlet", "period_hint": [0, 1]}
    {"cell": {"gaps": [1], "couplings": [{"a": 1, "q": 0, "c": 0}]}, "n_cells": 2}

Numbers may be JSON numbers or strings such as ``"2/3"`` (parsed exactly);
angles additionally accept ``"dirichlet"``, ``"neumann"``, ``"pi"``,
``"-pi/2"`` and the like.
"""
from __future__ import annotations

import csv
import io as _io
import json
import math
import re
from fractions import Fraction
from typing import Any, Sequence

from .couplings import InterfaceCoupling, VertexCoupling
from .errors import SpecValidationError
from .halfline import HalflineSystem
from .tree import RadialTreeSpec

_PI_RE = re.compile(r"^\s*(-)?\s*(\d+(?:\.\d+)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d+)?))?\s*$")


def parse_number(x) -> float | int | Fraction:
    if isinstance(x, bool) or x is None:
        raise SpecValidationError(f"expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        if isinstance(x, float) and not math.isfinite(x):
            raise SpecValidationError(f"non-finite number {x!r}")
        return x
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            pass
        m = _PI_RE.match(x)
        if m:
            sign = -1.0 if m.group(1) else 1.0
            mul = float(m.group(2)) if m.group(2) else 1.0
            div = float(m.group(3)) if m.group(3) else 1.0
            return sign * mul * math.pi / div
    raise SpecValidationError(f"cannot parse number {x!r}")


def parse_angle(x) -> float:
    if isinstance(x, str):
        low = x.strip().lower()
        if low == "dirichlet":
            return math.pi / 2
        if low == "neumann":
            return 0.0
    return float(parse_number(x))


def parse_scalar(x):
    """Complex entry ``{"re": .., "im": ..}`` or a plain real number."""
    if isinstance(x, dict):
        unknown = set(x) - {"re", "im"}
        if unknown:
            raise SpecValidationError(f"unknown complex keys {sorted(unknown)}")
        re_ = parse_number(x.get("re", 0))
        im_ = parse_number(x.get("im", 0))
        if im_ == 0:
            return re_
        return complex(float(re_), float(im_))
    return parse_number(x)


def _require(doc: dict, key: str):
    if key not in doc:
        raise SpecValidationError(f"missing key {key!r}")
    return doc[key]


def parse_vertex_coupling(d: dict) -> VertexCoupling:
    if not isinstance(d, dict):
        raise SpecValidationError("generation entries must be objects")
    b = _require(d, "b")
    if isinstance(b, bool) or not isinstance(b, int):
        raise SpecValidationError(f"b must be an integer, got {b!r}")
    phases = d.get("eigenphases")
    if phases is not None:
        phases = tuple(parse_angle(t) for t in phases)
    return VertexCoupling(
        parse_number(d.get("alpha", 0)),
        parse_number(d.get("beta", 0)),
        parse_scalar(d.get("gamma", 0)),
        b,
        phases,
    )


def parse_interface_coupling(d: dict) -> InterfaceCoupling:
    if not isinstance(d, dict):
        raise SpecValidationError("coupling entries must be objects")
    return InterfaceCoupling(parse_number(d.get("a", 0)), parse_number(d.get("q", 0)),
                             parse_scalar(d.get("c", 0)))


def parse_tree_spec(doc: dict) -> RadialTreeSpec:
    if not isinstance(doc, dict):
        raise SpecValidationError("tree spec must be a JSON object")
    gaps = tuple(parse_number(g) for g in _require(doc, "gaps"))
    gens = tuple(parse_vertex_coupling(g) for g in doc.get("generations", []))
    return RadialTreeSpec(gaps, gens, parse_angle(doc.get("root_angle", "dirichlet")))


def tree_period(doc: dict) -> tuple[int, int] | None:
    period = doc.get("period")
    if period is None:
        return None
    if len(period) != 2:
        raise SpecValidationError("period must be [preperiod, period]")
    return int(period[0]), int(period[1])


def parse_halfline(doc: dict) -> HalflineSystem:
    if not isinstance(doc, dict):
        raise SpecValidationError("halfline spec must be a JSON object")
    origin = float(parse_number(doc.get("origin", 0)))
    left = parse_angle(doc.get("left_boundary", "dirichlet"))
    if "cell" in doc:
        cell = doc["cell"]
        pre = doc.get("preperiod", {})
        return HalflineSystem.periodic(
            [float(parse_number(g)) for g in _require(cell, "gaps")],
            [parse_interface_coupling(c) for c in _require(cell, "couplings")],
            int(doc.get("n_cells", 2)),
            origin=origin,
            left_boundary=left,
            preperiod_gaps=[float(parse_number(g)) for g in pre.get("gaps", [])],
            preperiod_couplings=[parse_interface_coupling(c) for c in pre.get("couplings", [])],
        )
    points = [float(parse_number(p)) for p in doc.get("points", [])]
    cps = [parse_interface_coupling(c) for c in doc.get("couplings", [])]
    hint = doc.get("period_hint")
    if hint is not None:
        hint = (int(hint[0]), int(hint[1]))
    return HalflineSystem(origin, points, cps, left, hint)


def is_tree_doc(doc: dict) -> bool:
    return isinstance(doc, dict) and "generations" in doc


# -- output -------------------------------------------------------------------

def fmt_float(x: float) -> str:
    x = float(x)
    if x == 0:
        return "0"
    if not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return format(x, ".17g")


def _to_json(obj: Any) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, (float, Fraction)):
        x = float(obj)
        if not math.isfinite(x):
            return json.dumps(fmt_float(x))
        return fmt_float(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_to_json(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return _to_json(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Deterministic JSON: keys in insertion order, floats with 17 significant digits."""
    return _to_json(obj) + "\n"


def rows_to_csv(rows: Sequence[dict], columns: Sequence[str] | None = None) -> str:
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for row in rows:
        out = []
        for col in columns:
            v = row.get(col)
            if isinstance(v, bool):
                out.append("true" if v else "false")
            elif isinstance(v, (float, Fraction)):
                out.append(fmt_float(v))
            elif v is None:
                out.append("")
            else:
                out.append(str(v))
        writer.writerow(out)
    return buf.getvalue()


def complex_obj(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def vertex_coupling_doc(c: VertexCoupling) -> dict:
    return {
        "alpha": _exact(c.alpha),
        "beta": _exact(c.beta),
        "gamma": {"re": _exact(c.gamma if isinstance(c.gamma, (int, Fraction)) else complex(c.gamma).real),
                  "im": 0 if isinstance(c.gamma, (int, Fraction)) else complex(c.gamma).imag},
        "b": c.b,
        "eigenphases": list(c.eigenphases),
    }


def _exact(x):
    """Rationals are written as strings so that they round-trip exactly."""
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return x


def tree_spec_doc(spec: RadialTreeSpec) -> dict:
    return {
        "gaps": [_exact(g) for g in spec.gaps],
        "generations": [vertex_coupling_doc(c) for c in spec.couplings],
        "root_angle": spec.root_angle,
    }
