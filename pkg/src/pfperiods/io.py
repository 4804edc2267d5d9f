"""JSON schemas and a deterministic serializer.

Complex numbers are two-element arrays [re, im] everywhere.  Floats are
written with 17 significant digits so that output round-trips exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .curve import CurveSpec
from .errors import InputError
from .oracle import Cycle
from .transport import CircleSegment, LineSegment, ModuliPath, line


# ------------------------------------------------------------------ parsing

def parse_complex(v, what="value") -> complex:
    if isinstance(v, bool):
        raise InputError(f"{what}: expected a number or [re, im], got {v!r}")
    if isinstance(v, (int, float)):
        z = complex(v)
    elif isinstance(v, (list, tuple)) and len(v) == 2 and all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        z = complex(v[0], v[1])
    else:
        raise InputError(f"{what}: expected [re, im], got {v!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f"{what}: non-finite number")
    return z


def _require(obj, key, what):
    if not isinstance(obj, dict) or key not in obj:
        raise InputError(f"{what}: missing field {key!r}")
    return obj[key]


def parse_curve(obj) -> CurveSpec:
    """{"a": [[re,im]x3], "h1": [re,im], "h2": [re,im]}."""
    a = _require(obj, "a", "curve")
    if not isinstance(a, list) or len(a) != 3:
        raise InputError("curve.a must list exactly three complex numbers")
    a = [parse_complex(x, "curve.a") for x in a]
    h1 = parse_complex(_require(obj, "h1", "curve"), "curve.h1")
    h2 = parse_complex(_require(obj, "h2", "curve"), "curve.h2")
    return CurveSpec(tuple(a), h1, h2)


def _int(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise InputError(f"{what}: expected an integer, got {v!r}")
    return int(v)


def parse_cycle(obj) -> Cycle:
    """branch_pair {"pair": [i, j], "winding", "sheet"} or big_loop {"radius", "sheet"}."""
    kind = _require(obj, "kind", "cycle")
    sheet = _int(obj.get("sheet", 1), "cycle.sheet")
    winding = _int(obj.get("winding", 1), "cycle.winding")
    if sheet not in (1, -1):
        raise InputError("cycle.sheet must be +1 or -1")
    if kind == "branch_pair":
        pair = _require(obj, "pair", "cycle")
        if not isinstance(pair, list) or len(pair) != 2:
            raise InputError("cycle.pair must be [i, j]")
        i, j = (_int(x, "cycle.pair") for x in pair)
        if i == j or not (1 <= i <= 6 and 1 <= j <= 6):
            raise InputError(f"cycle.pair must be two distinct indices in 1..6, got {pair}")
        xi = obj.get("xi")
        return Cycle.branch_pair(i, j, winding=winding, sheet=sheet,
                                 xi=None if xi is None else float(xi))
    if kind == "big_loop":
        r = _require(obj, "radius", "cycle")
        if isinstance(r, bool) or not isinstance(r, (int, float)) or not r > 0:
            raise InputError("cycle.radius must be a positive number")
        return Cycle.big_loop(float(r), sheet=sheet, winding=winding)
    raise InputError(f"unknown cycle kind {kind!r}")


def _point(v, dim, what):
    if dim == 1 and not (isinstance(v, list) and len(v) == 1):
        return np.array([parse_complex(v, what)])
    if not isinstance(v, list) or len(v) != dim:
        raise InputError(f"{what}: expected {dim} complex coordinates")
    return np.array([parse_complex(x, what) for x in v])


def parse_path(obj) -> ModuliPath:
    space = obj.get("space", "h") if isinstance(obj, dict) else None
    if space not in ("h", "e"):
        raise InputError("path.space must be 'h' or 'e'")
    dim = 2 if space == "h" else 1
    index = _int(_require(obj, "index", "path"), "path.index") if space == "e" else None
    segs_in = _require(obj, "segments", "path")
    if not isinstance(segs_in, list) or not segs_in:
        raise InputError("path.segments must be a non-empty list")
    segs = []
    for n, s in enumerate(segs_in):
        what = f"path.segments[{n}]"
        kind = _require(s, "kind", what)
        if kind == "line":
            segs.append(line(_point(_require(s, "from", what), dim, what),
                             _point(_require(s, "to", what), dim, what)))
        elif kind == "circle":
            r = _require(s, "radius", what)
            if isinstance(r, bool) or not isinstance(r, (int, float)) or not r > 0:
                raise InputError(f"{what}.radius must be positive")
            direction = s.get("direction")
            segs.append(CircleSegment(
                _point(_require(s, "center", what), dim, what), float(r),
                _int(s.get("turns", 1), f"{what}.turns"),
                None if direction is None else _point(direction, dim, what),
                float(s.get("phase", 0.0))))
        else:
            raise InputError(f"{what}: unknown segment kind {kind!r}")
    try:
        return ModuliPath(space, tuple(segs), bool(obj.get("closed", False)), index)
    except ValueError as exc:
        raise InputError(f"path: {exc}") from exc


def load_document(source: str | None, stdin=None):
    """Read JSON from a file path, '-' (stdin) or an inline JSON string."""
    if source is None:
        return None
    try:
        if source == "-":
            import sys
            text = (stdin or sys.stdin).read()
        elif source.lstrip().startswith(("{", "[")):
            text = source
        else:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read input: {exc}") from exc


# --------------------------------------------------------------- serializing

def to_jsonable(x):
    """Convert numpy/complex/dataclass-ish values into plain JSON structures."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, Cycle):
        return cycle_to_json(x)
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "null"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            return "null"
        s = format(v, ".17g")
        if "e" not in s and "." not in s and "n" not in s:
            s += ".0"
        return s
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_fmt(x)}" for k, x in v.items()) + "}"
    raise TypeError(type(v))


def dumps(obj) -> str:
    """Deterministic JSON with 17 significant digits for every float."""
    return _fmt(to_jsonable(obj))


def cycle_to_json(c: Cycle) -> dict:
    if c.kind == "branch_pair":
        return {"kind": "branch_pair", "pair": list(c.pair), "winding": c.winding,
                "sheet": c.sheet}
    if c.kind == "big_loop":
        return {"kind": "big_loop", "radius": c.radius, "winding": c.winding, "sheet": c.sheet}
    return {"kind": "explicit_contour", "arcs": len(c.arcs), "sheet": c.sheet}


def curve_to_json(c: CurveSpec) -> dict:
    return {"a": list(c.a), "h1": c.h1, "h2": c.h2}


def csv_rows(header, rows) -> str:
    """Rows of real scalars; complex values must be split into re/im columns."""
    out = [",".join(header)]
    for r in rows:
        cells = [to_jsonable(v) for v in r]
        if any(isinstance(c, (list, dict)) for c in cells):
            raise TypeError("CSV cells must be real scalars")
        out.append(",".join(_fmt(c) for c in cells))
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class Fixture:
    """The bundled default curve a = (4, 5, 6), h = (-7, 6)."""

    a: tuple = (4.0, 5.0, 6.0)
    h1: float = -7.0
    h2: float = 6.0

    def curve(self) -> CurveSpec:
        return CurveSpec(self.a, self.h1, self.h2)


DEFAULT_FIXTURE = Fixture()
