"""JSON reading and writing for graphs, plans, decompositions and certificates.

Rationals are written as canonical ``"p/q"`` strings (``"p"`` for integers).
Readers are strict by default: unknown fields raise :class:`FormatError`;
with ``strict=False`` they only emit a warning.
"""

from __future__ import annotations

import json
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable

from .geometry import Box, GeometryError, Interval, format_rational, parse_rational
from .graph import Graph, GraphError, KTreePlan, TreeDecomp
from .representation import Ball, CsRep, EnvelopeRep, TouchingRep


class FormatError(ValueError):
    """Malformed certificate file; the message names the offending field."""


def _fields(obj: Any, where: str, required: Iterable[str], optional: Iterable[str] = (),
            strict: bool = True) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    required, optional = set(required), set(optional)
    missing = required - set(obj)
    if missing:
        raise FormatError(f"{where}: missing field(s) {sorted(missing)}")
    extra = set(obj) - required - optional
    if extra:
        msg = f"{where}: unknown field(s) {sorted(extra)}"
        if strict:
            raise FormatError(msg)
        warnings.warn(msg, stacklevel=3)


def _rational(x: Any, where: str) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise FormatError(f"{where}: expected a rational string, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    try:
        return parse_rational(x)
    except GeometryError as e:
        raise FormatError(f"{where}: {e}") from None


def _int(x: Any, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise FormatError(f"{where}: expected an integer, got {x!r}")
    return x


def _r(x: Fraction) -> str:
    return format_rational(x)


# --- graphs, plans, decompositions ----------------------------------------

def graph_to_json(g: Graph) -> dict:
    return g.to_json()


def graph_from_json(obj: Any, where: str = "graph", strict: bool = True) -> Graph:
    _fields(obj, where, ["n", "edges"], strict=strict)
    n = _int(obj["n"], f"{where}.n")
    edges = []
    for i, e in enumerate(obj["edges"]):
        if not isinstance(e, list) or len(e) != 2:
            raise FormatError(f"{where}.edges[{i}]: expected a pair")
        edges.append((_int(e[0], f"{where}.edges[{i}][0]"), _int(e[1], f"{where}.edges[{i}][1]")))
    try:
        return Graph(n, edges)
    except GraphError as e:
        raise FormatError(f"{where}: {e}") from None


def plan_from_json(obj: Any, strict: bool = True) -> KTreePlan:
    _fields(obj, "plan", ["k", "base", "steps"], strict=strict)
    for i, s in enumerate(obj["steps"]):
        _fields(s, f"plan.steps[{i}]", ["clique", "vertex"], strict=strict)
    return KTreePlan.from_json(obj)


def treedecomp_from_json(obj: Any, strict: bool = True) -> TreeDecomp:
    _fields(obj, "decomposition", ["nodes", "parent", "bags"], strict=strict)
    nodes = list(obj["nodes"])
    by_str = {str(x): x for x in nodes}

    def node(key, where):
        if str(key) not in by_str:
            raise FormatError(f"{where}: unknown node {key!r}")
        return by_str[str(key)]

    parent = {}
    for key, p in obj["parent"].items():
        parent[node(key, "decomposition.parent")] = None if p is None else node(p, f"decomposition.parent.{key}")
    bags = {node(key, "decomposition.bags"): frozenset(_int(v, f"decomposition.bags.{key}") for v in vs)
            for key, vs in obj["bags"].items()}
    for x in nodes:
        parent.setdefault(x, None)
        bags.setdefault(x, frozenset())
    return TreeDecomp(nodes, parent, bags)


# --- boxes ----------------------------------------------------------------

def box_to_json(b: Box) -> list:
    return [[_r(s.lo), _r(s.hi)] for s in b.sides]


def box_from_json(obj: Any, where: str) -> Box:
    if not isinstance(obj, list) or not obj:
        raise FormatError(f"{where}: expected a non-empty list of [lo, hi] pairs")
    sides = []
    for j, pair in enumerate(obj):
        if not isinstance(pair, list) or len(pair) != 2:
            raise FormatError(f"{where}[{j}]: expected [lo, hi]")
        lo, hi = _rational(pair[0], f"{where}[{j}][0]"), _rational(pair[1], f"{where}[{j}][1]")
        try:
            sides.append(Interval(lo, hi))
        except GeometryError as e:
            raise FormatError(f"{where}[{j}]: {e}") from None
    return Box(tuple(sides))


def _vertex_map(obj: Any, n: int, where: str, parse) -> list:
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object keyed by vertex id")
    keys = set(obj)
    want = {str(v) for v in range(n)}
    if keys != want:
        raise FormatError(f"{where}: keys must be exactly the vertex ids 0..{n - 1}")
    return [parse(obj[str(v)], f"{where}.{v}") for v in range(n)]


# --- certificates ---------------------------------------------------------

def touching_to_json(r: TouchingRep) -> dict:
    return {"graph": graph_to_json(r.graph), "dim": r.dim,
            "boxes": {str(v): box_to_json(b) for v, b in enumerate(r.boxes)}}


def _touching_parts(obj: dict, strict: bool) -> TouchingRep:
    g = graph_from_json(obj["graph"], strict=strict)
    d = _int(obj["dim"], "dim")
    boxes = _vertex_map(obj["boxes"], g.n, "boxes", box_from_json)
    try:
        return TouchingRep(g, d, tuple(boxes))
    except GeometryError as e:
        raise FormatError(f"boxes: {e}") from None


def touching_from_json(obj: Any, strict: bool = True) -> TouchingRep:
    _fields(obj, "certificate", ["graph", "dim", "boxes"], strict=strict)
    return _touching_parts(obj, strict)


def _clique_key(C) -> tuple:
    return (len(C), sorted(C))


def cs_to_json(c: CsRep) -> dict:
    out = touching_to_json(c.base)
    out["root"] = list(c.root)
    out["root_dims"] = {str(u): c.root_dims[u] for u in c.root}
    out["epsilon"] = _r(c.epsilon)
    out["clique_points"] = [{"clique": sorted(C), "point": [_r(x) for x in c.clique_points[C]]}
                            for C in sorted(c.clique_points, key=_clique_key)]
    return out


def cs_from_json(obj: Any, strict: bool = True) -> CsRep:
    _fields(obj, "certificate", ["graph", "dim", "boxes", "root", "root_dims", "epsilon", "clique_points"],
            strict=strict)
    base = _touching_parts(obj, strict)
    root = tuple(_int(u, f"root[{i}]") for i, u in enumerate(obj["root"]))
    if not isinstance(obj["root_dims"], dict):
        raise FormatError("root_dims: expected an object")
    try:
        root_dims = {int(k): _int(v, f"root_dims.{k}") for k, v in obj["root_dims"].items()}
    except ValueError:
        raise FormatError("root_dims: keys must be vertex ids") from None
    eps = _rational(obj["epsilon"], "epsilon")
    points = {}
    for i, item in enumerate(obj["clique_points"]):
        where = f"clique_points[{i}]"
        _fields(item, where, ["clique", "point"], strict=strict)
        C = frozenset(_int(v, f"{where}.clique") for v in item["clique"])
        if C in points:
            raise FormatError(f"{where}: duplicate clique {sorted(C)}")
        points[C] = tuple(_rational(x, f"{where}.point[{j}]") for j, x in enumerate(item["point"]))
    return CsRep(base, root, root_dims, points, eps)


def _inner_to_json(x) -> Any:
    if isinstance(x, Ball):
        return {"ball": {"center": [_r(c) for c in x.center], "radius_sq": _r(x.radius_sq)}}
    return box_to_json(x)


def _inner_from_json(obj: Any, where: str, strict: bool = True):
    if isinstance(obj, dict):
        _fields(obj, where, ["ball"], strict=strict)
        ball = obj["ball"]
        _fields(ball, f"{where}.ball", ["center", "radius_sq"], strict=strict)
        center = [_rational(c, f"{where}.ball.center[{j}]") for j, c in enumerate(ball["center"])]
        try:
            return Ball(tuple(center), _rational(ball["radius_sq"], f"{where}.ball.radius_sq"))
        except GeometryError as e:
            raise FormatError(f"{where}: {e}") from None
    return box_from_json(obj, where)


def envelope_to_json(e: EnvelopeRep) -> dict:
    return {"graph": graph_to_json(e.graph), "dim": e.dim, "order": list(e.order),
            "inner": {str(v): _inner_to_json(x) for v, x in enumerate(e.inner)},
            "outer": {str(v): box_to_json(b) for v, b in enumerate(e.outer)},
            "s": e.s, "t": e.t}


def envelope_from_json(obj: Any, strict: bool = True) -> EnvelopeRep:
    _fields(obj, "certificate", ["graph", "dim", "order", "inner", "outer", "s", "t"], strict=strict)
    g = graph_from_json(obj["graph"], strict=strict)
    inner = _vertex_map(obj["inner"], g.n, "inner", lambda o, w: _inner_from_json(o, w, strict))
    outer = _vertex_map(obj["outer"], g.n, "outer", box_from_json)
    try:
        return EnvelopeRep(g, _int(obj["dim"], "dim"), tuple(_int(v, "order") for v in obj["order"]),
                           tuple(inner), tuple(outer), _int(obj["s"], "s"), _int(obj["t"], "t"))
    except GeometryError as e:
        raise FormatError(str(e)) from None


def certificate_kind(obj: Any) -> str:
    if not isinstance(obj, dict):
        raise FormatError("certificate: expected an object")
    if "order" in obj or "inner" in obj:
        return "envelope"
    if "clique_points" in obj or "root" in obj:
        return "cs"
    return "touching"


def certificate_from_json(obj: Any, strict: bool = True):
    kind = certificate_kind(obj)
    if kind == "envelope":
        return envelope_from_json(obj, strict)
    if kind == "cs":
        return cs_from_json(obj, strict)
    return touching_from_json(obj, strict)


def certificate_to_json(c) -> dict:
    if isinstance(c, EnvelopeRep):
        return envelope_to_json(c)
    if isinstance(c, CsRep):
        return cs_to_json(c)
    if isinstance(c, TouchingRep):
        return touching_to_json(c)
    raise TypeError(f"not a certificate: {type(c).__name__}")


# --- files ----------------------------------------------------------------

def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=1) + "\n"


def loads(text: str, source: str = "<string>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}") from None


def read_json(path: str | Path) -> Any:
    path = Path(path)
    return loads(path.read_text(), str(path))


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj))


def read_certificate(path: str | Path, strict: bool = True):
    return certificate_from_json(read_json(path), strict)


def write_certificate(path: str | Path, c) -> None:
    write_json(path, certificate_to_json(c))
