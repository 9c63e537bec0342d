"""Builders for plain touching representations: corner cliques, unit paths,
apex vertices, strong products, edge deletion and cocktail-party graphs."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

from ..geometry import Box, Interval, cartesian_product
from ..graph import (
    Coloring,
    ColoringKind,
    Graph,
    GraphError,
    add_apex,
    cocktail_party_graph,
    complete_graph,
    edge_subgraph,
    path_graph,
    strong_product_graph,
    verify_coloring,
)
from ..representation import CertificateError, TouchingRep, verify_touching_rep

NEG = Interval(Fraction(-1), Fraction(0))
POS = Interval(Fraction(0), Fraction(1))


def _checked(r: TouchingRep, what: str, strict: bool) -> TouchingRep:
    if strict:
        rep = verify_touching_rep(r, require_comparable=True)
        if not rep.ok:
            raise CertificateError(f"{what} produced an invalid certificate", rep)
    return r


def _require_comparable_rep(r: TouchingRep, what: str) -> None:
    rep = verify_touching_rep(r, require_comparable=True)
    if not rep.ok:
        raise CertificateError(f"{what}: input is not a comparable touching representation", rep)


def corner_clique(d: int) -> TouchingRep:
    """K_{2^d} as the 2^d unit cubes sharing the origin; vertex bits pick [0,1] (1) or [-1,0] (0)."""
    if d < 1:
        raise GraphError("dimension must be at least 1")
    boxes = [Box(tuple(POS if (v >> i) & 1 else NEG for i in range(d))) for v in range(2 ** d)]
    return TouchingRep(complete_graph(2 ** d), d, boxes)


def unit_rep_clique(m: int, strict: bool = True) -> TouchingRep:
    if m < 1:
        raise GraphError("clique size must be positive")
    d = max(1, math.ceil(math.log2(m)))
    full = corner_clique(d)
    return _checked(TouchingRep(complete_graph(m), d, full.boxes[:m]), "unit_rep_clique", strict)


def unit_rep_path(n: int, strict: bool = True) -> TouchingRep:
    if n < 1:
        raise GraphError("path length must be positive")
    boxes = [Box((Interval(Fraction(i), Fraction(i + 1)),)) for i in range(n)]
    return _checked(TouchingRep(path_graph(n), 1, boxes), "unit_rep_path", strict)


def apex_add(r: TouchingRep, neighbors: Iterable[int], strict: bool = True) -> TouchingRep:
    """Add vertex ``r.n`` adjacent to ``neighbors`` using one extra (leading) axis."""
    nbrs = set(neighbors)
    if not nbrs <= set(range(r.n)):
        raise GraphError("apex neighbours must be existing vertices")
    if strict:
        _require_comparable_rep(r, "apex_add")
    m = max((abs(x) for b in r.boxes for s in b.sides for x in (s.lo, s.hi)), default=Fraction(0)) + 1
    near = Interval(Fraction(0), Fraction(1))
    far = Interval(Fraction(1, 2), Fraction(3, 2))
    boxes = [cartesian_product(near if u in nbrs else far, b) for u, b in enumerate(r.boxes)]
    boxes.append(Box((NEG,) + tuple(Interval(-m, m) for _ in range(r.dim))))
    return _checked(TouchingRep(add_apex(r.graph, nbrs), r.dim + 1, boxes), "apex_add", strict)


def is_unit_hypercube_rep(r: TouchingRep) -> bool:
    return all(length == 1 for b in r.boxes for length in b.lengths)


def strong_product(left: TouchingRep, right: TouchingRep, strict: bool = True) -> TouchingRep:
    """Representation of ``left.graph`` ⊠ ``right.graph``; vertex (u, v) gets id ``u * right.n + v``."""
    if not is_unit_hypercube_rep(right):
        raise CertificateError("right factor must consist of unit hypercubes")
    if strict:
        _require_comparable_rep(left, "strong_product (left)")
        _require_comparable_rep(right, "strong_product (right)")
    boxes = [cartesian_product(a, b) for a in left.boxes for b in right.boxes]
    g = strong_product_graph(left.graph, right.graph)
    return _checked(TouchingRep(g, left.dim + right.dim, boxes), "strong_product", strict)


def _color_ranks(c: Coloring) -> dict[int, int]:
    rank = {col: i + 1 for i, col in enumerate(c.palette())}
    return {v: rank[col] for v, col in c.colors.items()}


def subgraph_extend(r: TouchingRep, keep: Iterable[Sequence[int]], coloring: Coloring,
                    strict: bool = True) -> TouchingRep:
    """Representation of the spanning subgraph with edge set ``keep``.

    Adds one axis per pair of colours of the star colouring; the added
    intervals separate exactly the deleted edges.
    """
    g_full = r.graph
    g = edge_subgraph(g_full, keep)
    report = verify_coloring(g_full, coloring, ColoringKind.STAR)
    if not report.ok:
        raise CertificateError(f"coloring is not a star coloring of the host graph: "
                               f"{(report.proper_violations + report.star_violations + report.missing)[:3]}")
    if strict:
        _require_comparable_rep(r, "subgraph_extend")
    col = _color_ranks(coloring)
    c = max(col.values(), default=0)
    deleted = g_full.edges - g.edges
    # members[(i, j)] = vertices of colour i with a deleted edge to colour j
    members: dict[tuple[int, int], set[int]] = {}
    for u, v in deleted:
        members.setdefault((col[u], col[v]), set()).add(u)
        members.setdefault((col[v], col[u]), set()).add(v)
    up = Interval(Fraction(1, 3), Fraction(4, 3))
    down = Interval(Fraction(-4, 3), Fraction(-1, 3))
    mid = Interval(Fraction(-1, 2), Fraction(1, 2))
    pairs = list(itertools.combinations(range(1, c + 1), 2))
    boxes = []
    for v, b in enumerate(r.boxes):
        extra = []
        for i, j in pairs:
            if v in members.get((i, j), ()):
                extra.append(up)
            elif v in members.get((j, i), ()):
                extra.append(down)
            else:
                extra.append(mid)
        boxes.append(Box(b.sides + tuple(extra)))
    return _checked(TouchingRep(g, r.dim + len(pairs), boxes), "subgraph_extend", strict)


def cocktail_party(n: int, strict: bool = True) -> TouchingRep:
    """K_{2n} minus a perfect matching by unit hypercubes in R^n; vertex (i, s) has id 2i+s."""
    if n < 1:
        raise GraphError("n must be positive")
    far = Interval(Fraction(1), Fraction(2))
    boxes = []
    for v in range(2 * n):
        i, s = divmod(v, 2)
        boxes.append(Box(tuple((far if s else NEG) if a == i else POS for a in range(n))))
    return _checked(TouchingRep(cocktail_party_graph(n), n, boxes), "cocktail_party", strict)
