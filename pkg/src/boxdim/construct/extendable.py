"""Builders for clique-sum extendable certificates (:class:`CsRep`).

All scale factors are exact rationals; the ones that accumulate through long
folds are rounded down to powers of two to keep denominators small.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Mapping, Sequence

from ..geometry import Box, Interval
from ..graph import (
    Coloring,
    ColoringKind,
    Graph,
    GraphError,
    KTreePlan,
    TreeDecomp,
    complete_graph,
    enumerate_cliques,
    ktree_embed,
    ktree_realize,
    verify_coloring,
)
from ..representation import (
    CertificateError,
    CsRep,
    TouchingRep,
    facet_axis,
    max_valid_epsilon,
    verify_cs_rep,
    verify_touching_rep,
)

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def floor_pow2(x: Fraction) -> Fraction:
    """Largest power of two not exceeding the positive rational ``x``."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("floor_pow2 needs a positive argument")
    e = x.numerator.bit_length() - x.denominator.bit_length()
    p = Fraction(2) ** e
    while p > x:
        p /= 2
    while p * 2 <= x:
        p *= 2
    return p


def root_box(d: int, axis: int) -> Box:
    return Box(tuple(Interval(Fraction(-1), Fraction(0)) if i == axis else Interval(Fraction(0), Fraction(1))
                     for i in range(d)))


def _checked(c: CsRep, what: str, strict: bool) -> CsRep:
    if strict:
        rep = verify_cs_rep(c)
        if not rep.ok:
            raise CertificateError(f"{what} produced an invalid certificate", rep)
    return c


def relabel(c: CsRep, new_of_old: Sequence[int]) -> CsRep:
    """Rename vertex ``v`` to ``new_of_old[v]``."""
    n = c.graph.n
    if sorted(new_of_old) != list(range(n)):
        raise GraphError("relabelling must be a permutation")
    boxes = [None] * n
    for old, new in enumerate(new_of_old):
        boxes[new] = c.boxes[old]
    g = Graph(n, [(new_of_old[u], new_of_old[v]) for u, v in c.graph.edges])
    return CsRep(
        TouchingRep(g, c.dim, tuple(boxes)),
        tuple(new_of_old[u] for u in c.root),
        {new_of_old[u]: a for u, a in c.root_dims.items()},
        {frozenset(new_of_old[u] for u in C): p for C, p in c.clique_points.items()},
        c.epsilon,
    )


def complete_cert(dim: int, root_size: int, with_extra: bool) -> CsRep:
    """Certificate for a complete graph: ``root_size`` root vertices plus optionally one small cube.

    Root vertex ``i`` uses axis ``i``; the extra vertex (id ``root_size``) is
    ``[0,1/2]^dim`` and touches its cliques on the last axis.
    """
    if root_size > dim - 1:
        raise GraphError("not enough axes for the requested clique")
    n = root_size + (1 if with_extra else 0)
    boxes = [root_box(dim, i) for i in range(root_size)]
    if with_extra:
        boxes.append(Box.cube([0] * dim, HALF))
    g = complete_graph(n)
    points = {}
    for C in enumerate_cliques(g):
        p = [Fraction(0) if i in C else QUARTER for i in range(root_size)]
        p += [QUARTER] * (dim - 1 - root_size)
        p.append(HALF if root_size in C else Fraction(3, 4))
        points[C] = tuple(p)
    return CsRep(TouchingRep(g, dim, tuple(boxes)), tuple(range(root_size)),
                 {i: i for i in range(root_size)}, points, Fraction(1, 8))


def ktree_base_cert(k: int) -> CsRep:
    """K_{k+1} in R^{k+1} with root clique {0..k-1} and vertex k the cube [0,1/2]^{k+1}."""
    if k < 0:
        raise GraphError("k must be non-negative")
    return complete_cert(k + 1, k, True)


def pad_dimension(c: CsRep, times: int = 1) -> CsRep:
    """Append ``times`` axes: [0,1] for root boxes, [0,1/2] otherwise, clique points at 1/4."""
    for _ in range(times):
        rootset = set(c.root)
        boxes = tuple(Box(b.sides + ((Interval(Fraction(0), Fraction(1)) if v in rootset
                                      else Interval(Fraction(0), HALF)),))
                      for v, b in enumerate(c.boxes))
        points = {C: p + (QUARTER,) for C, p in c.clique_points.items()}
        c = CsRep(TouchingRep(c.graph, c.dim + 1, boxes), c.root, dict(c.root_dims),
                  points, min(c.epsilon, QUARTER))
    return c


def _min_side(boxes) -> Fraction:
    return min((length for b in boxes for length in b.lengths), default=Fraction(1))


def _clique_sum(c1: CsRep, glue: Sequence[int], c2: CsRep, matching: Mapping[int, int],
                min_side1: Fraction | None = None) -> tuple[CsRep, dict[int, int], Fraction]:
    """Unverified gluing; returns the certificate, the id map for ``c2``'s vertices and the new minimum side."""
    d = max(c1.dim, c2.dim)
    if c1.dim < d:
        c1 = pad_dimension(c1, d - c1.dim)
        min_side1 = None
    if c2.dim < d:
        c2 = pad_dimension(c2, d - c2.dim)
    glue = tuple(glue)
    C1 = frozenset(glue)
    if len(C1) != len(glue) or len(glue) != len(c2.root):
        raise CertificateError("glue clique and root clique must have the same size")
    if set(matching) != C1 or set(matching.values()) != set(c2.root):
        raise CertificateError("matching must be a bijection from the glue clique onto the root clique")
    if C1 not in c1.clique_points:
        raise CertificateError(f"glue set {sorted(C1)} is not a clique of the host graph")
    p1 = c1.clique_points[C1]

    # sigma[a] = axis of c2 feeding axis a of the result
    sigma: list[int | None] = [None] * d
    for v in sorted(glue):
        a = facet_axis(c1, C1, v)
        if sigma[a] is not None:
            raise CertificateError(f"two glue vertices touch clique {sorted(C1)} on axis {a}")
        sigma[a] = c2.root_dims[matching[v]]
    rest = iter(sorted(set(range(d)) - {s for s in sigma if s is not None}))
    sigma = [next(rest) if s is None else s for s in sigma]

    if min_side1 is None:
        min_side1 = _min_side(c1.boxes)
    eps = floor_pow2(min(c1.epsilon, (1 - max(p1, default=Fraction(0))) / 2, min_side1))

    inv = {matching[v]: v for v in glue}
    new_id: dict[int, int] = {}
    nxt = c1.graph.n
    boxes = list(c1.boxes)
    small = min_side1
    for u in range(c2.graph.n):
        if u in inv:
            new_id[u] = inv[u]
            continue
        new_id[u] = nxt
        nxt += 1
        src = c2.boxes[u].sides
        sides = tuple(Interval(p1[a] + eps * src[sigma[a]].lo, p1[a] + eps * src[sigma[a]].hi)
                      for a in range(d))
        box = Box(sides)
        small = min(small, min(box.lengths))
        boxes.append(box)
    edges = list(c1.graph.edges)
    edges += [(new_id[a], new_id[b]) for a, b in c2.graph.edges if not (a in inv and b in inv)]
    g = Graph(nxt, edges)

    points = {C: p for C, p in c1.clique_points.items() if not C <= C1}
    ratio = c2.epsilon
    for C, p2 in c2.clique_points.items():
        points[frozenset(new_id[u] for u in C)] = tuple(p1[a] + eps * p2[sigma[a]] for a in range(d))
        ratio = min(ratio, min(1 - x for x in p2))
    new_eps = floor_pow2(eps * ratio)
    cert = CsRep(TouchingRep(g, d, tuple(boxes)), c1.root, dict(c1.root_dims), points, new_eps)
    return cert, new_id, small


def clique_sum(c1: CsRep, glue: Sequence[int], c2: CsRep, matching: Mapping[int, int],
               strict: bool = True) -> tuple[CsRep, dict[int, int]]:
    """Full clique-sum of ``c1`` (at clique ``glue``) and ``c2`` (at its root clique).

    Vertices of ``c1`` keep their ids; non-root vertices of ``c2`` are appended
    in increasing id order. Returns the certificate and the id map for ``c2``.
    """
    cert, new_id, _ = _clique_sum(c1, glue, c2, matching)
    return _checked(cert, "clique_sum", strict), new_id


def promote_root(c: CsRep, graph: Graph, root: Sequence[int], strict: bool = True) -> CsRep:
    """Turn an empty-root certificate of ``graph - root`` into a certificate of ``graph`` rooted at ``root``.

    The vertices of ``graph`` outside ``root`` correspond, in increasing order,
    to the vertices ``0..`` of ``c``.
    """
    root = tuple(root)
    rootset = set(root)
    if len(rootset) != len(root) or not graph.is_clique(root):
        raise CertificateError("root must be a clique of the graph")
    if c.root:
        raise CertificateError("promote_root expects a certificate with an empty root clique")
    others = [v for v in range(graph.n) if v not in rootset]
    sub, index = graph.induced(others)
    if sub != c.graph:
        raise CertificateError("certificate graph does not match graph minus the root clique")
    k = len(root)
    if k == 0:
        return c
    d = k + c.dim
    big = max((abs(x) for b in c.boxes for s in b.sides for x in (s.lo, s.hi)), default=Fraction(0))
    alpha = Fraction(1) if big == 0 else min(Fraction(1), floor_pow2(1 / (2 * big)))
    near, far = Interval(Fraction(0), HALF), Interval(QUARTER, Fraction(3, 4))
    boxes: list[Box | None] = [None] * graph.n
    for i, v in enumerate(root):
        boxes[v] = root_box(d, i)
    for u in others:
        lead = tuple(near if graph.has_edge(u, r) else far for r in root)
        trail = tuple(Interval(alpha * s.lo, alpha * s.hi) for s in c.boxes[index[u]].sides)
        boxes[u] = Box(lead + trail)
    points = {}
    for C in enumerate_cliques(graph):
        rest = frozenset(index[v] for v in C if v not in rootset)
        lead = tuple(Fraction(0) if r in C else QUARTER for r in root)
        points[C] = lead + tuple(alpha * x for x in c.clique_points[rest])
    eps = floor_pow2(min(alpha * c.epsilon, Fraction(1, 8)))
    cert = CsRep(TouchingRep(graph, d, tuple(boxes)), root, {v: i for i, v in enumerate(root)},
                 points, eps)
    return _checked(cert, "promote_root", strict)


def make_cs_extendable(r: TouchingRep, coloring: Coloring, strict: bool = True) -> CsRep:
    """Empty-root certificate in ``r.dim + (number of colours)`` dimensions; the result is fully touching."""
    report = verify_coloring(r.graph, coloring, ColoringKind.PROPER)
    if not report.ok:
        raise CertificateError("coloring is not a proper coloring")
    if strict:
        rep = verify_touching_rep(r, require_comparable=True)
        if not rep.ok:
            raise CertificateError("make_cs_extendable: input is not a comparable touching representation", rep)
    g, d, n = r.graph, r.dim, r.n
    coords = [x for b in r.boxes for s in b.sides for x in (s.lo, s.hi)]
    lo, hi = min(coords, default=Fraction(0)), max(coords, default=Fraction(1))
    scale = 1 / (hi - lo + 2)
    scaled = [[((s.lo - lo + 1) * scale, (s.hi - lo + 1) * scale) for s in b.sides] for b in r.boxes]

    # inflate by alpha: stays clear of the unit cube's boundary and keeps disjoint boxes disjoint
    limit = scale / 2
    for u, v in itertools.combinations(range(n), 2):
        if g.has_edge(u, v):
            continue
        sep = max(max(bv[0] - bu[1], bu[0] - bv[1]) for bu, bv in zip(scaled[u], scaled[v]))
        limit = min(limit, sep / 4)
    alpha = floor_pow2(limit)
    h1 = [[(a - alpha, b + alpha) for a, b in sides] for sides in scaled]

    cliques = sorted(enumerate_cliques(g), key=lambda C: (len(C), sorted(C)))
    centers, half = [], Fraction(1, 2)
    for C in cliques:
        if C:
            box = [(max(h1[v][j][0] for v in C), min(h1[v][j][1] for v in C)) for j in range(d)]
        else:
            box = [(Fraction(0), Fraction(1))] * d
        centers.append(tuple((a + b) / 2 for a, b in box))
        half = min(half, min((b - a) / 2 for a, b in box))
    axis0 = sorted({c[0] for c in centers})
    gap0 = min((b - a for a, b in zip(axis0, axis0[1:])), default=Fraction(1))
    delta = floor_pow2(min(gap0, half) / (len(cliques) + 1))

    rank = {col: i + 1 for i, col in enumerate(coloring.palette())}
    col = {v: rank[c] for v, c in coloring.colors.items()}
    chi = len(rank)
    low, mid_, high = (Interval(Fraction(1, 5), Fraction(3, 5)), Interval(Fraction(0), Fraction(2, 5)),
                       Interval(Fraction(2, 5), Fraction(4, 5)))
    boxes = []
    for v in range(n):
        lead = tuple(Interval(a, b) for a, b in h1[v])
        trail = tuple(low if col[v] < t else mid_ if col[v] == t else high for t in range(1, chi + 1))
        boxes.append(Box(lead + trail))
    points = {}
    for i, C in enumerate(cliques):
        used = {col[v] for v in C}
        lead = tuple(x + i * delta for x in centers[i])
        trail = tuple(Fraction(2, 5) if t in used else HALF for t in range(1, chi + 1))
        points[C] = lead + trail
    draft = CsRep(TouchingRep(g, d + chi, tuple(boxes)), (), {}, points, Fraction(1))
    eps = floor_pow2(max_valid_epsilon(draft))
    cert = CsRep(draft.base, (), {}, points, eps)
    return _checked(cert, "make_cs_extendable", strict)


def _ktree_fold(plan: KTreePlan) -> CsRep:
    ktree_realize(plan)
    k, base = plan.k, plan.base
    if len(base) == k + 1:
        cert = ktree_base_cert(k)
        root = tuple(base[:k])
    else:
        cert = complete_cert(k + 1, len(base), False)
        root = tuple(base)
    plan_of = list(base)
    cert_of = {v: i for i, v in enumerate(base)}
    template = ktree_base_cert(k)
    small = _min_side(cert.boxes)
    for clique, w in plan.steps:
        glue = tuple(cert_of[u] for u in clique)
        cert, new_id, small = _clique_sum(cert, glue, template, {g: i for i, g in enumerate(glue)}, small)
        cert_of[w] = new_id[k]
        plan_of.append(w)
    cert = relabel(cert, plan_of)
    if cert.root != root:
        raise AssertionError("root clique moved during the fold")
    return cert


def ktree_cs_rep(plan: KTreePlan, strict: bool = True) -> CsRep:
    """Certificate of the k-tree described by ``plan`` in R^{k+1}, rooted at the first k base vertices."""
    return _checked(_ktree_fold(plan), "ktree_cs_rep", strict)


def treewidth_rep(g: Graph, td: TreeDecomp, strict: bool = True) -> TouchingRep:
    """Comparable touching representation of ``g`` in R^{w+1}, w the width of ``td``.

    ``g`` is completed to a k-tree with an extra root clique; the hypercube
    representation of the k-tree minus that clique is then trimmed so that
    each non-edge of ``g`` loses its contact: the smaller box is pulled back on
    the axis where it meets the larger one.
    """
    plan, _ = ktree_embed(g, td)
    k = plan.k
    cert = _ktree_fold(plan)
    n = g.n
    boxes = [list(b.as_pairs()) for b in cert.boxes[:n]]
    size = []
    for b in cert.boxes[:n]:
        ls = set(b.lengths)
        if len(ls) != 1:
            raise AssertionError("k-tree fold produced a non-cube")
        size.append(ls.pop())
    deleted = sorted(e for e in cert.graph.edges if e[0] < n and e[1] < n and e not in g.edges)
    if deleted:
        distinct = sorted(set(size))
        budget = min([distinct[0]] + [b - a for a, b in zip(distinct, distinct[1:])])
        step = floor_pow2(budget / 4)
        done = set()
        for u, v in deleted:
            if size[u] == size[v]:
                raise CertificateError(f"vertices {u} and {v} have equal cubes; cannot separate")
            s, big = (u, v) if size[u] < size[v] else (v, u)
            bs, bb = cert.boxes[s], cert.boxes[big]
            for j in range(k + 1):
                if bs.sides[j].lo == bb.sides[j].hi:
                    key = (s, j, 0)
                    if key not in done:
                        done.add(key)
                        boxes[s][j] = (boxes[s][j][0] + step, boxes[s][j][1])
                    break
                if bs.sides[j].hi == bb.sides[j].lo:
                    key = (s, j, 1)
                    if key not in done:
                        done.add(key)
                        boxes[s][j] = (boxes[s][j][0], boxes[s][j][1] - step)
                    break
            else:
                raise AssertionError(f"boxes of {u} and {v} do not touch")
    r = TouchingRep(g, k + 1, tuple(Box.from_bounds(b) for b in boxes))
    if strict:
        rep = verify_touching_rep(r, require_comparable=True)
        if not rep.ok:
            raise CertificateError("treewidth_rep produced an invalid certificate", rep)
    return r
