"""Certificates for touching box representations and their exact verifiers.

Three certificate types are supported:

* :class:`TouchingRep` -- a box per vertex;
* :class:`CsRep` -- a touching representation extendable along clique-sums,
  carrying a root clique, root axes and a point per clique;
* :class:`EnvelopeRep` -- ordered inner/outer sets used by the fragility sampler.

Verifiers never raise on bad certificates; they return a :class:`Report`
listing every violation with a witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .geometry import (
    Box,
    BoxRelation,
    BoxTree,
    Comparability,
    GeometryError,
    box_comparable,
    box_relation,
    box_sqsubseteq_s,
    common_denominator,
    format_rational,
    scale_to_int,
    volume,
)
from .graph import Graph, enumerate_cliques, max_clique_size

Point = tuple[Fraction, ...]


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple
    detail: str = ""

    def as_dict(self) -> dict:
        return {"kind": self.kind, "witness": [_jsonable(w) for w in self.witness],
                "detail": self.detail}


def _jsonable(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, (frozenset, set)):
        return sorted(x)
    if isinstance(x, tuple):
        return [_jsonable(y) for y in x]
    return x


@dataclass
class Report:
    subject: str
    violations: list[Violation] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, *witness, detail: str = "") -> None:
        self.violations.append(Violation(kind, tuple(witness), detail))

    def extend(self, other: "Report", prefix: str = "") -> None:
        for v in other.violations:
            self.violations.append(Violation(prefix + v.kind, v.witness, v.detail))
        self.notes.extend(other.notes)

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def as_dict(self) -> dict:
        return {"subject": self.subject, "ok": self.ok,
                "violations": [v.as_dict() for v in self.violations], "notes": list(self.notes)}

    def __str__(self):
        head = f"{self.subject}: {'ok' if self.ok else f'{len(self.violations)} violation(s)'}"
        lines = [head] + [f"  {v.kind} {v.witness} {v.detail}".rstrip() for v in self.violations[:20]]
        return "\n".join(lines)


class CertificateError(ValueError):
    """A builder was asked to work on an invalid certificate or produced one."""

    def __init__(self, message: str, report: Report | None = None):
        super().__init__(message if report is None else f"{message}\n{report}")
        self.report = report


# --- types ----------------------------------------------------------------

@dataclass(frozen=True)
class TouchingRep:
    graph: Graph
    dim: int
    boxes: tuple[Box, ...]

    def __post_init__(self):
        boxes = tuple(self.boxes)
        if len(boxes) != self.graph.n:
            raise GeometryError(f"{len(boxes)} boxes for {self.graph.n} vertices")
        for v, b in enumerate(boxes):
            if b.dim != self.dim:
                raise GeometryError(f"box of vertex {v} has dimension {b.dim}, expected {self.dim}")
        object.__setattr__(self, "boxes", boxes)

    @property
    def n(self) -> int:
        return self.graph.n

    def volume_order(self) -> list[int]:
        """Vertices by non-increasing box volume, ties broken by id."""
        vols = [volume(b) for b in self.boxes]
        return sorted(range(self.n), key=lambda v: (-vols[v], v))

    def restrict(self, keep: Sequence[int]) -> "TouchingRep":
        """Induced representation on ``keep`` (relabelled in the given order)."""
        g, _ = self.graph.induced(keep)
        return TouchingRep(g, self.dim, tuple(self.boxes[v] for v in keep))


@dataclass(frozen=True)
class CsRep:
    """Touching representation with a root clique and clique points.

    ``root_dims[u]`` is the axis (0-based) on which root vertex ``u`` spans
    ``[-1, 0]``; ``clique_points`` maps every clique (a frozenset, including the
    empty one) to a point of ``[0, 1)^d``.
    """

    base: TouchingRep
    root: tuple[int, ...]
    root_dims: Mapping[int, int]
    clique_points: Mapping[frozenset, Point]
    epsilon: Fraction

    @property
    def graph(self) -> Graph:
        return self.base.graph

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def boxes(self) -> tuple[Box, ...]:
        return self.base.boxes


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball with rational centre and rational squared radius."""

    center: Point
    radius_sq: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(Fraction(c) for c in self.center))
        object.__setattr__(self, "radius_sq", Fraction(self.radius_sq))
        if self.radius_sq <= 0:
            raise GeometryError("ball radius must be positive")

    @property
    def dim(self) -> int:
        return len(self.center)

    def dist_sq_to_box(self, lo: Sequence[Fraction], hi: Sequence[Fraction]) -> Fraction:
        total = Fraction(0)
        for c, a, b in zip(self.center, lo, hi):
            if c < a:
                total += (a - c) ** 2
            elif c > b:
                total += (c - b) ** 2
        return total

    def meets_closed_box(self, lo, hi) -> bool:
        return self.dist_sq_to_box(lo, hi) <= self.radius_sq

    def meets_open_box(self, lo, hi) -> bool:
        return self.dist_sq_to_box(lo, hi) < self.radius_sq

    def inside_box(self, b: Box) -> bool:
        # ball within box iff every axis extent is; radius compared squared
        for c, s in zip(self.center, b.sides):
            if c - s.lo < 0 or s.hi - c < 0:
                return False
            if (c - s.lo) ** 2 < self.radius_sq or (s.hi - c) ** 2 < self.radius_sq:
                return False
        return True


@dataclass(frozen=True)
class EnvelopeRep:
    graph: Graph
    dim: int
    order: tuple[int, ...]
    inner: tuple[Box | Ball, ...]
    outer: tuple[Box, ...]
    s: int
    t: int

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        object.__setattr__(self, "inner", tuple(self.inner))
        object.__setattr__(self, "outer", tuple(self.outer))
        n = self.graph.n
        if sorted(self.order) != list(range(n)):
            raise GeometryError("order must be a permutation of the vertices")
        if len(self.inner) != n or len(self.outer) != n:
            raise GeometryError("inner/outer must have one entry per vertex")
        for x in itertools.chain(self.inner, self.outer):
            if x.dim != self.dim:
                raise GeometryError("inner/outer sets must match the declared dimension")
        if self.s < 1 or self.t < 1:
            raise GeometryError("s and t must be positive integers")

    @property
    def declared(self) -> bool:
        """True when some inner set is not a box, so parts of the certificate are taken on trust."""
        return any(isinstance(x, Ball) for x in self.inner)


# --- integer snapshots ----------------------------------------------------

class _IntBoxes:
    """Boxes (and optional extra values) scaled to integers by one common denominator."""

    def __init__(self, boxes: Sequence[Box], extra: Iterable[Fraction] = ()):
        extra = list(extra)
        vals = itertools.chain((x for b in boxes for s in b.sides for x in (s.lo, s.hi)), extra)
        self.den = den = common_denominator(vals)
        self.lo = [tuple(scale_to_int(s.lo, den) for s in b.sides) for b in boxes]
        self.hi = [tuple(scale_to_int(s.hi, den) for s in b.sides) for b in boxes]

    def to_int(self, x: Fraction) -> int:
        return scale_to_int(x, self.den)


def _classify(alo, ahi, blo, bhi) -> BoxRelation:
    touched = False
    for a0, a1, b0, b1 in zip(alo, ahi, blo, bhi):
        if a1 < b0 or b1 < a0:
            return BoxRelation.DISJOINT
        if a1 == b0 or b1 == a0:
            touched = True
    return BoxRelation.TOUCH if touched else BoxRelation.INTERIOR_OVERLAP


# --- touching representations ---------------------------------------------

def verify_touching_rep(r: TouchingRep, require_comparable: bool = True) -> Report:
    """Exact check that ``r`` is a touching representation of ``r.graph``."""
    rep = Report("touching representation")
    g = r.graph
    ib = _IntBoxes(r.boxes)
    tree = BoxTree(ib.lo, ib.hi)
    met = set()
    for u in range(r.n):
        for v in tree.query(ib.lo[u], ib.hi[u]):
            if v <= u:
                continue
            rel = _classify(ib.lo[u], ib.hi[u], ib.lo[v], ib.hi[v])
            met.add((u, v))
            if rel is BoxRelation.INTERIOR_OVERLAP:
                rep.add("interior_overlap", u, v)
            elif not g.has_edge(u, v):
                rep.add("spurious_contact", u, v, detail="boxes meet but vertices are not adjacent")
    for e in g.sorted_edges():
        if e not in met:
            rep.add("missing_contact", *e, detail="adjacent vertices have disjoint boxes")
    if require_comparable:
        for u, v in incomparable_pairs(r.boxes):
            rep.add("incomparable", u, v)
    return rep


def incomparable_pairs(boxes: Sequence[Box]) -> list[tuple[int, int]]:
    """All incomparable pairs; linear-time chain test first, quadratic scan only on failure."""
    if len(boxes) < 2:
        return []
    lens = [b.lengths for b in boxes]
    vols = [volume(b) for b in boxes]
    order = sorted(range(len(boxes)), key=lambda v: (vols[v], v))
    chain = all(all(x <= y for x, y in zip(lens[a], lens[b])) for a, b in zip(order, order[1:]))
    if chain:
        return []
    return [(u, v) for u, v in itertools.combinations(range(len(boxes)), 2)
            if box_comparable(boxes[u], boxes[v]) is Comparability.INCOMPARABLE]


def touching_graph(boxes: Sequence[Box]) -> tuple[Graph, list[tuple[int, int]]]:
    """Contact graph of ``boxes`` plus the list of pairs with overlapping interiors."""
    ib = _IntBoxes(boxes)
    tree = BoxTree(ib.lo, ib.hi)
    edges, bad = [], []
    for u in range(len(boxes)):
        for v in tree.query(ib.lo[u], ib.hi[u]):
            if v > u:
                if _classify(ib.lo[u], ib.hi[u], ib.lo[v], ib.hi[v]) is BoxRelation.INTERIOR_OVERLAP:
                    bad.append((u, v))
                edges.append((u, v))
    return Graph(len(boxes), edges), bad


# --- clique-sum extendable representations --------------------------------

def verify_cs_rep(c: CsRep, require_comparable: bool = True, epsilon: Fraction | None = None,
                  check_half: bool = True) -> Report:
    """Check the vertex and clique conditions of a clique-sum extendable certificate.

    The clique conditions are evaluated at ``c.epsilon`` (or ``epsilon``) and,
    unless ``check_half`` is false, again at half of it.
    """
    rep = Report("clique-sum extendable representation")
    rep.extend(verify_touching_rep(c.base, require_comparable), prefix="base.")
    d, n = c.dim, c.graph.n
    eps = Fraction(c.epsilon if epsilon is None else epsilon)
    if eps <= 0:
        rep.add("epsilon", eps, detail="epsilon must be positive")
        return rep
    root = list(c.root)
    rootset = set(root)

    # (v0)
    if len(set(root)) != len(root) or not all(0 <= v < n for v in root):
        rep.add("v0", tuple(root), detail="root must list distinct vertices")
        return rep
    if not c.graph.is_clique(root):
        rep.add("root_clique", tuple(root), detail="root vertices are not pairwise adjacent")
    if set(c.root_dims) != rootset:
        rep.add("v0", tuple(sorted(c.root_dims)), detail="root_dims must cover exactly the root")
        return rep
    axes = [c.root_dims[u] for u in root]
    if len(set(axes)) != len(axes) or not all(0 <= a < d for a in axes):
        rep.add("v0", tuple(axes), detail="root dimensions must be distinct axes")
    # (v1)
    for u in root:
        du = c.root_dims[u]
        want = tuple((Fraction(-1), Fraction(0)) if i == du else (Fraction(0), Fraction(1))
                     for i in range(d))
        if tuple(c.boxes[u].as_pairs()) != want:
            rep.add("v1", u, detail="root box must be [-1,0] on its axis and [0,1] elsewhere")
    # (v2)
    for v in range(n):
        if v in rootset:
            continue
        b = c.boxes[v]
        if not all(s.lo >= 0 and s.hi < 1 for s in b.sides):
            rep.add("v2", v, detail="non-root box must lie in [0,1)^d")

    cliques = set(enumerate_cliques(c.graph))
    keys = set(c.clique_points)
    for C in sorted(cliques - keys, key=sorted):
        rep.add("clique_point_missing", C)
    for C in sorted(keys - cliques, key=sorted):
        rep.add("clique_point_extra", C)
    for C, p in c.clique_points.items():
        if len(p) != d:
            rep.add("clique_point_dim", C)
            return rep
        if not all(0 <= x < 1 for x in p):
            rep.add("clique_point_range", C, detail="p(C) must lie in [0,1)^d")
        for v in C:
            if 0 <= v < n and not c.boxes[v].contains_point(p):
                rep.add("clique_point_membership", C, v)
    if rep.violations:
        return rep

    for e in ([eps, eps / 2] if check_half else [eps]):
        sub = _check_clique_conditions(c, e)
        for v in sub.violations:
            rep.violations.append(Violation(v.kind, v.witness, f"{v.detail} (epsilon={e})".strip()))
    return rep


def _check_clique_conditions(c: CsRep, eps: Fraction) -> Report:
    rep = Report("cliques")
    items = list(c.clique_points.items())
    pts = [p for _, p in items]
    ib = _IntBoxes(c.boxes, itertools.chain([eps], (x for p in pts for x in p)))
    e = ib.to_int(eps)
    plo = [tuple(ib.to_int(x) for x in p) for p in pts]
    phi = [tuple(x + e for x in p) for p in plo]

    # (c1): clique boxes pairwise disjoint
    ctree = BoxTree(plo, phi)
    for a in range(len(items)):
        for b in ctree.query(plo[a], phi[a]):
            if b > a:
                rep.add("c1", items[a][0], items[b][0], detail="clique boxes intersect")

    # (c2): exactly the clique's boxes meet its clique box, each on a facet at p(C)
    vtree = BoxTree(ib.lo, ib.hi)
    for a, (C, _) in enumerate(items):
        q0, q1 = plo[a], phi[a]
        hit = set(vtree.query(q0, q1))
        for v in sorted(hit - C):
            rep.add("c2_spurious", C, v, detail="box of a vertex outside C meets the clique box")
        for v in sorted(C):
            if v not in hit:
                rep.add("c2_facet", C, v, detail="box of a clique vertex misses the clique box")
                continue
            lo, hi = ib.lo[v], ib.hi[v]
            touch_axes = [j for j in range(len(q0)) if hi[j] == q0[j] and lo[j] <= q0[j]]
            full_axes = [j for j in range(len(q0)) if lo[j] <= q0[j] and hi[j] >= q1[j]]
            if len(touch_axes) != 1 or len(full_axes) != len(q0) - 1 or touch_axes[0] in full_axes:
                rep.add("c2_facet", C, v, detail="intersection is not a facet incident to p(C)")
    return rep


def facet_axis(c: CsRep, clique: Iterable[int], v: int) -> int:
    """The axis on which ``v``'s box touches the clique box of ``clique`` at p(C)."""
    p = c.clique_points[frozenset(clique)]
    axes = [j for j, s in enumerate(c.boxes[v].sides) if s.hi == p[j]]
    if len(axes) != 1:
        raise CertificateError(f"vertex {v} has no unique facet axis at clique {sorted(clique)}")
    return axes[0]


def max_valid_epsilon(c: CsRep, cap: Fraction = Fraction(1)) -> Fraction:
    """A positive epsilon at which the clique conditions hold (and at every smaller one).

    Every condition is monotone in epsilon, so the smallest budget over all
    (clique, vertex) pairs and clique pairs bounds the admissible values; the
    returned epsilon is half that budget. Raises :class:`CertificateError` when
    no positive epsilon can work.
    """
    items = list(c.clique_points.items())
    if not items:
        raise CertificateError("certificate has no clique points")
    budget = Fraction(cap)

    boxes = c.boxes
    for C, p in items:
        for v in range(c.graph.n):
            b = boxes[v]
            if v in C:
                touch = [j for j, s in enumerate(b.sides) if s.hi == p[j]]
                if len(touch) != 1 or not b.contains_point(p):
                    raise CertificateError(f"vertex {v} cannot meet clique {sorted(C)} on a facet")
                for j, s in enumerate(b.sides):
                    if j != touch[0]:
                        budget = min(budget, s.hi - p[j])
            else:
                if any(s.hi < x for s, x in zip(b.sides, p)):
                    continue
                gaps = [s.lo - x for s, x in zip(b.sides, p) if s.lo > x]
                if not gaps:
                    raise CertificateError(f"p({sorted(C)}) lies in the box of non-member {v}")
                budget = min(budget, max(gaps))
    budget = min(budget, _min_point_separation(items, budget))
    if budget <= 0:
        raise CertificateError("no positive epsilon satisfies the clique conditions")
    return budget / 2


def _min_point_separation(items, bound: Fraction) -> Fraction:
    """Smallest L-infinity distance between clique points, or ``bound`` if none is closer."""
    pts = [p for _, p in items]
    den = common_denominator(itertools.chain([bound], (x for p in pts for x in p)))
    ip = [tuple(scale_to_int(x, den) for x in p) for p in pts]
    b = scale_to_int(bound, den)
    tree = BoxTree(ip, ip)
    best = b
    for i, p in enumerate(ip):
        for j in tree.query(tuple(x - best for x in p), tuple(x + best for x in p)):
            if j <= i:
                continue
            dist = max(abs(x - y) for x, y in zip(p, ip[j]))
            if dist == 0:
                raise CertificateError(
                    f"cliques {sorted(items[i][0])} and {sorted(items[j][0])} share a point")
            best = min(best, dist)
    return Fraction(best, den)


# --- envelope representations ---------------------------------------------

def verify_envelope_rep(e: EnvelopeRep) -> Report:
    rep = Report("envelope representation")
    pos = {v: i for i, v in enumerate(e.order)}
    for v in range(e.graph.n):
        inner, outer = e.inner[v], e.outer[v]
        inside = outer.contains_box(inner) if isinstance(inner, Box) else inner.inside_box(outer)
        if not inside:
            rep.add("containment", v, detail="inner set not inside outer box")
    if e.declared:
        rep.notes.append("declared, unverified: s-comparability and thickness for non-box inner sets")
    order = e.order
    for i, vi in enumerate(order):
        inner = e.inner[vi]
        if not isinstance(inner, Box):
            continue
        for vj in order[i + 1:]:
            if not box_sqsubseteq_s(e.outer[vj], inner, e.s):
                rep.add("s_comparable", vi, vj,
                        detail=f"outer({vj}) is not {e.s}-comparable into inner({vi})")
    for u, v in e.graph.sorted_edges():
        a, b = (u, v) if pos[u] < pos[v] else (v, u)
        inner, outer = e.inner[a], e.outer[b]
        hit = (box_relation(inner, outer) is not BoxRelation.DISJOINT if isinstance(inner, Box)
               else inner.meets_closed_box(outer.lo, outer.hi))
        if not hit:
            rep.add("edge_contact", a, b, detail="outer set of the later vertex misses the inner set of the earlier")
    if not e.declared:
        t = thickness(list(e.inner))
        if t > e.t:
            rep.add("thickness", t, e.t, detail="some point lies in more than t inner sets")
    return rep


def thickness(boxes: Sequence[Box]) -> int:
    """Maximum number of closed boxes sharing a point.

    Boxes are Helly, so this equals the clique number of their intersection graph.
    """
    if not boxes:
        return 0
    ib = _IntBoxes(boxes)
    tree = BoxTree(ib.lo, ib.hi)
    edges = [(u, v) for u in range(len(boxes)) for v in tree.query(ib.lo[u], ib.hi[u]) if v > u]
    return max_clique_size(Graph(len(boxes), edges))


def envelope_from_boxes(r: TouchingRep) -> EnvelopeRep:
    """Use every box as both inner and outer set, ordered by non-increasing volume."""
    bad = incomparable_pairs(r.boxes)
    if bad:
        raise CertificateError(f"representation is not comparable, e.g. pair {bad[0]}")
    return EnvelopeRep(r.graph, r.dim, tuple(r.volume_order()), r.boxes, r.boxes, 1,
                       max(1, thickness(r.boxes)))
