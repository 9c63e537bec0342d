"""Finite simple graphs, cliques, greedy colorings and tree decompositions."""

from __future__ import annotations

import enum
import itertools
import os
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

DEFAULT_CLIQUE_CAP = 2_000_000


class GraphError(ValueError):
    pass


class CliqueCapExceeded(RuntimeError):
    """Raised when clique enumeration or search exceeds its resource guard."""


def clique_cap() -> int:
    raw = os.environ.get("BOXDIM_CLIQUE_CAP")
    if raw is None:
        return DEFAULT_CLIQUE_CAP
    try:
        return int(raw)
    except ValueError:
        raise GraphError(f"BOXDIM_CLIQUE_CAP must be an integer, got {raw!r}") from None


class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        es = set()
        adj = [set() for _ in range(n)]
        for e in edges:
            u, v = e
            u, v = int(u), int(v)
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            key = (u, v) if u < v else (v, u)
            if key in es:
                raise GraphError(f"duplicate edge {key}")
            es.add(key)
            adj[u].add(v)
            adj[v].add(u)
        self.n = n
        self.edges = frozenset(es)
        self.adj = tuple(frozenset(a) for a in adj)

    @classmethod
    def from_adjacency(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Graph":
        """Like the constructor, but tolerates repeated pairs."""
        return cls(n, {(min(u, v), max(u, v)) for u, v in pairs})

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def m(self) -> int:
        return len(self.edges)

    def vertices(self) -> range:
        return range(self.n)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def induced(self, keep: Sequence[int]) -> tuple["Graph", dict[int, int]]:
        """Induced subgraph on ``keep`` relabelled to ``0..len(keep)-1`` in the given order."""
        index = {v: i for i, v in enumerate(keep)}
        es = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph(len(keep), es), index

    def is_clique(self, vs: Iterable[int]) -> bool:
        vs = list(vs)
        return all(self.has_edge(a, b) for a, b in itertools.combinations(vs, 2))

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.sorted_edges()]}


# --- standard graphs ------------------------------------------------------

def complete_graph(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def cocktail_party_graph(n: int) -> Graph:
    """K_{2n} minus the perfect matching {2i, 2i+1}."""
    return Graph(2 * n, [(u, v) for u, v in itertools.combinations(range(2 * n), 2)
                         if u // 2 != v // 2])


def strong_product_graph(g: Graph, h: Graph) -> Graph:
    """Strong product with vertex ``(u, v)`` numbered ``u * h.n + v``."""
    es = set()
    for u1, u2 in itertools.product(range(g.n), repeat=2):
        if not (u1 == u2 or g.has_edge(u1, u2)):
            continue
        for v1, v2 in itertools.product(range(h.n), repeat=2):
            if (u1, v1) == (u2, v2) or not (v1 == v2 or h.has_edge(v1, v2)):
                continue
            a, b = u1 * h.n + v1, u2 * h.n + v2
            es.add((min(a, b), max(a, b)))
    return Graph(g.n * h.n, es)


def add_apex(g: Graph, neighbors: Iterable[int]) -> Graph:
    v = g.n
    return Graph(g.n + 1, list(g.edges) + [(u, v) for u in sorted(set(neighbors))])


def edge_subgraph(g: Graph, keep: Iterable[Sequence[int]]) -> Graph:
    es = {(min(u, v), max(u, v)) for u, v in keep}
    missing = es - g.edges
    if missing:
        raise GraphError(f"edges {sorted(missing)[:5]} are not in the host graph")
    return Graph(g.n, es)


# --- cliques --------------------------------------------------------------

def enumerate_cliques(g: Graph, cap: int | None = None) -> list[frozenset[int]]:
    """All cliques of ``g`` (including the empty one), each once."""
    cap = clique_cap() if cap is None else cap
    out: list[frozenset[int]] = [frozenset()]
    adj = g.adj
    stack: list[tuple[tuple[int, ...], list[int]]] = [((), list(range(g.n)))]
    while stack:
        clique, cands = stack.pop()
        for idx, v in enumerate(cands):
            new = clique + (v,)
            out.append(frozenset(new))
            if len(out) > cap:
                raise CliqueCapExceeded(f"more than {cap} cliques")
            nxt = [w for w in cands[idx + 1:] if w in adj[v]]
            if nxt:
                stack.append((new, nxt))
    return out


def max_clique_size(g: Graph, cap: int | None = None) -> int:
    """Exact clique number by branch and bound over a degeneracy ordering."""
    if g.n == 0:
        return 0
    cap = clique_cap() if cap is None else cap
    order = degeneracy_order(g)
    pos = {v: i for i, v in enumerate(order)}
    best = 1
    budget = [cap]

    def expand(size: int, cands: list[int]):
        nonlocal best
        budget[0] -= 1
        if budget[0] < 0:
            raise CliqueCapExceeded(f"clique search exceeded {cap} nodes")
        if not cands:
            best = max(best, size)
            return
        # greedy colour bound
        colors: dict[int, int] = {}
        for v in cands:
            used = {colors[w] for w in g.adj[v] if w in colors}
            c = 0
            while c in used:
                c += 1
            colors[v] = c
        if size + max(colors.values()) + 1 <= best:
            return
        for i, v in enumerate(cands):
            if size + len(cands) - i <= best:
                return
            expand(size + 1, [w for w in cands[i + 1:] if w in g.adj[v]])

    for v in order:
        later = [w for w in g.adj[v] if pos[w] > pos[v]]
        if len(later) + 1 > best:
            later.sort(key=pos.__getitem__)
            expand(1, later)
    return best


def degeneracy_order(g: Graph) -> list[int]:
    deg = [len(a) for a in g.adj]
    removed = [False] * g.n
    order = []
    buckets: dict[int, set[int]] = {}
    for v, d in enumerate(deg):
        buckets.setdefault(d, set()).add(v)
    d = 0
    for _ in range(g.n):
        d = 0
        while not buckets.get(d):
            d += 1
        v = min(buckets[d])
        buckets[d].remove(v)
        removed[v] = True
        order.append(v)
        for w in g.adj[v]:
            if not removed[w]:
                buckets[deg[w]].remove(w)
                deg[w] -= 1
                buckets.setdefault(deg[w], set()).add(w)
    return order


def connected_components(g: Graph, removed: Iterable[int] = ()) -> list[list[int]]:
    gone = set(removed)
    seen = set(gone)
    comps = []
    for s in range(g.n):
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


# --- colorings ------------------------------------------------------------

class ColoringKind(enum.Enum):
    PROPER = "proper"
    STAR = "star"


@dataclass(frozen=True)
class Coloring:
    colors: Mapping[int, int]
    kind: ColoringKind

    @property
    def num_colors(self) -> int:
        return len(set(self.colors.values()))

    def palette(self) -> list[int]:
        return sorted(set(self.colors.values()))


def _check_order(g: Graph, order: Sequence[int]) -> None:
    if sorted(order) != list(range(g.n)):
        raise GraphError("order must be a permutation of the vertices")


def greedy_proper_coloring(g: Graph, order: Sequence[int]) -> Coloring:
    _check_order(g, order)
    colors: dict[int, int] = {}
    for v in order:
        used = {colors[w] for w in g.adj[v] if w in colors}
        c = 1
        while c in used:
            c += 1
        colors[v] = c
    return Coloring(colors, ColoringKind.PROPER)


def greedy_star_coloring(g: Graph, order: Sequence[int], middle_after_first: bool = True) -> Coloring:
    """Greedy star coloring along ``order``.

    Vertex ``v_i`` avoids the colour of every earlier ``v_j`` that is adjacent
    to it or shares a neighbour ``v_m`` with ``m > j``. With
    ``middle_after_first=False`` the shared neighbour must additionally
    precede ``v_i``; that variant is proper but not guaranteed to be a star
    coloring.
    """
    _check_order(g, order)
    pos = {v: i for i, v in enumerate(order)}
    colors: dict[int, int] = {}
    for i, v in enumerate(order):
        forbidden = {colors[w] for w in g.adj[v] if pos[w] < i}
        for m in g.adj[v]:
            pm = pos[m]
            if not middle_after_first and pm > i:
                continue
            for w in g.adj[m]:
                pw = pos[w]
                if pw < i and pw < pm:
                    forbidden.add(colors[w])
        c = 1
        while c in forbidden:
            c += 1
        colors[v] = c
    return Coloring(colors, ColoringKind.STAR)


@dataclass
class ColoringReport:
    proper_violations: list[tuple[int, int]] = field(default_factory=list)
    star_violations: list[tuple[int, int, int, int]] = field(default_factory=list)
    missing: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.proper_violations or self.star_violations or self.missing)


def verify_coloring(g: Graph, c: Coloring, kind: ColoringKind | None = None) -> ColoringReport:
    """Check properness and, for star colourings, the absence of bicoloured 4-vertex paths."""
    kind = c.kind if kind is None else kind
    rep = ColoringReport()
    col = c.colors
    rep.missing = [v for v in range(g.n) if v not in col]
    if rep.missing:
        return rep
    rep.proper_violations = [e for e in g.sorted_edges() if col[e[0]] == col[e[1]]]
    if kind is ColoringKind.STAR and not rep.proper_violations:
        for b, c2 in g.sorted_edges():
            for x, y in ((b, c2), (c2, b)):
                for a in g.adj[x]:
                    if a == y or col[a] != col[y]:
                        continue
                    for d in g.adj[y]:
                        if d != x and d != a and col[d] == col[x]:
                            path = (a, x, y, d)
                            if path[0] > path[3]:
                                path = path[::-1]
                            rep.star_violations.append(path)
        rep.star_violations = sorted(set(rep.star_violations))
    return rep


# --- tree decompositions --------------------------------------------------

@dataclass
class TreeDecomp:
    """Rooted tree of bags. ``parent[x]`` is None exactly for the root."""

    nodes: list[Hashable]
    parent: dict[Hashable, Hashable | None]
    bags: dict[Hashable, frozenset[int]]

    def __post_init__(self):
        self.bags = {x: frozenset(b) for x, b in self.bags.items()}

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0) - 1

    def children(self) -> dict[Hashable, list[Hashable]]:
        kids: dict[Hashable, list[Hashable]] = {x: [] for x in self.nodes}
        for x in self.nodes:
            p = self.parent.get(x)
            if p is not None and p in kids:
                kids[p].append(x)
        return kids

    def root(self) -> Hashable:
        roots = [x for x in self.nodes if self.parent.get(x) is None]
        if len(roots) != 1:
            raise GraphError(f"expected one root, found {len(roots)}")
        return roots[0]

    @classmethod
    def from_path(cls, bags: Sequence[Iterable[int]]) -> "TreeDecomp":
        nodes = list(range(len(bags)))
        return cls(nodes, {i: (i - 1 if i else None) for i in nodes},
                   {i: frozenset(b) for i, b in enumerate(bags)})

    def to_json(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "parent": {str(x): self.parent.get(x) for x in self.nodes},
            "bags": {str(x): sorted(self.bags[x]) for x in self.nodes},
        }


@dataclass
class TreeDecompReport:
    structure: list[str] = field(default_factory=list)
    uncovered_edges: list[tuple[int, int]] = field(default_factory=list)
    absent_vertices: list[int] = field(default_factory=list)
    disconnected_vertices: list[int] = field(default_factory=list)
    width: int = -1

    @property
    def ok(self) -> bool:
        return not (self.structure or self.uncovered_edges or self.absent_vertices
                    or self.disconnected_vertices)


def verify_tree_decomposition(g: Graph, td: TreeDecomp,
                              vertices: Iterable[int] | None = None) -> TreeDecompReport:
    """Check both decomposition axioms.

    ``vertices`` restricts the check to an induced subgraph (e.g. ``G - X``);
    by default every vertex of ``g`` must be covered.
    """
    rep = TreeDecompReport(width=td.width)
    nodeset = set(td.nodes)
    if len(nodeset) != len(td.nodes):
        rep.structure.append("duplicate node ids")
    for x in td.nodes:
        if x not in td.bags:
            rep.structure.append(f"node {x!r} has no bag")
        p = td.parent.get(x)
        if p is not None and p not in nodeset:
            rep.structure.append(f"node {x!r} has unknown parent {p!r}")
    roots = [x for x in td.nodes if td.parent.get(x) is None]
    if td.nodes and len(roots) != 1:
        rep.structure.append(f"expected exactly one root, found {len(roots)}")
    # every node must reach the root without revisiting
    for x in td.nodes:
        seen = set()
        y = x
        while y is not None and y in nodeset:
            if y in seen:
                rep.structure.append(f"cycle through node {x!r}")
                break
            seen.add(y)
            y = td.parent.get(y)
    if rep.structure:
        return rep

    keep = set(range(g.n)) if vertices is None else set(vertices)
    occ: dict[int, set] = {v: set() for v in keep}
    for x in td.nodes:
        for v in td.bags[x]:
            if v in occ:
                occ[v].add(x)
            elif not 0 <= v < g.n or vertices is None:
                rep.structure.append(f"bag of {x!r} holds unknown vertex {v}")
            else:
                rep.structure.append(f"bag of {x!r} holds removed vertex {v}")
    for u, v in g.sorted_edges():
        if u in keep and v in keep and not (occ[u] & occ[v]):
            rep.uncovered_edges.append((u, v))
    for v in sorted(keep):
        xs = occ[v]
        if not xs:
            rep.absent_vertices.append(v)
            continue
        tops = [x for x in xs if td.parent.get(x) not in xs]
        if len(tops) != 1:
            rep.disconnected_vertices.append(v)
    return rep


def treewidth_exact(g: Graph, limit: int = 12) -> int:
    """Exact treewidth via the subset dynamic programme over elimination orders."""
    n = g.n
    if n > limit:
        raise GraphError(f"exact treewidth is capped at n <= {limit}")
    if n == 0:
        return -1
    adjmask = [sum(1 << w for w in g.adj[v]) for v in range(n)]
    full = (1 << n) - 1

    def q_size(s: int, v: int) -> int:
        # vertices outside s + v reachable from v through s
        seen = 1 << v
        stack = [v]
        out = 0
        while stack:
            u = stack.pop()
            nb = adjmask[u] & ~seen
            seen |= nb
            while nb:
                b = nb & -nb
                nb ^= b
                w = b.bit_length() - 1
                if (s >> w) & 1:
                    stack.append(w)
                else:
                    out += 1
        return out

    tw = {0: -1}
    for size in range(1, n + 1):
        nxt = {}
        for s in (sum(1 << i for i in c) for c in itertools.combinations(range(n), size)):
            best = n
            rest = s
            while rest:
                b = rest & -rest
                rest ^= b
                v = b.bit_length() - 1
                prev = tw[s & ~b]
                val = max(prev, q_size(s & ~b, v))
                if val < best:
                    best = val
            nxt[s] = best
        tw = nxt
    return tw[full]


# --- k-trees --------------------------------------------------------------

@dataclass(frozen=True)
class KTreePlan:
    """A k-tree recipe: an initial clique followed by vertex attachments.

    ``base`` lists the initial clique (k or k+1 vertices; fewer only when no
    attachments follow). Each step ``(clique, v)`` attaches a new vertex ``v``
    to an existing k-clique.
    """

    k: int
    base: tuple[int, ...]
    steps: tuple[tuple[tuple[int, ...], int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "steps", tuple((tuple(sorted(c)), v) for c, v in self.steps))

    @property
    def n(self) -> int:
        return len(self.base) + len(self.steps)

    def to_json(self) -> dict:
        return {"k": self.k, "base": list(self.base),
                "steps": [{"clique": list(c), "vertex": v} for c, v in self.steps]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "KTreePlan":
        return cls(int(obj["k"]), tuple(int(v) for v in obj["base"]),
                   tuple((tuple(int(u) for u in s["clique"]), int(s["vertex"])) for s in obj["steps"]))


def ktree_realize(plan: KTreePlan) -> Graph:
    k = plan.k
    if k < 0:
        raise GraphError("k must be non-negative")
    if len(plan.base) > k + 1 or len(set(plan.base)) != len(plan.base):
        raise GraphError("base must be a clique of at most k+1 distinct vertices")
    if plan.steps and len(plan.base) < k:
        raise GraphError("attachments need a base of at least k vertices")
    present = set(plan.base)
    edges = set(itertools.combinations(sorted(plan.base), 2))
    adj: dict[int, set[int]] = {v: set(plan.base) - {v} for v in plan.base}
    for i, (clique, v) in enumerate(plan.steps):
        if len(clique) != k or len(set(clique)) != k:
            raise GraphError(f"step {i}: attachment set {clique} is not a {k}-clique")
        if v in present:
            raise GraphError(f"step {i}: vertex {v} already present")
        for u in clique:
            if u not in present:
                raise GraphError(f"step {i}: vertex {u} not yet present")
        for a, b in itertools.combinations(clique, 2):
            if b not in adj[a]:
                raise GraphError(f"step {i}: attachment set {clique} is not a clique")
        present.add(v)
        adj[v] = set(clique)
        for u in clique:
            adj[u].add(v)
            edges.add((min(u, v), max(u, v)))
    if present != set(range(len(present))):
        raise GraphError("plan vertices must be exactly 0..n-1")
    return Graph(len(present), edges)


def random_ktree_plan(k: int, n: int, rng) -> KTreePlan:
    """Random k-tree on ``n >= k+1`` vertices; attachment cliques are uniform over existing k-cliques."""
    if n < k + 1:
        raise GraphError("a k-tree with attachments needs n >= k + 1")
    base = tuple(range(k + 1))
    kcliques = [c for c in itertools.combinations(base, k)]
    steps = []
    for v in range(k + 1, n):
        c = kcliques[int(rng.integers(len(kcliques)))]
        steps.append((c, v))
        for drop in range(k):
            kcliques.append(tuple(sorted(c[:drop] + c[drop + 1:] + (v,))))
    return KTreePlan(k, base, tuple(steps))


def ktree_embed(g: Graph, td: TreeDecomp, k: int | None = None) -> tuple[KTreePlan, list[int]]:
    """Complete ``g`` to a k-tree ``T`` with a root clique disjoint from ``V(g)``.

    Returns the plan for ``T`` on vertices ``0..g.n+k-1`` (vertices of ``g``
    keep their ids) and the root clique ``[g.n, ..., g.n+k-1]``; ``g`` is a
    subgraph of ``T`` minus the root clique.
    """
    rep = verify_tree_decomposition(g, td)
    if not rep.ok:
        raise GraphError("tree decomposition is invalid")
    k = td.width if k is None else k
    k = max(k, 0)
    if td.width > k:
        raise GraphError(f"decomposition width {td.width} exceeds k={k}")
    root_clique = list(range(g.n, g.n + k))
    placed: set[int] = set(root_clique)
    steps: list[tuple[tuple[int, ...], int]] = []
    kids = td.children()

    def process(x, q: frozenset[int]) -> frozenset[int]:
        bag = td.bags[x]
        new = sorted(bag - placed)
        if not new:
            return q
        w = set(q)
        if len(w) == k + 1:
            w.remove(min(u for u in w if u not in bag))
        for i, v in enumerate(new):
            steps.append((tuple(sorted(w)), v))
            placed.add(v)
            w.add(v)
            if i < len(new) - 1:
                w.remove(min(u for u in w if u not in bag))
        return frozenset(w)

    start = frozenset(root_clique)
    stack = [(td.root(), start)]
    while stack:
        x, q = stack.pop()
        qx = process(x, q)
        for c in reversed(kids[x]):
            stack.append((c, qx))
    return KTreePlan(k, tuple(root_clique), tuple(steps)), root_clique


def ktree_tree_decomposition(plan: KTreePlan) -> TreeDecomp:
    """Width-k decomposition of the realised k-tree: one bag per attachment, hung below a bag holding its clique."""
    ktree_realize(plan)
    bags: dict[int, frozenset[int]] = {0: frozenset(plan.base)}
    parent: dict[int, int | None] = {0: None}
    # home[v] = a node whose bag holds v together with the clique v was attached to
    home: dict[int, int] = {v: 0 for v in plan.base}
    for i, (clique, v) in enumerate(plan.steps, start=1):
        anchor = max((home[u] for u in clique), default=0)
        if not set(clique) <= bags[anchor]:
            anchor = next(x for x in sorted(bags, reverse=True) if set(clique) <= bags[x])
        bags[i] = frozenset(clique) | {v}
        parent[i] = anchor
        home[v] = i
    return TreeDecomp(list(bags), parent, bags)
