"""Gluing many pieces along cliques.

A :class:`CliqueSumTree` lists pieces (each built from a recipe) together
with the clique of the parent piece it is glued onto. Every piece becomes a
certificate rooted at its glue clique; the certificates are then folded
bottom-up with :func:`clique_sum`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from ..graph import (
    ColoringKind,
    GraphError,
    KTreePlan,
    greedy_proper_coloring,
    greedy_star_coloring,
    verify_coloring,
)
from ..representation import CertificateError, CsRep, TouchingRep, verify_touching_rep
from .basic import apex_add, strong_product, subgraph_extend, unit_rep_path
from .extendable import clique_sum, ktree_cs_rep, make_cs_extendable, promote_root

RECIPE_KINDS = ("ktree", "ktree_grid", "extended_ktree_grid", "from_rep")


@dataclass
class CliqueSumNode:
    name: str
    recipe: dict
    parent: str | None = None
    glue: tuple[int, ...] = ()
    root: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {"name": self.name, "recipe": self.recipe, "parent": self.parent,
                "glue": list(self.glue), "root": list(self.root)}


@dataclass
class CliqueSumTree:
    nodes: list[CliqueSumNode]

    def __post_init__(self):
        names = [x.name for x in self.nodes]
        if len(set(names)) != len(names):
            raise GraphError("node names must be unique")
        roots = [x for x in self.nodes if x.parent is None]
        if len(roots) != 1:
            raise GraphError("a clique-sum tree needs exactly one root node")
        known = set(names)
        for x in self.nodes:
            if x.parent is not None and x.parent not in known:
                raise GraphError(f"node {x.name}: unknown parent {x.parent}")
            if x.parent is not None and len(x.glue) != len(x.root):
                raise GraphError(f"node {x.name}: glue and root cliques differ in size")
            if x.parent is None and (x.glue or x.root):
                raise GraphError("the root node has no glue clique")

    @property
    def root(self) -> CliqueSumNode:
        return next(x for x in self.nodes if x.parent is None)

    def children(self, name: str) -> list[CliqueSumNode]:
        return [x for x in self.nodes if x.parent == name]

    def to_json(self) -> list:
        return [x.to_json() for x in self.nodes]

    @classmethod
    def from_json(cls, obj: Any) -> "CliqueSumTree":
        nodes = []
        for item in obj:
            unknown = set(item) - {"name", "recipe", "parent", "glue", "root"}
            if unknown:
                raise GraphError(f"node {item.get('name')}: unknown field(s) {sorted(unknown)}")
            nodes.append(CliqueSumNode(str(item["name"]), dict(item["recipe"]), item.get("parent"),
                                       tuple(item.get("glue", ())), tuple(item.get("root", ()))))
        return cls(nodes)


def build_recipe(recipe: dict) -> TouchingRep:
    """Comparable touching representation described by ``recipe``."""
    kind = recipe.get("kind")
    if kind not in RECIPE_KINDS:
        raise GraphError(f"unknown recipe kind {kind!r}")
    if kind == "from_rep":
        from ..io import touching_from_json
        r = touching_from_json(recipe["rep"])
        rep = verify_touching_rep(r, require_comparable=True)
        if not rep.ok:
            raise CertificateError("from_rep recipe carries an invalid representation", rep)
        return r
    plan = KTreePlan.from_json(recipe["plan"])
    r = ktree_cs_rep(plan).base
    if kind == "ktree":
        return r
    r = strong_product(r, unit_rep_path(int(recipe["path"])))
    if kind == "ktree_grid":
        return r
    apices = recipe.get("apices", [])
    if len(apices) > plan.k:
        raise GraphError(f"an extended {plan.k}-tree-grid has at most {plan.k} apex vertices")
    for nbrs in apices:
        r = apex_add(r, nbrs)
    return r


@dataclass
class PieceReport:
    name: str
    vertices: int
    rep_dim: int
    colors: int
    root_size: int
    cert_dim: int


@dataclass
class PipelineResult:
    cert: CsRep
    rep: TouchingRep
    pieces: list[PieceReport]
    origin: dict[tuple[str, int], int]
    leaf_dim: int
    color_bound: int
    notes: list[str] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.rep.dim

    @property
    def dim_bound(self) -> int:
        """max piece dimension plus twice the largest colour count used."""
        return self.leaf_dim + 2 * self.color_bound

    def summary(self) -> dict:
        return {
            "dim": self.dim, "leaf_dim": self.leaf_dim, "colors": self.color_bound,
            "dim_bound": self.dim_bound, "within_bound": self.dim <= self.dim_bound,
            "vertices": self.rep.n,
            "pieces": [p.__dict__ for p in self.pieces],
        }


def piece_certificate(r: TouchingRep, root: Sequence[int]) -> tuple[CsRep, int]:
    """Certificate of a piece rooted at ``root``; also returns the colour count used."""
    root = tuple(root)
    rootset = set(root)
    others = [v for v in range(r.n) if v not in rootset]
    sub = r.restrict(others)
    coloring = greedy_proper_coloring(sub.graph, sub.volume_order())
    cs = make_cs_extendable(sub, coloring)
    if root:
        cs = promote_root(cs, r.graph, root)
    return cs, coloring.num_colors


def pipeline_clique_sums(tree: CliqueSumTree, strict: bool = True) -> PipelineResult:
    reps = {x.name: build_recipe(x.recipe) for x in tree.nodes}
    pieces: list[PieceReport] = []
    certs: dict[str, CsRep] = {}
    colors = 0
    for x in tree.nodes:
        r = reps[x.name]
        if x.parent is not None:
            parent_graph = reps[x.parent].graph
            if not all(0 <= v < parent_graph.n for v in x.glue) or not parent_graph.is_clique(x.glue):
                raise CertificateError(f"node {x.name}: glue {list(x.glue)} is not a clique of {x.parent}")
        cs, used = piece_certificate(r, x.root)
        whole = greedy_proper_coloring(r.graph, r.volume_order()).num_colors
        colors = max(colors, used, whole)
        certs[x.name] = cs
        pieces.append(PieceReport(x.name, r.n, r.dim, used, len(x.root), cs.dim))

    def fold(x: CliqueSumNode) -> tuple[CsRep, dict[tuple[str, int], int]]:
        cert = certs[x.name]
        origin = {(x.name, v): v for v in range(cert.graph.n)}
        for child in tree.children(x.name):
            sub, sub_origin = fold(child)
            matching = dict(zip(child.glue, child.root))
            cert, new_id = clique_sum(cert, child.glue, sub, matching, strict)
            for key, v in sub_origin.items():
                origin.setdefault(key, new_id[v])
        return cert, origin

    cert, origin = fold(tree.root)
    leaf_dim = max(p.rep_dim for p in pieces)
    return PipelineResult(cert, cert.base, pieces, origin, leaf_dim, colors)


def pipeline_minor(tree: CliqueSumTree, keep: Iterable[Sequence[int]] | None = None,
                   strict: bool = True) -> tuple[TouchingRep, PipelineResult]:
    """Clique-sum pipeline followed by deletion of every edge not in ``keep``.

    The star colouring is the greedy one along non-increasing box volume.
    """
    res = pipeline_clique_sums(tree, strict)
    r = res.rep
    if keep is None:
        return r, res
    coloring = greedy_star_coloring(r.graph, r.volume_order())
    if not verify_coloring(r.graph, coloring, ColoringKind.STAR).ok:
        raise AssertionError("greedy star coloring failed its own check")
    out = subgraph_extend(r, keep, coloring, strict)
    res.notes.append(f"subgraph step used {coloring.num_colors} star colours")
    return out, res
