import itertools
from fractions import Fraction as F

import networkx as nx
import numpy as np
import pytest

from boxdim.construct.basic import (
    apex_add,
    cocktail_party,
    corner_clique,
    strong_product,
    subgraph_extend,
    unit_rep_clique,
    unit_rep_path,
)
from boxdim.construct.extendable import (
    clique_sum,
    floor_pow2,
    ktree_base_cert,
    ktree_cs_rep,
    make_cs_extendable,
    pad_dimension,
    promote_root,
    relabel,
    treewidth_rep,
)
from boxdim.geometry import Box, box_fully_touching
from boxdim.graph import (
    Coloring,
    ColoringKind,
    Graph,
    KTreePlan,
    TreeDecomp,
    complete_graph,
    cycle_graph,
    greedy_proper_coloring,
    greedy_star_coloring,
    ktree_realize,
    max_clique_size,
    path_graph,
    random_ktree_plan,
    strong_product_graph,
)
from boxdim.representation import CertificateError, TouchingRep, verify_cs_rep, verify_touching_rep


def B(*pairs):
    return Box.from_bounds(pairs)


def iso(g: Graph, h: Graph) -> bool:
    a, b = nx.Graph(), nx.Graph()
    a.add_nodes_from(range(g.n))
    a.add_edges_from(g.edges)
    b.add_nodes_from(range(h.n))
    b.add_edges_from(h.edges)
    return nx.is_isomorphic(a, b)


# --- apex ---------------------------------------------------------------------

def test_apex_on_single_vertex():
    r = apex_add(TouchingRep(Graph(1), 1, [B((0, 1),)]), [0])
    assert r.boxes[0] == B((0, 1), (0, 1))
    assert r.boxes[1] == B((-1, 0), (-2, 2))
    assert verify_touching_rep(r).ok and r.graph.has_edge(0, 1)


def test_apex_without_neighbors_is_isolated():
    r = apex_add(unit_rep_path(3), [])
    assert verify_touching_rep(r).ok and r.graph.degree(3) == 0
    assert all(b[0].lo >= F(1, 2) for b in r.boxes[:3])


def test_repeated_apex_gives_clique():
    r = TouchingRep(Graph(1), 1, [B((0, 1),)])
    for n in range(2, 7):
        r = apex_add(r, range(r.n))
        assert r.graph == complete_graph(n) and r.dim == n
        assert verify_touching_rep(r).ok


# --- products and unit builders -----------------------------------------------

def test_p2_times_p2_is_k4_of_unit_squares():
    r = strong_product(unit_rep_path(2), unit_rep_path(2))
    assert r.graph == complete_graph(4) and verify_touching_rep(r).ok
    assert all(set(b.lengths) == {1} for b in r.boxes)


def test_product_with_single_vertex():
    left = unit_rep_path(3)
    r = strong_product(left, unit_rep_path(1))
    assert r.graph == left.graph
    assert all(b == Box(lb.sides + (B((0, 1),)[0],)) for b, lb in zip(r.boxes, left.boxes))


def test_king_graph():
    r = strong_product(unit_rep_path(3), unit_rep_path(3))
    assert r.graph == strong_product_graph(path_graph(3), path_graph(3))
    assert verify_touching_rep(r).ok


def test_product_rejects_non_unit_right_factor():
    with pytest.raises(CertificateError):
        strong_product(unit_rep_path(2), TouchingRep(Graph(1), 1, [B((0, 2),)]))


def test_unit_builders():
    assert [tuple(b.as_pairs()) for b in unit_rep_path(3).boxes] == [((0, 1),), ((1, 2),), ((2, 3),)]
    r = unit_rep_clique(4)
    assert r.dim == 2 and set(r.boxes) == set(corner_clique(2).boxes)
    r = unit_rep_clique(3)
    assert r.graph == complete_graph(3) and verify_touching_rep(r).ok


# --- subgraphs ------------------------------------------------------------------

def test_delete_edge_from_k4():
    r = corner_clique(2)
    col = Coloring({v: v + 1 for v in range(4)}, ColoringKind.STAR)
    keep = [e for e in r.graph.sorted_edges() if e != (0, 3)]
    s = subgraph_extend(r, keep, col)
    assert s.dim == 2 + 6 and verify_touching_rep(s).ok
    assert s.graph.edges == frozenset(keep)


def test_keep_everything_adds_middle_intervals():
    r = corner_clique(2)
    col = greedy_star_coloring(r.graph, r.volume_order())
    s = subgraph_extend(r, r.graph.sorted_edges(), col)
    assert s.graph == r.graph
    assert all(tuple(sd.as_pairs()) == ((F(-1, 2), F(1, 2)),) * 6 for sd in
               (Box(b.sides[2:]) for b in s.boxes))


def test_subgraph_rejects_non_star_coloring():
    r = unit_rep_path(4)
    col = Coloring({0: 1, 1: 2, 2: 1, 3: 2}, ColoringKind.STAR)
    with pytest.raises(CertificateError):
        subgraph_extend(r, [(0, 1)], col)


def test_k4_minus_matching_two_ways():
    r = corner_clique(2)
    col = Coloring({v: v + 1 for v in range(4)}, ColoringKind.STAR)
    keep = [e for e in r.graph.sorted_edges() if e not in {(0, 3), (1, 2)}]
    a = subgraph_extend(r, keep, col)
    b = cocktail_party(2)
    assert verify_touching_rep(a).ok and verify_touching_rep(b).ok
    assert iso(a.graph, b.graph)


# --- cocktail party -----------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cocktail_party(n):
    r = cocktail_party(n)
    assert r.dim == n and verify_touching_rep(r).ok
    want = Graph(2 * n, [(a, b) for a, b in itertools.combinations(range(2 * n), 2) if a // 2 != b // 2])
    assert iso(r.graph, want)
    if n == 1:
        assert r.graph.m == 0
    if n == 2:
        assert iso(r.graph, cycle_graph(4))


# --- padding, clique sums, promotion --------------------------------------------------

def test_pad_dimension():
    c = ktree_base_cert(2)
    p1 = pad_dimension(c)
    assert p1.dim == 4 and verify_cs_rep(p1).ok
    assert all((p1.boxes[v][3].lo, p1.boxes[v][3].hi) == (0, 1) for v in c.root)
    p2 = pad_dimension(c, 2)
    assert p2 == pad_dimension(p1) and verify_cs_rep(p2).ok


def test_glue_two_triangles_on_an_edge():
    c = ktree_base_cert(2)
    cert, new_id = clique_sum(c, (0, 2), c, {0: 0, 2: 1})
    assert cert.dim == 3 and cert.graph.n == 4
    k4_minus = Graph(4, [e for e in itertools.combinations(range(4), 2) if e != (1, 3)])
    assert iso(cert.graph, k4_minus)
    assert verify_cs_rep(cert).ok


def test_glue_on_empty_root():
    c = ktree_base_cert(2)
    r = make_cs_extendable(unit_rep_path(2), greedy_proper_coloring(path_graph(2), [0, 1]))
    cert, new_id = clique_sum(c, (), r, {})
    assert cert.graph.n == 5 and cert.graph.m == 3 + 1
    assert verify_cs_rep(cert).ok


def test_clique_sum_rejects_bad_matching():
    c = ktree_base_cert(2)
    with pytest.raises(CertificateError):
        clique_sum(c, (0, 2), c, {0: 0, 2: 0})
    with pytest.raises(CertificateError):
        clique_sum(c, (0,), c, {0: 0})


def test_clique_sum_associativity_smoke():
    c = ktree_base_cert(2)
    ab, _ = clique_sum(c, (0, 2), c, {0: 0, 2: 1})
    abc, _ = clique_sum(ab, (1, 2), c, {1: 0, 2: 1})
    bc, _ = clique_sum(c, (1, 2), c, {1: 0, 2: 1})
    a_bc, _ = clique_sum(c, (0, 2), bc, {0: 0, 2: 1})
    assert verify_cs_rep(abc).ok and verify_cs_rep(a_bc).ok
    assert iso(abc.graph, a_bc.graph)


def test_promote_root_on_k2():
    g = complete_graph(2)
    base = make_cs_extendable(TouchingRep(Graph(1), 1, [B((0, 1),)]),
                              Coloring({0: 1}, ColoringKind.PROPER))
    cert = promote_root(base, g, [0])
    assert cert.dim == 1 + base.dim and verify_cs_rep(cert).ok
    assert {p[0] for p in cert.clique_points.values()} <= {F(0), F(1, 4)}
    assert promote_root(base, Graph(1), []) is base


def test_relabel_roundtrip():
    c = ktree_base_cert(2)
    r = relabel(c, [2, 0, 1])
    assert verify_cs_rep(r).ok and r.root == (2, 0)


def test_floor_pow2():
    assert floor_pow2(F(3, 8)) == F(1, 4)
    assert floor_pow2(F(1)) == 1
    assert floor_pow2(F(5)) == 4
    with pytest.raises(ValueError):
        floor_pow2(F(0))


# --- make_cs_extendable -----------------------------------------------------------

def test_extendable_k4_is_fully_touching():
    r = corner_clique(2)
    col = greedy_proper_coloring(r.graph, r.volume_order())
    c = make_cs_extendable(r, col)
    assert c.dim == 6 and verify_cs_rep(c).ok
    for u, v in c.graph.edges:
        assert box_fully_touching(c.boxes[u], c.boxes[v])


def test_extendable_small_cases():
    one = make_cs_extendable(TouchingRep(Graph(1), 2, [B((0, 1), (0, 1))]),
                             Coloring({0: 1}, ColoringKind.PROPER))
    assert one.dim == 3 and verify_cs_rep(one).ok
    p3 = make_cs_extendable(unit_rep_path(3), greedy_proper_coloring(path_graph(3), [0, 1, 2]))
    assert p3.dim == 3 and verify_cs_rep(p3).ok


# --- k-trees and treewidth ------------------------------------------------------------

def test_ktree_path():
    plan = KTreePlan(1, (0, 1), tuple(((i,), i + 1) for i in range(1, 6)))
    c = ktree_cs_rep(plan)
    assert c.dim == 2 and c.graph == path_graph(7)


def test_ktree_single_triangle_is_base():
    c = ktree_cs_rep(KTreePlan(2, (0, 1, 2)))
    assert c == ktree_base_cert(2)


def test_ktree_random_3tree():
    plan = random_ktree_plan(3, 30, np.random.default_rng(3))
    c = ktree_cs_rep(plan)
    assert c.dim == 4 and c.graph == ktree_realize(plan)
    assert max_clique_size(c.graph) == 4 <= 2 ** 4


def test_treewidth_rep_c4():
    r = treewidth_rep(cycle_graph(4), TreeDecomp.from_path([{0, 1, 2}, {0, 2, 3}]))
    assert r.dim == 3 and r.graph == cycle_graph(4) and verify_touching_rep(r).ok


def test_treewidth_rep_tree():
    g = Graph(6, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5)])
    td = TreeDecomp([0, 1, 2, 3, 4], {0: None, 1: 0, 2: 0, 3: 1, 4: 2},
                    {0: {0, 1}, 1: {1, 3}, 2: {0, 2}, 3: {1, 4}, 4: {2, 5}})
    r = treewidth_rep(g, td)
    assert r.dim == 2 and r.graph == g and verify_touching_rep(r).ok


def test_treewidth_rep_of_ktree_needs_no_trimming():
    plan = KTreePlan(2, (0, 1, 2), (((0, 1), 3), ((1, 3), 4)))
    g = ktree_realize(plan)
    bags = [{0, 1, 2}, {0, 1, 3}, {1, 3, 4}]
    r = treewidth_rep(g, TreeDecomp.from_path(bags))
    assert r.graph == g and verify_touching_rep(r).ok
    assert all(len(set(b.lengths)) == 1 for b in r.boxes)
