from fractions import Fraction as F

import pytest

from boxdim.construct.basic import corner_clique, strong_product, unit_rep_path
from boxdim.construct.extendable import complete_cert, ktree_base_cert
from boxdim.geometry import Box
from boxdim.graph import Graph, complete_graph, path_graph
from boxdim.representation import (
    Ball,
    CertificateError,
    CsRep,
    EnvelopeRep,
    TouchingRep,
    envelope_from_boxes,
    facet_axis,
    max_valid_epsilon,
    thickness,
    touching_graph,
    verify_cs_rep,
    verify_envelope_rep,
    verify_touching_rep,
)

HALF, QUARTER = F(1, 2), F(1, 4)


def B(*pairs):
    return Box.from_bounds(pairs)


# --- touching ---------------------------------------------------------------

def test_corner_k4_passes():
    r = corner_clique(2)
    assert {tuple(b.as_pairs()) for b in r.boxes} == {
        ((a, a + 1), (b, b + 1)) for a in (-1, 0) for b in (-1, 0)}
    assert verify_touching_rep(r).ok


def test_single_vertex_passes():
    assert verify_touching_rep(TouchingRep(Graph(1), 2, [B((3, 7), (0, 1))])).ok


def test_overlap_is_reported_with_witness():
    r = TouchingRep(Graph(2), 2, [B((0, 1), (0, 1)), B((F(1, 2), F(3, 2)), (0, 1))])
    rep = verify_touching_rep(r)
    assert "interior_overlap" in rep.kinds()
    assert any(v.witness == (0, 1) for v in rep.violations)


def test_spurious_and_missing_contacts():
    boxes = [B((0, 1),), B((1, 2),), B((3, 4),)]
    rep = verify_touching_rep(TouchingRep(Graph(3, [(1, 2)]), 1, boxes))
    assert rep.kinds() == {"spurious_contact", "missing_contact"}


def test_incomparable_pair():
    r = TouchingRep(Graph(2, [(0, 1)]), 2, [B((0, 2), (0, 1)), B((2, 3), (0, 3))])
    assert verify_touching_rep(r).kinds() == {"incomparable"}
    assert verify_touching_rep(r, require_comparable=False).ok


def test_touching_graph():
    g, overlaps = touching_graph(list(unit_rep_path(4).boxes))
    assert g == path_graph(4) and overlaps == []


# --- clique-sum extendable ----------------------------------------------------

def test_k3_base_certificate_values():
    c = ktree_base_cert(2)
    assert c.boxes[2] == Box.cube([0, 0, 0], HALF)
    assert c.clique_points[frozenset({0, 2})] == (0, QUARTER, HALF)
    assert c.epsilon <= F(1, 8)
    assert verify_cs_rep(c).ok


def test_k3_certificate_epsilon_search():
    c = ktree_base_cert(2)
    eps = max_valid_epsilon(c)
    assert 0 < eps
    assert verify_cs_rep(c, epsilon=eps).ok
    assert verify_cs_rep(c, epsilon=F(1, 8)).ok


def _one_vertex(p_empty, p_v, d=1):
    base = TouchingRep(Graph(1), d, [Box.cube([0] * d, HALF)])
    return CsRep(base, (), {}, {frozenset(): p_empty, frozenset({0}): p_v}, F(1, 16))


def test_one_vertex_certificate():
    c = _one_vertex((F(3, 4),), (HALF,))
    eps = max_valid_epsilon(c)
    assert 0 < eps <= F(1, 8)
    assert verify_cs_rep(c, epsilon=eps).ok


def test_one_vertex_point_inside_box_fails():
    # a point strictly inside the box cannot see the box on a facet
    c = _one_vertex((F(3, 4),), (QUARTER,))
    assert "c2_facet" in verify_cs_rep(c).kinds()
    with pytest.raises(CertificateError):
        max_valid_epsilon(c)


def test_one_vertex_in_higher_dimension():
    d = 3
    c = _one_vertex((HALF, HALF, F(3, 4)), (QUARTER, QUARTER, HALF), d)
    assert verify_cs_rep(c, epsilon=max_valid_epsilon(c)).ok


def test_duplicate_points_fail_c1():
    c = _one_vertex((HALF,), (HALF,))
    assert "c1" in verify_cs_rep(c).kinds()
    with pytest.raises(CertificateError):
        max_valid_epsilon(c)


def test_missing_and_out_of_range_points():
    c = complete_cert(3, 2, True)
    pts = dict(c.clique_points)
    del pts[frozenset({0, 1})]
    assert "clique_point_missing" in verify_cs_rep(CsRep(c.base, c.root, c.root_dims, pts, c.epsilon)).kinds()
    pts = dict(c.clique_points)
    pts[frozenset()] = (F(1), F(0), F(0))
    assert "clique_point_range" in verify_cs_rep(CsRep(c.base, c.root, c.root_dims, pts, c.epsilon)).kinds()


def test_root_box_shape_checked():
    c = complete_cert(3, 2, True)
    boxes = list(c.boxes)
    boxes[0] = B((-1, 0), (0, 1), (0, 2))
    bad = CsRep(TouchingRep(c.graph, 3, boxes), c.root, c.root_dims, c.clique_points, c.epsilon)
    assert "v1" in verify_cs_rep(bad, require_comparable=False).kinds()


def test_large_epsilon_breaks_clique_conditions():
    c = ktree_base_cert(2)
    kinds = verify_cs_rep(c, epsilon=F(1, 2)).kinds()
    assert kinds & {"c1", "c2_spurious", "c2_facet"}


def test_facet_axis():
    c = ktree_base_cert(2)
    assert facet_axis(c, {0, 2}, 2) == 2
    assert facet_axis(c, {0, 2}, 0) == 0


# --- envelopes ------------------------------------------------------------------

@pytest.mark.parametrize("d", [1, 2, 3])
def test_envelope_from_corner(d):
    e = envelope_from_boxes(corner_clique(d))
    assert e.s == 1 and e.t == 2 ** d
    assert verify_envelope_rep(e).ok


def test_envelope_single_vertex():
    e = envelope_from_boxes(TouchingRep(Graph(1), 1, [B((0, 1),)]))
    assert verify_envelope_rep(e).ok


def test_envelope_order_breaks_s_comparability():
    small, big = B((0, 1), (0, 1)), B((1, 3), (0, 2))
    e = EnvelopeRep(Graph(2, [(0, 1)]), 2, (0, 1), (small, big), (small, big), 1, 2)
    assert verify_envelope_rep(e).kinds() == {"s_comparable"}
    e = EnvelopeRep(Graph(2, [(0, 1)]), 2, (1, 0), (small, big), (small, big), 1, 2)
    assert verify_envelope_rep(e).ok


def test_envelope_thickness_and_contact():
    r = strong_product(unit_rep_path(2), unit_rep_path(2))
    e = envelope_from_boxes(r)
    low = EnvelopeRep(e.graph, e.dim, e.order, e.inner, e.outer, 1, 3)
    assert "thickness" in verify_envelope_rep(low).kinds()
    g = Graph(2, [(0, 1)])
    far = EnvelopeRep(g, 1, (0, 1), (B((0, 1),), B((5, 6),)), (B((0, 1),), B((5, 6),)), 1, 1)
    assert "edge_contact" in verify_envelope_rep(far).kinds()


def test_ball_inner_sets_are_declared():
    g = Graph(2, [(0, 1)])
    ball = Ball((HALF, HALF), QUARTER)
    e = EnvelopeRep(g, 2, (0, 1), (ball, B((1, 2), (0, 1))), (B((0, 1), (0, 1)), B((1, 2), (0, 1))), 1, 2)
    rep = verify_envelope_rep(e)
    assert rep.ok and e.declared
    assert any("declared" in n for n in rep.notes)


def test_thickness_examples():
    assert thickness(list(corner_clique(2).boxes)) == 4
    assert thickness([B((0, 1),), B((2, 3),)]) == 1
    assert thickness(list(corner_clique(3).boxes)) == 8
