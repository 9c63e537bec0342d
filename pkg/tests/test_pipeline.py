import networkx as nx
import pytest

from boxdim.construct.pipeline import (
    CliqueSumNode,
    CliqueSumTree,
    build_recipe,
    pipeline_clique_sums,
    pipeline_minor,
)
from boxdim.graph import GraphError, complete_graph, path_graph, strong_product_graph
from boxdim.representation import verify_cs_rep, verify_touching_rep

TRIANGLE = {"kind": "ktree", "plan": {"k": 2, "base": [0, 1, 2], "steps": []}}


def test_bowtie():
    tree = CliqueSumTree([CliqueSumNode("a", TRIANGLE),
                          CliqueSumNode("b", TRIANGLE, parent="a", glue=(0,), root=(0,))])
    res = pipeline_clique_sums(tree)
    assert verify_cs_rep(res.cert).ok
    g = res.rep.graph
    assert g.n == 5 and g.m == 6 and sorted(g.degree(v) for v in range(5)) == [2, 2, 2, 2, 4]


def test_single_grid_leaf():
    recipe = {"kind": "ktree_grid", "plan": TRIANGLE["plan"], "path": 3}
    r = build_recipe(recipe)
    assert r.dim == 4 and verify_touching_rep(r).ok
    assert r.graph == strong_product_graph(complete_graph(3), path_graph(3))


def test_dimension_accounting_and_minor():
    leaf = {"kind": "extended_ktree_grid", "plan": TRIANGLE["plan"], "path": 2, "apices": [[0, 1]]}
    tree = CliqueSumTree([CliqueSumNode("a", leaf),
                          CliqueSumNode("b", leaf, parent="a", glue=(0, 1), root=(0, 1))])
    res = pipeline_clique_sums(tree)
    assert res.dim <= res.dim_bound
    assert res.color_bound <= 3 ** res.leaf_dim
    keep = [e for e in res.rep.graph.sorted_edges() if (e[0] + e[1]) % 3]
    rep, _ = pipeline_minor(tree, keep)
    assert verify_touching_rep(rep).ok
    assert rep.graph.edges == frozenset(keep)


def test_tree_validation():
    with pytest.raises(GraphError):
        CliqueSumTree([CliqueSumNode("a", TRIANGLE), CliqueSumNode("b", TRIANGLE)])
    with pytest.raises(GraphError):
        CliqueSumTree([CliqueSumNode("a", TRIANGLE),
                       CliqueSumNode("b", TRIANGLE, parent="zz", glue=(0,), root=(0,))])
    with pytest.raises(GraphError):
        build_recipe({"kind": "extended_ktree_grid", "plan": TRIANGLE["plan"], "path": 2,
                      "apices": [[0], [1], [2]]})
    with pytest.raises(GraphError):
        build_recipe({"kind": "nope"})


def test_tree_json_roundtrip():
    tree = CliqueSumTree([CliqueSumNode("a", TRIANGLE),
                          CliqueSumNode("b", TRIANGLE, parent="a", glue=(0, 1), root=(1, 2))])
    again = CliqueSumTree.from_json(tree.to_json())
    assert again.to_json() == tree.to_json()
