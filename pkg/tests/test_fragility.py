import json
from fractions import Fraction as F

import numpy as np
import pytest

from boxdim.construct.basic import corner_clique, strong_product, unit_rep_path
from boxdim.construct.extendable import ktree_cs_rep
from boxdim.fragility import (
    FragilityContext,
    GridSchedule,
    balanced_separator,
    build_decomposition,
    build_schedule,
    fragility_experiment,
    level_periods,
    offset_bits,
    report_json,
    run_sample,
    sample_deletion,
    sample_seed_sequence,
    width_bound,
)
from boxdim.geometry import Box
from boxdim.graph import Graph, random_ktree_plan, verify_tree_decomposition
from boxdim.representation import EnvelopeRep, TouchingRep, envelope_from_boxes


def line_envelope(lengths, edges=()):
    boxes, x = [], F(0)
    for length in lengths:
        boxes.append(Box.from_bounds([(x, x + length)]))
        x += length
    g = Graph(len(lengths), edges)
    return EnvelopeRep(g, 1, tuple(range(len(lengths))), tuple(boxes), tuple(boxes), 1, 1)


def test_periods_by_hand():
    assert level_periods(line_envelope([1]), 2) == [(F(2),)]
    assert level_periods(line_envelope([1, 1]), 2) == [(F(2),), (F(2),)]
    assert level_periods(line_envelope([1, F(1, 4)]), 2) == [(F(2),), (F(1, 2),)]
    assert level_periods(line_envelope([1, F(3, 10)]), 2) == [(F(2),), (F(2, 3),)]


@pytest.mark.parametrize("k", [2, 3, 8])
def test_period_invariants(k):
    plan = random_ktree_plan(2, 40, np.random.default_rng(k))
    e = envelope_from_boxes(ktree_cs_rep(plan).base)
    ell = level_periods(e, k)
    ksd = k * e.s * e.dim
    for i, v in enumerate(e.order):
        for j, length in enumerate(e.outer[v].lengths):
            assert ell[i][j] < 2 * ksd * length
            if i:
                q = ell[i - 1][j] / ell[i][j]
                assert q.denominator == 1 and q >= 1
                if ell[i][j] != ell[i - 1][j]:
                    assert ell[i][j] >= ksd * length


def test_deletion_by_hand():
    e = line_envelope([F(1, 2)])
    assert level_periods(e, 4) == [(F(2),)]
    sched = GridSchedule(4, 1, 1, 1, (0,), ((F(2),),), (F(1),), 0)
    assert sample_deletion(e, sched).deleted == frozenset()
    sched = GridSchedule(4, 1, 1, 1, (0,), ((F(2),),), (F(1, 4),), 0)
    assert sample_deletion(e, sched).deleted == {0}


def test_box_longer_than_its_period_is_always_deleted():
    # the second box inherits period 2 but has length 3
    e = line_envelope([1, 3])
    assert level_periods(e, 2) == [(F(2),), (F(2),)]
    ctx = FragilityContext(e, 2)
    for idx in range(50):
        X = ctx.draw_int_offsets(5, idx)
        assert 1 in ctx.deleted_positions(X)
        assert ctx.deleted_positions(X) == ctx.deleted_positions_slow(X)
    assert ctx.f == width_bound(2, 1, 1, 1)


def test_offsets_are_dyadic_and_reproducible():
    e = envelope_from_boxes(corner_clique(2))
    a = build_schedule(e, 4, seed=11, index=3)
    b = build_schedule(e, 4, seed=11, index=3)
    assert a == b and a.digest() == b.digest()
    for x, ell in zip(a.offsets, a.ell[0]):
        assert 0 <= x < ell
        assert ((x / ell) * 2 ** 32).denominator == 1
    ctx = FragilityContext(e, 4)
    assert ctx.draw_int_offsets(11, 3) == ctx.int_offsets(a)


def test_seed_sequence_matches_spawn():
    child = np.random.SeedSequence(99).spawn(5)[3]
    assert sample_seed_sequence(99, 3).generate_state(4).tolist() == child.generate_state(4).tolist()


def test_offset_bits_grow_with_depth():
    assert offset_bits([(F(2),), (F(2),)]) == (32,)
    assert offset_bits([(F(2),), (F(1, 2 ** 40),)]) == (32 + 41,)


def test_single_vertex_tree():
    e = line_envelope([F(1, 10)])
    ctx = FragilityContext(e, 2)
    for idx in range(20):
        smp = run_sample(ctx, 1, idx)
        assert not smp.violations
        if not smp.deleted:
            bags = [b for b in smp.decomposition.bags.values() if b]
            assert bags == [frozenset({0})] and smp.width == 0


def test_p3_unit_intervals():
    e = envelope_from_boxes(unit_rep_path(3))
    ctx = FragilityContext(e, 2)
    for idx in range(100):
        smp = run_sample(ctx, 2, idx)
        assert not smp.violations
        survivors = [v for v in range(3) if v not in smp.deleted]
        assert verify_tree_decomposition(e.graph, smp.decomposition, survivors).ok


def test_k8_corner_bag_bound():
    e = envelope_from_boxes(corner_clique(3))
    assert e.t == 8
    for k in (2, 3):
        ctx = FragilityContext(e, k)
        assert ctx.f == (2 * k * 3 + 2) ** 3 * 8
        for idx in range(50):
            smp = run_sample(ctx, 3, idx)
            assert not smp.violations and smp.max_bag <= ctx.f + 1


def test_build_decomposition_matches_run_sample():
    e = envelope_from_boxes(strong_product(unit_rep_path(4), unit_rep_path(3)))
    sched = build_schedule(e, 3, seed=4, index=7)
    smp = sample_deletion(e, sched)
    td = build_decomposition(e, smp)
    ref = run_sample(FragilityContext(e, 3), 4, 7)
    assert smp.deleted == ref.deleted
    assert sorted(map(sorted, td.bags.values())) == sorted(map(sorted, ref.decomposition.bags.values()))


def test_ball_inner_sets():
    from boxdim.representation import Ball
    half = F(1, 2)
    g = Graph(2, [(0, 1)])
    inner = (Ball((half,), F(1, 4)), Box.from_bounds([(1, 2)]))
    outer = (Box.from_bounds([(0, 1)]), Box.from_bounds([(1, 2)]))
    e = EnvelopeRep(g, 1, (0, 1), inner, outer, 1, 2)
    report = fragility_experiment(e, 2, 40, seed=3)
    assert report["violations"] == [] and report["declared_inner_sets"]


def test_experiment_report_is_deterministic():
    e = envelope_from_boxes(ktree_cs_rep(random_ktree_plan(2, 50, np.random.default_rng(0))).base)
    a = report_json(fragility_experiment(e, 4, 30, seed=7))
    b = report_json(fragility_experiment(e, 4, 30, seed=7))
    assert a == b
    rep = json.loads(a)
    assert "wall_clock_seconds" not in rep
    assert rep["violations"] == [] and rep["max_bag"] <= rep["bag_limit"]
    assert sum(rep["width_histogram"].values()) == 30
    assert "wall_clock_seconds" in fragility_experiment(e, 4, 2, seed=7, timing=True)


def test_separator_examples():
    e = envelope_from_boxes(corner_clique(2))
    res = balanced_separator(e, 2, 0)
    assert res.balanced and len(res.separator) <= 4 / 2 + res.f_k + 1
    one = balanced_separator(envelope_from_boxes(TouchingRep(Graph(1), 1, [Box.from_bounds([(0, 1)])])), 2, 0)
    assert one.balanced and one.separator <= {0}


def test_king_graph_separator():
    e = envelope_from_boxes(strong_product(unit_rep_path(10), unit_rep_path(10)))
    res = balanced_separator(e, 4, 1)
    assert res.balanced
    assert len(res.separator) <= 100 // 4 + res.f_k + 1
    assert max(res.component_sizes) <= 100 // 2
