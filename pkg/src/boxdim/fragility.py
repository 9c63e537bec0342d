"""Randomised nested grids over an envelope representation.

For a vertex order v_1..v_n, axis j gets a period ``ell[i][j]`` at level i
(each period divides the previous one) and one random offset ``x_j``. A
vertex is deleted when its outer box meets the grid of its own level. The
surviving vertices are covered by a tree of grid cells whose bags give a
tree decomposition of bounded width.

Everything runs on integers: all coordinates, periods and offsets are
multiplied by one common denominator.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .geometry import Box, BoxTree, common_denominator, format_rational, scale_to_int
from .graph import Graph, TreeDecomp, connected_components, verify_tree_decomposition
from .representation import Ball, EnvelopeRep

OFFSET_BITS = 32
OFFSET_STEPS = 1 << OFFSET_BITS
MAX_SEPARATOR_DRAWS = 64


def width_bound(k: int, s: int, d: int, t: int) -> int:
    """f(k) = (2ksd + 2)^d * s * t; every bag has at most f(k) + 1 vertices."""
    return (2 * k * s * d + 2) ** d * s * t


def level_periods(e: EnvelopeRep, k: int) -> list[tuple[Fraction, ...]]:
    """Periods ``ell[i][j]`` for the i-th vertex of ``e.order`` (0-based)."""
    if k < 2:
        raise ValueError("k must be at least 2")
    ksd = k * e.s * e.dim
    out: list[tuple[Fraction, ...]] = []
    for i, v in enumerate(e.order):
        target = [ksd * length for length in e.outer[v].lengths]
        if i == 0:
            out.append(tuple(target))
            continue
        prev = out[-1]
        row = []
        for p, x in zip(prev, target):
            if p < x:
                row.append(p)
            else:
                row.append(p / (p // x))
        out.append(tuple(row))
    return out


def sample_seed_sequence(seed: int, index: int) -> np.random.SeedSequence:
    """Child ``index`` of the master seed; identical to ``SeedSequence(seed).spawn(...)[index]``."""
    return np.random.SeedSequence(seed, spawn_key=(index,))


def offset_bits(ell: Sequence[Sequence[Fraction]]) -> tuple[int, ...]:
    """Bits of offset resolution per axis.

    With ``B`` bits the offset is ``m * ell[0][j] / 2^B``. Reduced modulo the
    period of any level this still takes at least ``2^32`` equally spaced
    values, as long as ``2^(B-32)`` is at least ``ell[0][j] / ell[-1][j]``.
    """
    if not ell:
        return ()
    return tuple(OFFSET_BITS + int(first // last).bit_length() - 1
                 for first, last in zip(ell[0], ell[-1]))


def draw_offset_steps(bits: Sequence[int], seed: int, index: int) -> tuple[int, ...]:
    """Integers ``m_j`` in ``[0, 2^bits[j])`` for sample ``index``."""
    rng = np.random.Generator(np.random.PCG64(sample_seed_sequence(seed, index)))
    out = []
    for b in bits:
        words = -(-b // OFFSET_BITS)
        m = 0
        for w in rng.integers(0, OFFSET_STEPS, size=words, dtype=np.uint64):
            m = (m << OFFSET_BITS) | int(w)
        out.append(m >> (words * OFFSET_BITS - b))
    return tuple(out)


def draw_offsets(periods0: Sequence[Fraction], bits: Sequence[int], seed: int,
                 index: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(m) * p / (1 << b)
                 for m, p, b in zip(draw_offset_steps(bits, seed, index), periods0, bits))


@dataclass(frozen=True)
class GridSchedule:
    k: int
    s: int
    d: int
    t: int
    order: tuple[int, ...]
    ell: tuple[tuple[Fraction, ...], ...]
    offsets: tuple[Fraction, ...]
    seed: int
    index: int = 0

    def digest(self) -> str:
        h = hashlib.sha256()
        for row in self.ell:
            h.update(",".join(format_rational(x) for x in row).encode())
            h.update(b";")
        return h.hexdigest()[:16]


class FragilityContext:
    """Integer snapshot of an envelope representation and its periods, shared by many samples."""

    def __init__(self, e: EnvelopeRep, k: int):
        self.e, self.k = e, k
        self.n, self.d = e.graph.n, e.dim
        self.ell = level_periods(e, k)
        self.bits = offset_bits(self.ell)
        self.f = width_bound(k, e.s, e.dim, e.t)
        order = e.order
        vals = [x for row in self.ell for x in row]
        for v in order:
            vals += list(e.outer[v].lo) + list(e.outer[v].hi)
            inner = e.inner[v]
            if isinstance(inner, Box):
                vals += list(inner.lo) + list(inner.hi)
            else:
                vals += list(inner.center)
        self.den = den = common_denominator(vals) << max(self.bits, default=0)
        self.L = [tuple(scale_to_int(x, den) for x in row) for row in self.ell]
        self.olo = [tuple(scale_to_int(x, den) for x in e.outer[v].lo) for v in order]
        self.ohi = [tuple(scale_to_int(x, den) for x in e.outer[v].hi) for v in order]
        self.inner: list = []
        for v in order:
            inner = e.inner[v]
            if isinstance(inner, Box):
                self.inner.append(("box", tuple(scale_to_int(x, den) for x in inner.lo),
                                   tuple(scale_to_int(x, den) for x in inner.hi)))
            else:
                self.inner.append(("ball", tuple(scale_to_int(x, den) for x in inner.center),
                                   inner.radius_sq * den * den))
        # consecutive levels with equal periods have identical grids; group them into runs
        self.run_of: list[int] = []
        self.run_L: list[tuple[int, ...]] = []
        self.run_last: list[int] = []
        for i, row in enumerate(self.L):
            if not self.run_L or self.run_L[-1] != row:
                self.run_L.append(row)
                self.run_last.append(i)
            else:
                self.run_last[-1] = i
            self.run_of.append(len(self.run_L) - 1)
        # A home cell of position j lies within one period of the outer box of
        # j, so only such j can have a cell containing the box of position i.
        tree = BoxTree([tuple(a - L for a, L in zip(self.olo[j], self.L[j])) for j in range(self.n)],
                       [tuple(a + L for a, L in zip(self.ohi[j], self.L[j])) for j in range(self.n)])
        self.cands: list[list[int]] = []
        for i in range(self.n):
            near = [j for j in tree.query(self.olo[i], self.ohi[i]) if self.run_of[j] < self.run_of[i]]
            near.sort(key=lambda j: (-self.run_of[j], j))
            self.cands.append(near)

    def schedule(self, seed: int, index: int = 0) -> GridSchedule:
        e = self.e
        return GridSchedule(self.k, e.s, e.dim, e.t, tuple(e.order), tuple(self.ell),
                            draw_offsets(self.ell[0], self.bits, seed, index), seed, index)

    def int_offsets(self, sched: GridSchedule) -> tuple[int, ...]:
        return tuple(scale_to_int(x, self.den) for x in sched.offsets)

    def draw_int_offsets(self, seed: int, index: int) -> tuple[int, ...]:
        steps = draw_offset_steps(self.bits, seed, index)
        return tuple((m * L) >> b for m, L, b in zip(steps, self.L[0], self.bits))

    # -- deletion ----------------------------------------------------------

    def deleted_positions(self, X: Sequence[int]) -> list[int]:
        out = []
        for i in range(self.n):
            lo, hi, L = self.olo[i], self.ohi[i], self.L[i]
            for j in range(self.d):
                # first grid coordinate >= lo on this axis
                q = lo[j] + (X[j] - lo[j]) % L[j]
                if q <= hi[j]:
                    out.append(i)
                    break
        return out

    def deleted_positions_slow(self, X: Sequence[int]) -> list[int]:
        """Second, independent deletion test via the smallest grid index at or above the box."""
        out = []
        for i in range(self.n):
            for lo, hi, x, L in zip(self.olo[i], self.ohi[i], X, self.L[i]):
                m = -((x - lo) // L)
                if x + m * L <= hi:
                    out.append(i)
                    break
        return out

    # -- cell tree ---------------------------------------------------------

    def cell_bounds(self, run: int, m: Sequence[int], X: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
        L = self.run_L[run]
        lo = tuple(x + mj * l for x, mj, l in zip(X, m, L))
        return lo, tuple(c + l for c, l in zip(lo, L))

    def _meets(self, i: int, lo: tuple[int, ...], hi: tuple[int, ...]) -> bool:
        """Does the inner set of position ``i`` meet the open cell ``(lo, hi)``?"""
        kind, a, b = self.inner[i]
        if kind == "box":
            for p, q, c0, c1 in zip(a, b, lo, hi):
                if p >= c1 or q <= c0:
                    return False
            return True
        dist = 0
        for c, c0, c1 in zip(a, lo, hi):
            if c < c0:
                dist += (c0 - c) ** 2
            elif c > c1:
                dist += (c - c1) ** 2
        return dist < b

    def decomposition(self, X: Sequence[int], deleted: set[int]) -> tuple[TreeDecomp, dict]:
        """Tree decomposition of G - X (vertex ids of the graph, not positions)."""
        order = self.e.order
        home: dict[int, tuple[int, tuple[int, ...]]] = {}
        bounds: dict = {}
        first: dict = {}
        for i in range(self.n):
            if i in deleted:
                continue
            r = self.run_of[i]
            lo = self.olo[i]
            m = tuple((a - x) // L for a, x, L in zip(lo, X, self.run_L[r]))
            key = (r, m)
            if key not in bounds:
                bounds[key] = self.cell_bounds(r, m, X)
                first[key] = i
            c0, c1 = bounds[key]
            for a, c, l, h in zip(lo, self.ohi[i], c0, c1):
                if not (l < a and c < h):
                    raise AssertionError(f"surviving vertex {order[i]} crosses its own grid")
            home[i] = key
        # Parent: the home cell of the finest earlier run that contains this one.
        root = ("root",)
        parent: dict = {}
        kids: dict = {key: [] for key in first}
        kids[root] = []
        for key, i in first.items():
            p = self.olo[i]
            best = root
            for j in self.cands[i]:
                cand = home.get(j)
                if cand is None:
                    continue
                l, h = bounds[cand]
                for a, c0, c1 in zip(p, l, h):
                    if not (c0 < a < c1):
                        break
                else:
                    best = cand
                    break
            parent[key] = best
            kids[best].append(key)
        bags: dict = {key: set() for key in first}
        inner = self.inner
        for i, start in home.items():
            v = order[i]
            kind, ia, ib = inner[i]
            stack = [start]
            while stack:
                key = stack.pop()
                bags[key].add(v)
                for c in kids[key]:
                    l, h = bounds[c]
                    if kind == "box":
                        for p, q, c0, c1 in zip(ia, ib, l, h):
                            if p >= c1 or q <= c0:
                                break
                        else:
                            stack.append(c)
                    elif self._meets(i, l, h):
                        stack.append(c)
        cells = sorted(first)
        names = {key: f"c{idx}" for idx, key in enumerate(cells)}
        names[root] = "root"
        td = TreeDecomp(["root"] + [names[key] for key in cells],
                        {"root": None, **{names[key]: names[parent[key]] for key in cells}},
                        {"root": frozenset(), **{names[key]: bags[key] for key in cells}})
        return td, {"cells": len(cells)}


@dataclass
class DeletionSample:
    schedule: GridSchedule | None
    deleted: frozenset[int]
    seed: int = 0
    index: int = 0
    decomposition: TreeDecomp | None = None
    width: int = -1
    max_bag: int = 0
    violations: list[str] = field(default_factory=list)


def build_schedule(e: EnvelopeRep, k: int, seed: int, index: int = 0) -> GridSchedule:
    return FragilityContext(e, k).schedule(seed, index)


def run_sample(ctx: FragilityContext, seed: int, index: int, decompose: bool = True,
               check: bool = True, keep_schedule: bool = False) -> DeletionSample:
    sched = ctx.schedule(seed, index) if keep_schedule else None
    X = ctx.draw_int_offsets(seed, index)
    pos = ctx.deleted_positions(X)
    violations = []
    if check and pos != ctx.deleted_positions_slow(X):
        violations.append("deletion tests disagree")
    order = ctx.e.order
    deleted = frozenset(order[i] for i in pos)
    out = DeletionSample(sched, deleted, seed, index, violations=violations)
    if decompose:
        td, _ = ctx.decomposition(X, set(pos))
        out.decomposition = td
        out.max_bag = max((len(b) for b in td.bags.values()), default=0)
        out.width = out.max_bag - 1
        if check:
            survivors = [v for v in range(ctx.n) if v not in deleted]
            rep = verify_tree_decomposition(ctx.e.graph, td, survivors)
            if not rep.ok:
                violations.append(f"invalid decomposition: {rep}")
            if out.max_bag > ctx.f + 1:
                violations.append(f"bag of size {out.max_bag} exceeds f(k)+1 = {ctx.f + 1}")
    return out


def sample_deletion(e: EnvelopeRep, schedule: GridSchedule) -> DeletionSample:
    ctx = FragilityContext(e, schedule.k)
    X = tuple(scale_to_int(x, ctx.den) for x in schedule.offsets)
    return DeletionSample(schedule, frozenset(e.order[i] for i in ctx.deleted_positions(X)),
                          schedule.seed, schedule.index)


def build_decomposition(e: EnvelopeRep, sample: DeletionSample) -> TreeDecomp:
    ctx = FragilityContext(e, sample.schedule.k)
    X = tuple(scale_to_int(x, ctx.den) for x in sample.schedule.offsets)
    pos = {i for i, v in enumerate(e.order) if v in sample.deleted}
    return ctx.decomposition(X, pos)[0]


def frequency_tolerance(k: int, n_samples: int) -> float:
    p = 1 / k
    return p + 4 * math.sqrt(p * (1 - p) / n_samples) + 2.0 ** -30


def fragility_experiment(e: EnvelopeRep, k: int, n_samples: int, seed: int,
                         decompose: bool = True, timing: bool = False) -> dict:
    """Run ``n_samples`` independent samples and summarise them.

    Wall-clock time is only included when ``timing`` is set so that reports
    for equal inputs are byte-identical.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    start = time.perf_counter()
    ctx = FragilityContext(e, k)
    counts = [0] * ctx.n
    widths: dict[int, int] = {}
    violations: list[dict] = []
    max_bag = 0
    for idx in range(n_samples):
        smp = run_sample(ctx, seed, idx, decompose=decompose)
        for v in smp.deleted:
            counts[v] += 1
        if decompose:
            widths[smp.width] = widths.get(smp.width, 0) + 1
            max_bag = max(max_bag, smp.max_bag)
        for msg in smp.violations:
            violations.append({"sample": idx, "message": msg})
    tol = frequency_tolerance(k, n_samples)
    freq_fail = [v for v in range(ctx.n) if counts[v] / n_samples > tol]
    sched = ctx.schedule(seed, 0)
    report = {
        "k": k, "samples": n_samples, "seed": seed,
        "n": ctx.n, "d": e.dim, "s": e.s, "t": e.t,
        "f_k": ctx.f, "bag_limit": ctx.f + 1,
        "schedule_digest": sched.digest(),
        "offset_resolution_bits": list(ctx.bits),
        "deletion_counts": counts,
        "deletion_frequency": [c / n_samples for c in counts],
        "frequency_tolerance": tol,
        "frequency_failures": freq_fail,
        "max_bag": max_bag,
        "max_width": max_bag - 1 if decompose else None,
        "width_histogram": {str(w): widths[w] for w in sorted(widths)},
        "violations": violations,
        "declared_inner_sets": e.declared,
    }
    if timing:
        report["wall_clock_seconds"] = time.perf_counter() - start
    return report


def report_json(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=1) + "\n"


# --- separators -----------------------------------------------------------

@dataclass
class SeparatorResult:
    deleted: frozenset[int]
    bag: frozenset[int]
    draws: int
    capped: bool
    component_sizes: list[int]
    remaining: int
    f_k: int

    @property
    def separator(self) -> frozenset[int]:
        return self.deleted | self.bag

    @property
    def balanced(self) -> bool:
        return all(2 * c <= self.remaining for c in self.component_sizes)

    def as_dict(self) -> dict:
        return {"X": sorted(self.deleted), "S": sorted(self.bag), "size": len(self.separator),
                "draws": self.draws, "capped": self.capped, "components": self.component_sizes,
                "remaining": self.remaining, "balanced": self.balanced, "f_k": self.f_k}


def centroid_bag(g: Graph, td: TreeDecomp, vertices: Sequence[int]) -> frozenset[int]:
    """A bag whose removal leaves components of at most half of ``vertices``."""
    total = len(vertices)
    if total == 0:
        return frozenset()
    kids = td.children()
    below: dict = {}

    def collect(x) -> set[int]:
        acc = set(td.bags[x])
        for c in kids[x]:
            acc |= collect(c)
        below[x] = acc
        return acc

    # iterative post-order keeps deep trees off the recursion limit
    post, stack = [], [td.root()]
    while stack:
        x = stack.pop()
        post.append(x)
        stack.extend(kids[x])
    for x in reversed(post):
        acc = set(td.bags[x])
        for c in kids[x]:
            acc |= below[c]
        below[x] = acc
    x = td.root()
    while True:
        bag = td.bags[x]
        heavy = [c for c in kids[x] if 2 * len(below[c] - bag) > total]
        if not heavy:
            return frozenset(bag)
        x = heavy[0]


def balanced_separator(e: EnvelopeRep, k: int, seed: int) -> SeparatorResult:
    ctx = FragilityContext(e, k)
    n = ctx.n
    best = None
    draws = 0
    for idx in range(MAX_SEPARATOR_DRAWS):
        draws += 1
        smp = run_sample(ctx, seed, idx, decompose=False, check=False)
        if best is None or len(smp.deleted) < len(best.deleted):
            best = smp
        if len(smp.deleted) * k <= n:
            best = smp
            break
    capped = len(best.deleted) * k > n
    Xi = ctx.draw_int_offsets(seed, best.index)
    pos = {i for i, v in enumerate(e.order) if v in best.deleted}
    td, _ = ctx.decomposition(Xi, pos)
    survivors = [v for v in range(n) if v not in best.deleted]
    S = centroid_bag(e.graph, td, survivors)
    comps = connected_components(e.graph, best.deleted | S)
    sizes = sorted((len(c) for c in comps), reverse=True)
    return SeparatorResult(best.deleted, S, draws, capped, sizes, len(survivors), ctx.f)
