"""Exact axis-aligned geometry over the rationals.

Coordinates are :class:`fractions.Fraction` values. Intervals are closed and
of non-zero length; boxes are Cartesian products of such intervals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Number = Union[int, Fraction, str]


class GeometryError(ValueError):
    """Raised for malformed geometric input (degenerate intervals, dimension mismatch)."""


def as_rational(value: Number) -> Fraction:
    """Coerce ``value`` to a Fraction; floats are rejected to keep arithmetic exact."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise GeometryError(f"refusing inexact coordinate {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise GeometryError(f"cannot interpret {value!r} as a rational")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or ``"p"`` with integer p and positive q."""
    s = text.strip()
    num, sep, den = s.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise GeometryError(f"malformed rational {text!r}") from None
    if q <= 0:
        raise GeometryError(f"malformed rational {text!r}: denominator must be positive")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class Contact(enum.Enum):
    DISJOINT = "disjoint"
    TOUCH = "touch"
    OVERLAP = "overlap"


class BoxRelation(enum.Enum):
    DISJOINT = "disjoint"
    TOUCH = "touch"
    INTERIOR_OVERLAP = "interior_overlap"


class Comparability(enum.Enum):
    A_LE_B = "a_le_b"
    B_LE_A = "b_le_a"
    BOTH = "both"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        if not lo < hi:
            raise GeometryError(f"degenerate interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: Fraction) -> bool:
        return self.lo <= x <= self.hi

    def __repr__(self):
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


def interval_relation(a: Interval, b: Interval) -> tuple[Contact, Fraction | None]:
    """Classify how two closed intervals meet.

    Returns ``(Contact.TOUCH, x)`` when the intersection is the single point x,
    otherwise the contact kind with ``None``.
    """
    if a.hi < b.lo or b.hi < a.lo:
        return Contact.DISJOINT, None
    if a.hi == b.lo:
        return Contact.TOUCH, a.hi
    if b.hi == a.lo:
        return Contact.TOUCH, a.lo
    return Contact.OVERLAP, None


@dataclass(frozen=True)
class Box:
    sides: tuple[Interval, ...]

    def __post_init__(self):
        sides = tuple(self.sides)
        if not sides:
            raise GeometryError("a box needs at least one dimension")
        for s in sides:
            if not isinstance(s, Interval):
                raise GeometryError(f"box side {s!r} is not an Interval")
        object.__setattr__(self, "sides", sides)

    @classmethod
    def from_bounds(cls, bounds: Iterable[Sequence[Number]]) -> "Box":
        """Build a box from ``[(lo, hi), ...]`` pairs."""
        return cls(tuple(Interval(as_rational(lo), as_rational(hi)) for lo, hi in bounds))

    @classmethod
    def cube(cls, corner: Sequence[Number], side: Number) -> "Box":
        side = as_rational(side)
        return cls.from_bounds((as_rational(c), as_rational(c) + side) for c in corner)

    @property
    def dim(self) -> int:
        return len(self.sides)

    @property
    def lengths(self) -> tuple[Fraction, ...]:
        return tuple(s.length for s in self.sides)

    @property
    def lo(self) -> tuple[Fraction, ...]:
        return tuple(s.lo for s in self.sides)

    @property
    def hi(self) -> tuple[Fraction, ...]:
        return tuple(s.hi for s in self.sides)

    def __getitem__(self, j: int) -> Interval:
        return self.sides[j]

    def __iter__(self):
        return iter(self.sides)

    def __len__(self):
        return len(self.sides)

    def contains_point(self, point: Sequence[Fraction]) -> bool:
        _check_dims(self.dim, len(point))
        return all(s.lo <= x <= s.hi for s, x in zip(self.sides, point))

    def contains_box(self, other: "Box") -> bool:
        _check_dims(self.dim, other.dim)
        return all(a.lo <= b.lo and b.hi <= a.hi for a, b in zip(self.sides, other.sides))

    def as_pairs(self) -> list[tuple[Fraction, Fraction]]:
        return [(s.lo, s.hi) for s in self.sides]

    def __repr__(self):
        return "Box(" + " x ".join(repr(s) for s in self.sides) + ")"


def _check_dims(da: int, db: int) -> None:
    if da != db:
        raise GeometryError(f"dimension mismatch: {da} vs {db}")


def box_relation(a: Box, b: Box) -> BoxRelation:
    _check_dims(a.dim, b.dim)
    touched = False
    for sa, sb in zip(a.sides, b.sides):
        kind, _ = interval_relation(sa, sb)
        if kind is Contact.DISJOINT:
            return BoxRelation.DISJOINT
        if kind is Contact.TOUCH:
            touched = True
    return BoxRelation.TOUCH if touched else BoxRelation.INTERIOR_OVERLAP


def box_comparable(a: Box, b: Box) -> Comparability:
    """Decide translate-containment between ``a`` and ``b`` from side lengths."""
    _check_dims(a.dim, b.dim)
    le = all(x <= y for x, y in zip(a.lengths, b.lengths))
    ge = all(x >= y for x, y in zip(a.lengths, b.lengths))
    if le and ge:
        return Comparability.BOTH
    if le:
        return Comparability.A_LE_B
    if ge:
        return Comparability.B_LE_A
    return Comparability.INCOMPARABLE


def is_sqsubseteq(a: Box, b: Box) -> bool:
    """True iff ``b`` contains a translate of ``a``."""
    return box_comparable(a, b) in (Comparability.A_LE_B, Comparability.BOTH)


def translate_into(a: Box, b: Box) -> Box:
    """An explicit translate of ``a`` contained in ``b``, aligned at b's minimum corner."""
    if not is_sqsubseteq(a, b):
        raise GeometryError("no translate of a fits inside b")
    return translate(a, [sb.lo - sa.lo for sa, sb in zip(a.sides, b.sides)])


def overlap_fraction(a: Box, b: Box) -> Fraction:
    """Worst-case fraction of vol(a) that a translate of ``a`` through a point of ``b`` can share with ``b``.

    Per axis the best placement covers ``min(|a_j|, |b_j|)`` whatever the anchor,
    so the worst and best anchors agree and the value is a product of ratios.
    """
    _check_dims(a.dim, b.dim)
    out = Fraction(1)
    for la, lb in zip(a.lengths, b.lengths):
        out *= min(la, lb) / la
    return out


def box_sqsubseteq_s(a: Box, b: Box, s: int) -> bool:
    if s < 1:
        raise GeometryError("s must be a positive integer")
    return overlap_fraction(a, b) * s >= 1


def box_fully_touching(a: Box, b: Box) -> bool:
    """True iff the touching boxes share a (d-1)-dimensional piece."""
    if box_relation(a, b) is not BoxRelation.TOUCH:
        raise GeometryError("boxes do not touch")
    touches = sum(1 for sa, sb in zip(a.sides, b.sides)
                  if interval_relation(sa, sb)[0] is Contact.TOUCH)
    return touches == 1


def intersection(a: Box, b: Box) -> tuple[tuple[Fraction, Fraction], ...] | None:
    """Closed intersection as bound pairs (possibly degenerate), or None if empty."""
    _check_dims(a.dim, b.dim)
    out = []
    for sa, sb in zip(a.sides, b.sides):
        lo, hi = max(sa.lo, sb.lo), min(sa.hi, sb.hi)
        if lo > hi:
            return None
        out.append((lo, hi))
    return tuple(out)


def volume(b: Box) -> Fraction:
    return math.prod(b.lengths, start=Fraction(1))


def box_affine(b: Box, scale: Sequence[Number], shift: Sequence[Number]) -> Box:
    """Apply ``x -> scale[j] * x + shift[j]`` on every axis."""
    if len(scale) != b.dim or len(shift) != b.dim:
        raise GeometryError("scale/shift length must match box dimension")
    out = []
    for s, c, t in zip(b.sides, scale, shift):
        c, t = as_rational(c), as_rational(t)
        if c <= 0:
            raise GeometryError("scale factors must be positive")
        out.append(Interval(c * s.lo + t, c * s.hi + t))
    return Box(tuple(out))


def translate(b: Box, shift: Sequence[Number]) -> Box:
    return box_affine(b, [1] * b.dim, shift)


def cartesian_product(*boxes: Box | Interval) -> Box:
    sides: list[Interval] = []
    for x in boxes:
        if isinstance(x, Interval):
            sides.append(x)
        else:
            sides.extend(x.sides)
    return Box(tuple(sides))


def permute_axes(b: Box, source_axis: Sequence[int]) -> Box:
    """New box whose axis ``i`` is the old axis ``source_axis[i]``."""
    return Box(tuple(b.sides[j] for j in source_axis))


# --- integer kernel -------------------------------------------------------
#
# Verifiers scale every coordinate by a common denominator and work on plain
# ints; comparisons are then exact and far cheaper than Fraction comparisons.

def common_denominator(values: Iterable[Fraction]) -> int:
    den = 1
    for v in values:
        q = v.denominator
        if den % q:
            den = den * q // math.gcd(den, q)
    return den


def scale_to_int(x: Fraction, den: int) -> int:
    q, r = divmod(den, x.denominator)
    if r:
        raise GeometryError(f"{den} is not a multiple of the denominator of {x}")
    return x.numerator * q


class BoxTree:
    """Static bounding-volume hierarchy over closed integer boxes.

    ``los``/``his`` are sequences of equal-length int tuples. ``query`` returns
    the indices of boxes whose closed extent meets the closed query box.
    """

    LEAF = 8

    def __init__(self, los: Sequence[tuple[int, ...]], his: Sequence[tuple[int, ...]]):
        self.los = list(los)
        self.his = list(his)
        self._nodes: list = []
        if self.los:
            self._root = self._build(list(range(len(self.los))))
        else:
            self._root = None

    def _build(self, idx: list[int]):
        los, his = self.los, self.his
        d = len(los[idx[0]])
        lo = tuple(min(los[i][j] for i in idx) for j in range(d))
        hi = tuple(max(his[i][j] for i in idx) for j in range(d))
        if len(idx) <= self.LEAF:
            return (lo, hi, idx, None)
        axis = max(range(d), key=lambda j: hi[j] - lo[j])
        idx.sort(key=lambda i: los[i][axis] + his[i][axis])
        mid = len(idx) // 2
        return (lo, hi, None, (self._build(idx[:mid]), self._build(idx[mid:])))

    def query(self, qlo: tuple[int, ...], qhi: tuple[int, ...]) -> list[int]:
        out: list[int] = []
        if self._root is None:
            return out
        dims = range(len(qlo))
        stack = [self._root]
        los, his = self.los, self.his
        pop, push = stack.pop, stack.extend
        while stack:
            lo, hi, items, kids = pop()
            for j in dims:
                if hi[j] < qlo[j] or qhi[j] < lo[j]:
                    break
            else:
                if items is None:
                    push(kids)
                    continue
                for i in items:
                    li, hi_i = los[i], his[i]
                    for j in dims:
                        if hi_i[j] < qlo[j] or qhi[j] < li[j]:
                            break
                    else:
                        out.append(i)
        return out
