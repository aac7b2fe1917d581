"""
Axiom-level plane geometry under a chart.

Points carry their coordinates in the ambient chart. The middle operation is the
algebraic mean; rulers are arithmetic progressions of points; vectors are
classes of point pairs under the parallelogram relation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

from geometry.errors import BadBounds, BadIndices, DegenerateLine, MalformedInput, MissingNegation, NotARuler, TooShort
from geometry.invariant import GroupClosure, same_length
from geometry.linalg import Mat2, Scalar, ScalarKind, Vec2, half, lift, to_kind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Point:
    coords: Vec2

    @classmethod
    def of(cls, x1, x2) -> Point:
        return cls(Vec2(x1, x2))

    @property
    def kind(self) -> ScalarKind:
        return self.coords.kind


@dataclass(frozen=True)
class Chart:
    """The coordinate map x ↦ offset + sign·x."""

    offset: Vec2
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise MalformedInput("sign", f"chart sign must be +1 or -1, got {self.sign}")

    @classmethod
    def translation(cls, offset: Vec2) -> Chart:
        return cls(offset, 1)

    @classmethod
    def point_reflection(cls, offset: Vec2) -> Chart:
        return cls(offset, -1)

    def apply(self, p: Point) -> Point:
        return Point(self.offset + p.coords.scaled(self.sign))

    def fixed_point(self) -> Optional[Point]:
        """The unique fixed point of a point reflection; translations have none to single out."""
        if self.sign == 1:
            return None
        return Point(self.offset.scaled(half(self.offset.kind)))


@dataclass(frozen=True)
class Ruler:
    points: Tuple[Point, ...]

    def __post_init__(self):
        if len(self.points) < 3:
            raise TooShort(f"an n-ruler needs n >= 2, got {len(self.points)} points")
        if not is_ruler(self.points):
            raise NotARuler("points do not satisfy the middle recurrence")

    @property
    def n(self) -> int:
        return len(self.points) - 1

    def __getitem__(self, i: int) -> Point:
        return self.points[i]


@dataclass(frozen=True)
class GeoVector:
    rep: Vec2


# ===== Middle, rulers and lines =====

def middle(a: Point, b: Point) -> Point:
    return Point((a.coords + b.coords).scaled(half(a.kind)))


def _at(a: Point, b: Point, q: Fraction) -> Point:
    """b + q·(a − b)."""
    return Point(b.coords + (a.coords - b.coords).scaled(to_kind(q, a.kind)))


def ruler_between(a: Point, b: Point, k: int, l: int, n: int) -> Ruler:
    """The unique n-ruler with c_k = a and c_l = b."""
    if not (n >= k > l >= 0 and n >= 2):
        raise BadIndices(f"need n >= k > l >= 0 and n >= 2, got k={k}, l={l}, n={n}")
    return Ruler(tuple(_at(a, b, Fraction(i - l, k - l)) for i in range(n + 1)))


def is_ruler(seq: Sequence[Point]) -> bool:
    if len(seq) < 3:
        raise TooShort(f"need at least 3 points, got {len(seq)}")
    return all(seq[i].coords.close(middle(seq[i - 1], seq[i + 1]).coords) for i in range(1, len(seq) - 1))


def rational_line(a: Point, b: Point, num_bound: int, den_bound: int) -> FrozenSet[Point]:
    """{b + q·(a − b) : q = p/d, |p| <= num_bound, 1 <= d <= den_bound}."""
    if a.coords.close(b.coords):
        raise DegenerateLine("a rational line needs two distinct points")
    if num_bound < 1 or den_bound < 1:
        raise BadBounds(f"bounds must be >= 1, got ({num_bound}, {den_bound})")
    params = {Fraction(p, d) for p in range(-num_bound, num_bound + 1) for d in range(1, den_bound + 1)}
    return frozenset(_at(a, b, q) for q in params)


def line_point_construction(a: Point, b: Point, q: Fraction) -> Tuple[Ruler, int]:
    """A ruler_between call whose output holds b + q·(a − b), and the index where it sits."""
    q = Fraction(q)
    p, d = q.numerator, q.denominator
    l = max(0, -p)
    k = l + d
    index = l + p
    n = max(k, index, 2)
    return ruler_between(a, b, k, l, n), index


# ===== Parallelograms and vectors =====

def is_parallelogram(a: Point, b: Point, c: Point, d: Point) -> bool:
    """(a, b, c, d) with equal middles of the diagonals, i.e. a − b = d − c."""
    by_middles = middle(a, c).coords.close(middle(b, d).coords)
    by_differences = (a.coords - b.coords).close(d.coords - c.coords)
    if by_middles != by_differences:
        raise AssertionError(f"parallelogram characterizations disagree on {(a, b, c, d)}")
    return by_middles


def complete_parallelogram(a: Point, b: Point, c: Point) -> Point:
    """The d with (a, b, c, d) a parallelogram: b reflected through middle(a, c)."""
    centre = middle(a, c)
    return Chart.point_reflection(centre.coords.scaled(2)).apply(b)


def vector_between(a: Point, b: Point) -> GeoVector:
    return GeoVector(b.coords - a.coords)


def add(v: GeoVector, w: GeoVector) -> GeoVector:
    return GeoVector(v.rep + w.rep)


def scale(lam: Scalar, v: GeoVector) -> GeoVector:
    lam = lift(lam)
    return GeoVector(v.rep.scaled(lam))


def translate(p: Point, v: GeoVector) -> Point:
    return Point(p.coords + v.rep)


# ===== Axiom 1 maps =====

@dataclass(frozen=True)
class Axiom1Report:
    holds: bool
    checked_triples: int
    checked_pairs: int
    counterexample: Optional[str] = None


def check_axiom1_maps(samples: Iterable[Point], anchor: Vec2, group: GroupClosure) -> Axiom1Report:
    """Check that x ↦ anchor ± x carry middles to middles and keep length classes."""
    if not group.contains(-Mat2.identity(group.kind)):
        raise MissingNegation("x ↦ a − x only preserves lengths when −I is an isometry")
    samples = list(samples)
    vectors = [(a, b) for a, b in permutations(samples, 2)]
    triples = pairs = 0

    for chart in (Chart.translation(anchor), Chart.point_reflection(anchor)):
        name = "translation" if chart.sign == 1 else "point reflection"
        for a, b in combinations_with_replacement(samples, 2):
            triples += 1
            if not chart.apply(middle(a, b)).coords.close(middle(chart.apply(a), chart.apply(b)).coords):
                return Axiom1Report(False, triples, pairs, f"{name} moves middle of {a}, {b}")
        for (a, b), (c, d) in product(vectors, repeat=2):
            pairs += 1
            before = same_length(vector_between(a, b).rep, vector_between(c, d).rep, group)
            after = same_length(
                vector_between(chart.apply(a), chart.apply(b)).rep,
                vector_between(chart.apply(c), chart.apply(d)).rep,
                group,
            )
            if before != after:
                return Axiom1Report(False, triples, pairs, f"{name} changes length class of {(a, b)} vs {(c, d)}")

    logger.debug("Axiom 1 maps hold on %d triples and %d pairs", triples, pairs)
    return Axiom1Report(True, triples, pairs)
