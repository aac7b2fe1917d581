"""
Exact and floating 2x2 algebra.

Two scalar backends live side by side: exact rationals (`fractions.Fraction`,
always in lowest terms with a positive denominator) and 64-bit floats. Python
ints are promoted to rationals. Operations refuse to mix the two kinds; the
only crossing point is `to_kind`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Tuple, Union

from geometry.config import get_settings
from geometry.errors import IrrationalValue, MalformedInput, NotTraceless, ScalarKindMismatch, SingularMatrix

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, float]


class ScalarKind(str, Enum):
    RATIONAL = "rational"
    FLOAT = "float"


# ===== Scalars =====

def lift(x) -> Scalar:
    """Promote ints to rationals and pass scalars through unchanged."""
    if isinstance(x, bool):
        raise TypeError(f"not a scalar: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (Fraction, float)):
        return x
    raise TypeError(f"not a scalar: {x!r}")


def kind_of(x) -> ScalarKind:
    x = lift(x)
    return ScalarKind.RATIONAL if isinstance(x, Fraction) else ScalarKind.FLOAT


def to_kind(x, kind: ScalarKind) -> Scalar:
    """Explicit conversion into the given backend."""
    if isinstance(x, bool):
        raise TypeError(f"not a scalar: {x!r}")
    if kind is ScalarKind.RATIONAL:
        return x if isinstance(x, Fraction) else Fraction(x)
    return float(x)


def unify(*values) -> ScalarKind:
    """Common kind of the values; raises when they disagree."""
    kinds = {kind_of(v) for v in values}
    if len(kinds) != 1:
        raise ScalarKindMismatch(f"cannot mix scalar kinds {sorted(k.value for k in kinds)}")
    return kinds.pop()


def is_zero(x: Scalar, tol: Optional[float] = None) -> bool:
    if isinstance(x, Fraction):
        return x == 0
    return abs(x) <= (get_settings().float_tol if tol is None else tol)


def close(x: Scalar, y: Scalar, tol: Optional[float] = None) -> bool:
    unify(x, y)
    return is_zero(x - y, tol)


def rational_sqrt(x: Fraction) -> Optional[Fraction]:
    """Exact square root of a non-negative rational, or None when it is irrational."""
    if x < 0:
        return None
    num, den = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if num * num == x.numerator and den * den == x.denominator:
        return Fraction(num, den)
    return None


def scalar_sqrt(x: Scalar) -> Optional[Scalar]:
    if isinstance(x, Fraction):
        return rational_sqrt(x)
    return math.sqrt(x) if x >= 0 else None


def half(kind: ScalarKind) -> Scalar:
    return to_kind(Fraction(1, 2), kind)


# ===== Vectors and matrices =====

@dataclass(frozen=True)
class Vec2:
    x1: Scalar
    x2: Scalar

    def __post_init__(self):
        x1, x2 = lift(self.x1), lift(self.x2)
        unify(x1, x2)
        object.__setattr__(self, "x1", x1)
        object.__setattr__(self, "x2", x2)

    @property
    def kind(self) -> ScalarKind:
        return kind_of(self.x1)

    @classmethod
    def zero(cls, kind: ScalarKind = ScalarKind.RATIONAL) -> Vec2:
        return cls(to_kind(0, kind), to_kind(0, kind))

    @classmethod
    def basis(cls, index: int, kind: ScalarKind = ScalarKind.RATIONAL) -> Vec2:
        zero, one = to_kind(0, kind), to_kind(1, kind)
        return cls(one, zero) if index == 0 else cls(zero, one)

    def _check(self, other: Vec2) -> None:
        if self.kind is not other.kind:
            raise ScalarKindMismatch(f"cannot combine {self.kind.value} and {other.kind.value} vectors")

    def __add__(self, other: Vec2) -> Vec2:
        self._check(other)
        return Vec2(self.x1 + other.x1, self.x2 + other.x2)

    def __sub__(self, other: Vec2) -> Vec2:
        self._check(other)
        return Vec2(self.x1 - other.x1, self.x2 - other.x2)

    def __neg__(self) -> Vec2:
        return Vec2(-self.x1, -self.x2)

    def __iter__(self) -> Iterator[Scalar]:
        yield self.x1
        yield self.x2

    def scaled(self, s) -> Vec2:
        s = lift(s)
        if isinstance(s, Fraction) and s.denominator == 1 and self.kind is ScalarKind.FLOAT:
            s = float(s)
        unify(s, self.x1)
        return Vec2(s * self.x1, s * self.x2)

    def is_zero(self, tol: Optional[float] = None) -> bool:
        return is_zero(self.x1, tol) and is_zero(self.x2, tol)

    def close(self, other: Vec2, tol: Optional[float] = None) -> bool:
        self._check(other)
        return (self - other).is_zero(tol)

    def as_float(self) -> Vec2:
        return Vec2(float(self.x1), float(self.x2))


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 matrix."""

    a11: Scalar
    a12: Scalar
    a21: Scalar
    a22: Scalar

    def __post_init__(self):
        entries = [lift(e) for e in (self.a11, self.a12, self.a21, self.a22)]
        unify(*entries)
        for name, value in zip(("a11", "a12", "a21", "a22"), entries):
            object.__setattr__(self, name, value)

    @property
    def kind(self) -> ScalarKind:
        return kind_of(self.a11)

    @classmethod
    def from_rows(cls, rows, kind: Optional[ScalarKind] = None) -> Mat2:
        (a11, a12), (a21, a22) = rows
        entries = (a11, a12, a21, a22)
        if kind is not None:
            entries = tuple(to_kind(e, kind) for e in entries)
        return cls(*entries)

    @classmethod
    def scalar(cls, s, kind: Optional[ScalarKind] = None) -> Mat2:
        s = lift(s) if kind is None else to_kind(s, kind)
        zero = to_kind(0, kind_of(s))
        return cls(s, zero, zero, s)

    @classmethod
    def identity(cls, kind: ScalarKind = ScalarKind.RATIONAL) -> Mat2:
        return cls.scalar(1, kind)

    @classmethod
    def zero(cls, kind: ScalarKind = ScalarKind.RATIONAL) -> Mat2:
        return cls.scalar(0, kind)

    def rows(self) -> Tuple[Tuple[Scalar, Scalar], Tuple[Scalar, Scalar]]:
        return ((self.a11, self.a12), (self.a21, self.a22))

    def entries(self) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
        return (self.a11, self.a12, self.a21, self.a22)

    def _check(self, other) -> None:
        if self.kind is not other.kind:
            raise ScalarKindMismatch(f"cannot combine {self.kind.value} and {other.kind.value} operands")

    def __add__(self, other: Mat2) -> Mat2:
        self._check(other)
        return Mat2(*(x + y for x, y in zip(self.entries(), other.entries())))

    def __sub__(self, other: Mat2) -> Mat2:
        self._check(other)
        return Mat2(*(x - y for x, y in zip(self.entries(), other.entries())))

    def __neg__(self) -> Mat2:
        return Mat2(*(-x for x in self.entries()))

    def __matmul__(self, other):
        self._check(other)
        if isinstance(other, Vec2):
            return Vec2(self.a11 * other.x1 + self.a12 * other.x2,
                        self.a21 * other.x1 + self.a22 * other.x2)
        return Mat2(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def scaled(self, s) -> Mat2:
        s = lift(s)
        if isinstance(s, Fraction) and s.denominator == 1 and self.kind is ScalarKind.FLOAT:
            s = float(s)
        unify(s, self.a11)
        return Mat2(*(s * x for x in self.entries()))

    def transpose(self) -> Mat2:
        return Mat2(self.a11, self.a21, self.a12, self.a22)

    def trace(self) -> Scalar:
        return self.a11 + self.a22

    def det(self) -> Scalar:
        return self.a11 * self.a22 - self.a12 * self.a21

    def inverse(self) -> Mat2:
        d = self.det()
        if is_zero(d):
            raise SingularMatrix(f"matrix {self.rows()} is not invertible")
        inv = 1 / d if isinstance(d, float) else Fraction(1) / d
        return Mat2(self.a22 * inv, -self.a12 * inv, -self.a21 * inv, self.a11 * inv)

    def power(self, n: int) -> Mat2:
        if n < 0:
            return self.inverse().power(-n)
        result, base = Mat2.identity(self.kind), self
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    def max_abs(self) -> Scalar:
        return max(abs(x) for x in self.entries())

    def is_scalar(self, tol: Optional[float] = None) -> bool:
        return is_zero(self.a12, tol) and is_zero(self.a21, tol) and is_zero(self.a11 - self.a22, tol)

    def is_zero(self, tol: Optional[float] = None) -> bool:
        return all(is_zero(x, tol) for x in self.entries())

    def close(self, other: Mat2, tol: Optional[float] = None) -> bool:
        self._check(other)
        return (self - other).is_zero(tol)

    def as_float(self) -> Mat2:
        return Mat2(*(float(x) for x in self.entries()))


# ===== Characteristic polynomial and eigenvalues =====

def char_poly(m: Mat2) -> Tuple[Scalar, Scalar]:
    """(trace, det) so that the characteristic polynomial is x^2 - trace*x + det."""
    return m.trace(), m.det()


def cayley_hamilton_residual(m: Mat2) -> Mat2:
    trace, det = char_poly(m)
    return m @ m - m.scaled(trace) + Mat2.scalar(det)


def discriminant(m: Mat2) -> Scalar:
    trace, det = char_poly(m)
    return trace * trace - 4 * det


def real_eigenvalues(m: Mat2, tol: Optional[float] = None) -> Tuple[Scalar, ...]:
    """Real roots of the characteristic polynomial, largest first.

    Empty when the roots are complex. The rational backend raises
    IrrationalValue rather than approximating an irrational root.
    """
    trace = m.trace()
    disc = discriminant(m)
    h = half(m.kind)
    if isinstance(disc, float):
        if disc < -(get_settings().float_tol if tol is None else tol):
            return ()
        root = math.sqrt(max(disc, 0.0))
    else:
        if disc < 0:
            return ()
        root = rational_sqrt(disc)
        if root is None:
            raise IrrationalValue(f"eigenvalues of {m.rows()} are irrational (discriminant {disc})")
    return ((trace + root) * h, (trace - root) * h)


# ===== Wedge form =====

@dataclass(frozen=True)
class WedgeForm:
    """The antisymmetric form u ∧ v = c·(u1·v2 − u2·v1)."""

    c: Scalar

    def __post_init__(self):
        c = lift(self.c)
        if c == 0:
            raise MalformedInput("wedge", "wedge normalization must be nonzero")
        object.__setattr__(self, "c", c)

    @property
    def kind(self) -> ScalarKind:
        return kind_of(self.c)

    @classmethod
    def standard(cls, kind: ScalarKind = ScalarKind.RATIONAL) -> WedgeForm:
        return cls(to_kind(1, kind))


def wedge(w: WedgeForm, u: Vec2, v: Vec2) -> Scalar:
    unify(w.c, u.x1, v.x1)
    return w.c * (u.x1 * v.x2 - u.x2 * v.x1)


# ===== Traceless decomposition =====

@dataclass(frozen=True)
class TracelessDecomposition:
    """m = tau·I + j with tr(j) = 0 and j·j = j_square·I."""

    tau: Scalar
    j: Mat2
    j_square: Scalar

    def reconstruct(self) -> Mat2:
        return Mat2.scalar(self.tau) + self.j

    def is_nilpotent(self, tol: Optional[float] = None) -> bool:
        """j ≠ 0 but j² = 0. Float inputs compare j² against the size of j."""
        if self.j.is_zero(tol):
            return False
        if isinstance(self.j_square, Fraction):
            return self.j_square == 0
        scale = float(self.j.max_abs()) ** 2
        return abs(self.j_square) <= (get_settings().match_tol if tol is None else tol) * scale


def traceless_decompose(m: Mat2) -> TracelessDecomposition:
    trace, det = char_poly(m)
    tau = trace * half(m.kind)
    j = m - Mat2.scalar(tau)
    j_square = tau * tau - det
    if not (j @ j).close(Mat2.scalar(j_square), tol=get_settings().match_tol):
        logger.warning("Cayley-Hamilton check drifted for %s", m.rows())
    return TracelessDecomposition(tau=tau, j=j, j_square=j_square)


def inverse_from_traceless(m: Mat2) -> Mat2:
    """For det(m) = 1: m⁻¹ = tau·I − j."""
    if not close(m.det(), to_kind(1, m.kind), tol=get_settings().match_tol):
        raise ValueError(f"inverse_from_traceless needs det 1, got {m.det()}")
    parts = traceless_decompose(m)
    return Mat2.scalar(parts.tau) - parts.j


def is_traceless(m: Mat2, tol: Optional[float] = None) -> bool:
    return is_zero(m.trace(), tol)


def traceless_inner(a: Mat2, b: Mat2) -> Scalar:
    """⟨a, b⟩ = ½·tr(a·b) on traceless operators."""
    for name, m in (("a", a), ("b", b)):
        if not is_traceless(m):
            raise NotTraceless(f"{name} has trace {m.trace()}")
    return (a @ b).trace() * half(a.kind)


def traceless_basis(kind: ScalarKind = ScalarKind.RATIONAL) -> Tuple[Mat2, Mat2, Mat2]:
    """diag(1, −1), the symmetric swap and the quarter turn: signature (+, +, −)."""
    d = Mat2.from_rows(((1, 0), (0, -1)), kind)
    s = Mat2.from_rows(((0, 1), (1, 0)), kind)
    r = Mat2.from_rows(((0, 1), (-1, 0)), kind)
    return d, s, r


def traceless_gram(kind: ScalarKind = ScalarKind.RATIONAL) -> Tuple[Tuple[Scalar, ...], ...]:
    basis = traceless_basis(kind)
    return tuple(tuple(traceless_inner(x, y) for y in basis) for x in basis)
