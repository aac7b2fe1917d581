"""
Global quadratic forms from planar behaviour.

A black-box Q on R^n is checked against the parallelogram law, homogeneity and
Q(0) = 0 on structured and random samples; if it passes, the Gram matrix is
assembled by polarization and re-verified. Failures come back as a replayable
witness.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Optional, Tuple

import numpy as np

from geometry.config import get_settings
from geometry.errors import (
    AsymmetricGram,
    DimensionMismatch,
    DimensionOutOfRange,
    NotPositiveDefinite,
    NotQuadratic,
    ScalarKindMismatch,
)
from geometry.linalg import Mat2, Scalar, ScalarKind, half, kind_of, lift, to_kind, unify

logger = logging.getLogger(__name__)

MIN_DIM = 2
MAX_DIM = 16


def _check_dim(n: int) -> None:
    if not MIN_DIM <= n <= MAX_DIM:
        raise DimensionOutOfRange(f"dimension must be in [{MIN_DIM}, {MAX_DIM}], got {n}")


@dataclass(frozen=True)
class VecN:
    coords: Tuple[Scalar, ...]

    def __post_init__(self):
        coords = tuple(lift(x) for x in self.coords)
        _check_dim(len(coords))
        unify(*coords)
        object.__setattr__(self, "coords", coords)

    @property
    def kind(self) -> ScalarKind:
        return kind_of(self.coords[0])

    @property
    def dim(self) -> int:
        return len(self.coords)

    @classmethod
    def zero(cls, n: int, kind: ScalarKind = ScalarKind.RATIONAL) -> VecN:
        return cls(tuple(to_kind(0, kind) for _ in range(n)))

    @classmethod
    def basis(cls, n: int, i: int, kind: ScalarKind = ScalarKind.RATIONAL) -> VecN:
        return cls(tuple(to_kind(1 if k == i else 0, kind) for k in range(n)))

    def _check(self, other: VecN) -> None:
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimensions {self.dim} and {other.dim} differ")
        if self.kind is not other.kind:
            raise ScalarKindMismatch(f"cannot combine {self.kind.value} and {other.kind.value} vectors")

    def __add__(self, other: VecN) -> VecN:
        self._check(other)
        return VecN(tuple(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: VecN) -> VecN:
        self._check(other)
        return VecN(tuple(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> VecN:
        return VecN(tuple(-x for x in self.coords))

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.coords)

    def scaled(self, s) -> VecN:
        s = to_kind(s, self.kind) if isinstance(s, int) else s
        unify(s, self.coords[0])
        return VecN(tuple(s * x for x in self.coords))


def _det(rows) -> Scalar:
    """Determinant by elimination with partial pivoting (exact for rationals)."""
    m = [list(r) for r in rows]
    n = len(m)
    det = to_kind(1, kind_of(m[0][0]))
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(m[r][col]))
        if m[pivot][col] == 0:
            return m[pivot][col] * 0
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det = det * m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col] / m[col][col]
            for k in range(col, n):
                m[r][k] -= factor * m[col][k]
    return det


@dataclass(frozen=True)
class GramN:
    """Exactly symmetric n×n Gram matrix."""

    rows: Tuple[Tuple[Scalar, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(lift(x) for x in row) for row in self.rows)
        n = len(rows)
        _check_dim(n)
        if any(len(row) != n for row in rows):
            raise DimensionMismatch("gram must be square")
        unify(*(x for row in rows for x in row))
        for i in range(n):
            for k in range(i + 1, n):
                if rows[i][k] != rows[k][i]:
                    raise AsymmetricGram(f"gram[{i}][{k}] != gram[{k}][{i}]")
        object.__setattr__(self, "rows", rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def kind(self) -> ScalarKind:
        return kind_of(self.rows[0][0])

    def bilinear(self, u: VecN, v: VecN) -> Scalar:
        if u.dim != self.dim or v.dim != self.dim:
            raise DimensionMismatch(f"vectors of dimension {u.dim}, {v.dim} against gram of {self.dim}")
        return sum((u.coords[i] * self.rows[i][k] * v.coords[k]
                    for i in range(self.dim) for k in range(self.dim)), to_kind(0, self.kind))

    def value(self, v: VecN) -> Scalar:
        return self.bilinear(v, v)

    def leading_minors(self) -> Tuple[Scalar, ...]:
        return tuple(_det([row[:k] for row in self.rows[:k]]) for k in range(1, self.dim + 1))

    def is_positive_definite(self) -> bool:
        return all(minor > 0 for minor in self.leading_minors())

    def restrict(self, i: int, k: int) -> Mat2:
        return Mat2(self.rows[i][i], self.rows[i][k], self.rows[k][i], self.rows[k][k])


@dataclass(frozen=True)
class FormEvaluator:
    """Deterministic v ↦ Q(v) on R^dim."""

    func: Callable[[VecN], Scalar]
    dim: int
    kind: ScalarKind = ScalarKind.RATIONAL
    name: str = "custom"

    def __post_init__(self):
        _check_dim(self.dim)

    def __call__(self, v: VecN) -> Scalar:
        if v.dim != self.dim:
            raise DimensionMismatch(f"evaluator is {self.dim}-dimensional, got a vector of {v.dim}")
        return self.func(v)

    @classmethod
    def from_gram(cls, gram: GramN) -> FormEvaluator:
        return cls(gram.value, gram.dim, gram.kind, "gram")

    @classmethod
    def sphere(cls, dim: int, kind: ScalarKind = ScalarKind.RATIONAL) -> FormEvaluator:
        return cls(lambda v: sum((x * x for x in v), to_kind(0, kind)), dim, kind, "sphere")

    @classmethod
    def quartic(cls, dim: int, kind: ScalarKind = ScalarKind.RATIONAL) -> FormEvaluator:
        return cls(lambda v: sum((x ** 4 for x in v), to_kind(0, kind)), dim, kind, "quartic")


def restrict_evaluator(q: FormEvaluator, i: int, k: int) -> FormEvaluator:
    """Q restricted to the coordinate plane spanned by e_i and e_k."""

    def planar(v: VecN) -> Scalar:
        x, y = v.coords
        coords = [to_kind(0, q.kind)] * q.dim
        coords[i], coords[k] = x, y
        return q(VecN(tuple(coords)))

    return FormEvaluator(planar, 2, q.kind, f"{q.name}|({i},{k})")


# ===== Residuals =====

def _same_dim(q: FormEvaluator, *vectors: VecN) -> None:
    for v in vectors:
        if v.dim != q.dim:
            raise DimensionMismatch(f"evaluator is {q.dim}-dimensional, got a vector of {v.dim}")


def polarize_eval(q: FormEvaluator, u: VecN, v: VecN) -> Scalar:
    """⟨u, v⟩ = ½(Q(u+v) − Q(u) − Q(v))."""
    _same_dim(q, u, v)
    return (q(u + v) - q(u) - q(v)) * half(q.kind)


def parallelogram_residual(q: FormEvaluator, a: VecN, b: VecN) -> Scalar:
    """2Q(a) + 2Q(b) − Q(a+b) − Q(a−b)."""
    _same_dim(q, a, b)
    return 2 * q(a) + 2 * q(b) - q(a + b) - q(a - b)


def homogeneity_residual(q: FormEvaluator, lam: Scalar, v: VecN) -> Scalar:
    """Q(λv) − λ²Q(v)."""
    _same_dim(q, v)
    return q(v.scaled(lam)) - lam * lam * q(v)


def biadditivity_residual(q: FormEvaluator, u: VecN, v: VecN, w: VecN) -> Scalar:
    """⟨u, v⟩ + ⟨u, w⟩ − ⟨u, v + w⟩."""
    return polarize_eval(q, u, v) + polarize_eval(q, u, w) - polarize_eval(q, u, v + w)


# ===== Witnesses =====

@dataclass(frozen=True)
class Witness:
    kind: str  # zero | parallelogram | homogeneity | reconstruction
    vectors: Tuple[VecN, ...]
    residual: Scalar
    lam: Optional[Scalar] = None


def replay_witness(q: FormEvaluator, witness: Witness) -> Scalar:
    if witness.kind == "zero":
        return q(witness.vectors[0])
    if witness.kind == "parallelogram":
        return parallelogram_residual(q, *witness.vectors)
    if witness.kind == "homogeneity":
        return homogeneity_residual(q, witness.lam, witness.vectors[0])
    if witness.kind == "reconstruction":
        gram = GramN(tuple(tuple(polarize_eval(q, VecN.basis(q.dim, i, q.kind), VecN.basis(q.dim, k, q.kind))
                                 for k in range(q.dim)) for i in range(q.dim)))
        v = witness.vectors[0]
        return gram.value(v) - q(v)
    raise ValueError(f"unknown witness kind {witness.kind!r}")


# ===== Sampling =====

def _random_scalar(rng: np.random.Generator, kind: ScalarKind) -> Scalar:
    if kind is ScalarKind.RATIONAL:
        return Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
    return float(rng.uniform(-2.0, 2.0))


def _random_vec(rng: np.random.Generator, n: int, kind: ScalarKind) -> VecN:
    return VecN(tuple(_random_scalar(rng, kind) for _ in range(n)))


def _violates(residual: Scalar, tol: Scalar) -> bool:
    return abs(residual) > tol


def patch_form(
    q: FormEvaluator,
    trials: Optional[int] = None,
    tol: Optional[Scalar] = None,
    seed: int = 0,
) -> GramN:
    """Assemble the global Gram matrix of Q, or raise NotQuadratic with a witness."""
    settings = get_settings()
    trials = settings.patch_trials if trials is None else trials
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n, kind = q.dim, q.kind
    tol = to_kind(0 if tol is None else tol, kind)
    rng = np.random.default_rng(seed)
    basis = [VecN.basis(n, i, kind) for i in range(n)]

    origin = VecN.zero(n, kind)
    value = q(origin)
    if _violates(value, tol):
        raise NotQuadratic(Witness("zero", (origin,), value))

    for i in range(n):
        for k in range(i + 1, n):
            for a, b in ((basis[i], basis[k]), (basis[i], basis[i] + basis[k])):
                residual = parallelogram_residual(q, a, b)
                if _violates(residual, tol):
                    raise NotQuadratic(Witness("parallelogram", (a, b), residual))

    for _ in range(trials):
        lam, v = _random_scalar(rng, kind), _random_vec(rng, n, kind)
        residual = homogeneity_residual(q, lam, v)
        if _violates(residual, tol):
            raise NotQuadratic(Witness("homogeneity", (v,), residual, lam))

    for _ in range(trials):
        a, b = _random_vec(rng, n, kind), _random_vec(rng, n, kind)
        residual = parallelogram_residual(q, a, b)
        if _violates(residual, tol):
            raise NotQuadratic(Witness("parallelogram", (a, b), residual))

    gram = GramN(tuple(tuple(polarize_eval(q, basis[i], basis[k]) for k in range(n)) for i in range(n)))

    for _ in range(trials):
        v = _random_vec(rng, n, kind)
        residual = gram.value(v) - q(v)
        if _violates(residual, tol):
            raise NotQuadratic(Witness("reconstruction", (v,), residual))

    if not gram.is_positive_definite():
        raise NotPositiveDefinite(f"assembled gram has leading minors {gram.leading_minors()}")
    logger.debug("Patched %d-dimensional form from %d trials", n, trials)
    return gram
