"""
Bounded 2x2 matrix groups and G-invariant positive-definite quadratic forms.

Three independent synthesizers produce the invariant form:

- `synth_averaging`: uniform average of the pulled-back Gram over a finite closure.
- `synth_contraction`: barycentric iteration on the orbit, shrinking its diameter
  until the generators fix the form.
- `synth_algebraic`: the closed-form construction B(u, v) = (J u) ∧ v from a
  determinant-1, non-scalar member, with the {±1, ±A} case handled separately.

Every result carries a `SynthesisReport` with its invariance residual.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from geometry.config import get_settings
from geometry.errors import (
    AsymmetricGram,
    IncompleteClosure,
    IrrationalValue,
    MalformedInput,
    NoConvergence,
    NotPositiveDefinite,
    ScalarKindMismatch,
    ScreenFailed,
    SingularGenerator,
)
from geometry.linalg import (
    Mat2,
    Scalar,
    ScalarKind,
    Vec2,
    WedgeForm,
    close,
    half,
    is_zero,
    real_eigenvalues,
    to_kind,
    traceless_decompose,
    wedge,
)
from geometry.wire import mat_from_wire, mat_to_wire, sort_key

logger = logging.getLogger(__name__)


# ===== Domain types =====

@dataclass(frozen=True)
class QuadraticForm:
    """Q(v) = vᵀ·gram·v with an exactly symmetric Gram matrix (p, q; q, r)."""

    gram: Mat2

    def __post_init__(self):
        if self.gram.a12 != self.gram.a21:
            raise AsymmetricGram(f"gram {self.gram.rows()} is not symmetric")

    @property
    def kind(self) -> ScalarKind:
        return self.gram.kind

    @classmethod
    def from_entries(cls, p, q, r, kind: Optional[ScalarKind] = None) -> QuadraticForm:
        return cls(Mat2.from_rows(((p, q), (q, r)), kind))

    @classmethod
    def standard(cls, kind: ScalarKind = ScalarKind.RATIONAL) -> QuadraticForm:
        return cls(Mat2.identity(kind))

    def value(self, v: Vec2) -> Scalar:
        return self.bilinear(v, v)

    def bilinear(self, u: Vec2, v: Vec2) -> Scalar:
        w = self.gram @ v
        return u.x1 * w.x1 + u.x2 * w.x2

    def scaled(self, s) -> QuadraticForm:
        return QuadraticForm(self.gram.scaled(s))

    def as_float(self) -> QuadraticForm:
        return QuadraticForm(self.gram.as_float())


class GroupSpec(BaseModel):
    """Input description of a matrix group: explicit elements and/or generators."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True, extra="ignore")

    scalar: ScalarKind = ScalarKind.RATIONAL
    generators: Tuple[Mat2, ...] = ()
    elements: Tuple[Mat2, ...] = ()
    closure_limit: int = Field(default_factory=lambda: get_settings().closure_limit, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _parse_matrices(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        given = data.get("scalar")
        if given is None:
            ready = [m for key in ("generators", "elements") for m in (data.get(key) or ()) if isinstance(m, Mat2)]
            kind = ready[0].kind if ready else ScalarKind.RATIONAL
        else:
            try:
                kind = ScalarKind(given)
            except ValueError:
                raise MalformedInput("scalar", f"expected 'rational' or 'float', got {given!r}")
        data["scalar"] = kind
        for key in ("generators", "elements"):
            raw = data.get(key) or ()
            if not isinstance(raw, (list, tuple)):
                raise MalformedInput(key, "expected a list of 2x2 matrices")
            data[key] = tuple(mat_from_wire(m, kind, f"{key}[{i}]") for i, m in enumerate(raw))
        return data

    @model_validator(mode="after")
    def _check_matrices(self):
        if not self.generators and not self.elements:
            raise ValueError("at least one of generators / elements must be nonempty")
        for m in self.seeds:
            if m.kind is not self.scalar:
                raise ValueError(f"matrix {m.rows()} is {m.kind.value}, expected {self.scalar.value}")
        return self

    @property
    def seeds(self) -> Tuple[Mat2, ...]:
        return self.generators + self.elements

    def to_wire(self) -> dict:
        return {
            "scalar": self.scalar.value,
            "generators": [mat_to_wire(m) for m in self.generators],
            "elements": [mat_to_wire(m) for m in self.elements],
            "closure_limit": self.closure_limit,
        }


@dataclass(frozen=True)
class GroupClosure:
    """Enumerated members (breadth-first order, identity first).

    complete=False marks a sampled prefix of an infinite group.
    """

    members: Tuple[Mat2, ...]
    complete: bool

    @property
    def kind(self) -> ScalarKind:
        return self.members[0].kind

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def contains(self, m: Mat2) -> bool:
        tol = get_settings().match_tol
        return any(member.close(m, tol) for member in self.members)

    def sorted_members(self) -> Tuple[Mat2, ...]:
        return tuple(sorted(self.members, key=sort_key))


class Method(str, Enum):
    AVERAGING = "averaging"
    CONTRACTION = "contraction"
    ALGEBRAIC = "algebraic"


@dataclass(frozen=True)
class SynthesisReport:
    method: Method
    iterations: int
    contraction_ratio: Optional[float]
    residual: Scalar
    ratios: Tuple[float, ...] = ()
    detail: str = ""


class ScreenReason(str, Enum):
    DETERMINANT = "determinant not ±1"
    EIGENVALUE = "real eigenvalue not ±1"
    TRACE = "|trace| > 2 at determinant 1"
    NILPOTENT = "nilpotent traceless part"


@dataclass(frozen=True)
class ScreenReport:
    passed: bool
    reason: Optional[ScreenReason] = None
    witness: Optional[Mat2] = None
    detail: str = ""


@dataclass(frozen=True)
class AxiomReport:
    negation_present: bool
    screen: ScreenReport
    isotropy_lengths: str
    isotropy_lines: str
    notes: Tuple[str, ...] = field(default_factory=tuple)


# ===== Closure and screening =====

def _member_key(m: Mat2):
    if m.kind is ScalarKind.RATIONAL:
        return m
    step = get_settings().match_tol
    return tuple(round(x / step) for x in m.entries())


def close_group(spec: GroupSpec) -> GroupClosure:
    """Breadth-first closure of the seeds under products with seeds and their inverses."""
    step = []
    for i, m in enumerate(spec.seeds):
        if is_zero(m.det()):
            raise SingularGenerator(f"generator {i} {m.rows()} is singular")
        step.extend((m, m.inverse()))

    identity = Mat2.identity(spec.scalar)
    members = {_member_key(identity): identity}
    boundary = [identity]
    while boundary:
        next_boundary = []
        for b in boundary:
            for g in step:
                c = b @ g
                key = _member_key(c)
                if key in members:
                    continue
                if len(members) >= spec.closure_limit:
                    logger.debug("Closure stopped at limit %d (sampled)", spec.closure_limit)
                    return GroupClosure(tuple(members.values()), complete=False)
                members[key] = c
                next_boundary.append(c)
        boundary = next_boundary

    logger.debug("Closure complete with %d members", len(members))
    return GroupClosure(tuple(members.values()), complete=True)


def _exceeds(x: Scalar, bound, tol: float) -> bool:
    if isinstance(x, Fraction):
        return x > bound
    return x > bound + tol


def _screen_member(m: Mat2) -> Optional[Tuple[ScreenReason, str]]:
    tol = get_settings().match_tol
    one = to_kind(1, m.kind)
    det = m.det()
    if not (close(det, one, tol) or close(det, -one, tol)):
        return ScreenReason.DETERMINANT, f"det = {det}"

    try:
        roots = real_eigenvalues(m)
        exact = True
    except IrrationalValue:
        roots, exact = (), False
    foreign = [r for r in roots if not (close(r, one, tol) or close(r, -one, tol))]
    if foreign:
        return ScreenReason.EIGENVALUE, f"eigenvalue {foreign[0]}"

    det_one = close(det, one, tol)
    if det_one and _exceeds(abs(m.trace()), 2, tol):
        return ScreenReason.TRACE, f"trace {m.trace()}"
    if not exact:
        return ScreenReason.EIGENVALUE, "irrational real eigenvalue"
    if det_one and traceless_decompose(m).is_nilpotent():
        return ScreenReason.NILPOTENT, "(±A)^n = I + n·J grows without bound"
    return None


def boundedness_screen(g: GroupClosure) -> ScreenReport:
    """Reject members that no bounded group can contain."""
    for m in g.members:
        verdict = _screen_member(m)
        if verdict is not None:
            reason, detail = verdict
            logger.debug("Screen rejected %s: %s (%s)", m.rows(), reason.value, detail)
            return ScreenReport(passed=False, reason=reason, witness=m, detail=detail)
    return ScreenReport(passed=True)


def divergent_powers(m: Mat2, steps: int = 20) -> Tuple[Mat2, ...]:
    """(±m)^n for n = 1..steps, the sign chosen so that ±m = I + J₁."""
    sign = 1 if traceless_decompose(m).tau >= 0 else -1
    base = m.scaled(sign)
    powers, current = [], Mat2.identity(m.kind)
    for _ in range(steps):
        current = current @ base
        powers.append(current)
    return tuple(powers)


def same_length(u: Vec2, v: Vec2, g: GroupClosure) -> bool:
    """True iff some member of g maps u to v."""
    if not g.complete:
        raise IncompleteClosure("same_length needs a complete closure")
    tol = get_settings().match_tol
    return any((m @ u).close(v, tol) for m in g.members)


def axiom_report(g: GroupClosure) -> AxiomReport:
    negation = g.contains(-Mat2.identity(g.kind))
    screen = boundedness_screen(g)
    if g.complete:
        lines = "not checkable / fails for finite models"
    else:
        lines = "not checkable"
    notes = ()
    if not negation:
        notes = ("-I is missing, so v and -v are not always of the same length",)
    return AxiomReport(
        negation_present=negation,
        screen=screen,
        isotropy_lengths="orbit-defined",
        isotropy_lines=lines,
        notes=notes,
    )


# ===== Residuals and certificates =====

def _pullback(gram: Mat2, m: Mat2) -> Mat2:
    return m.transpose() @ gram @ m


def _symmetrized(gram: Mat2) -> Mat2:
    if gram.kind is ScalarKind.RATIONAL:
        return gram
    off = (gram.a12 + gram.a21) / 2
    return Mat2(gram.a11, off, off, gram.a22)


def _max_residual(gram: Mat2, members: Iterable[Mat2]) -> Scalar:
    return max((_pullback(gram, m) - gram).max_abs() for m in members)


def invariance_residual(q: QuadraticForm, g: GroupClosure) -> Scalar:
    """Max over members of the max-abs entry of mᵀ·gram·m − gram."""
    return _max_residual(q.gram, g.members)


def invariant_norm(x: Mat2, members: Iterable[Mat2]) -> Scalar:
    """sup over members of the max-abs norm of the transported matrix."""
    return max(_pullback(x, m).max_abs() for m in members)


def is_positive_definite(q: QuadraticForm) -> bool:
    return q.gram.a11 > 0 and q.gram.det() > 0


def proportional_ratio(a: QuadraticForm, b: QuadraticForm, tol: float = 1e-8) -> Optional[Scalar]:
    """λ > 0 with b = λ·a, or None. Exact for two rational forms, relative tol otherwise."""
    if a.kind is ScalarKind.RATIONAL and b.kind is ScalarKind.RATIONAL:
        pivot = next((i for i, x in enumerate(a.gram.entries()) if x != 0), None)
        if pivot is None:
            return None
        ratio = b.gram.entries()[pivot] / a.gram.entries()[pivot]
        if ratio > 0 and a.gram.scaled(ratio) == b.gram:
            return ratio
        return None

    xs, ys = a.gram.as_float().entries(), b.gram.as_float().entries()
    pivot = max(range(4), key=lambda i: abs(xs[i]))
    if xs[pivot] == 0:
        return None
    ratio = ys[pivot] / xs[pivot]
    scale = max(abs(y) for y in ys)
    if ratio > 0 and all(abs(y - ratio * x) <= tol * scale for x, y in zip(xs, ys)):
        return ratio
    return None


def acts_irreducibly(g: GroupClosure) -> bool:
    """For screened closures: no common real eigenvector iff a det-1 non-scalar member exists."""
    tol = get_settings().match_tol
    one = to_kind(1, g.kind)
    return any(close(m.det(), one, tol) and not m.is_scalar(tol) for m in g.members)


def same_trace_partner(a1: Mat2, a2: Mat2) -> int:
    """Sign s with J₂ = s·J₁ for det-1 members of equal trace."""
    tol = get_settings().match_tol
    one = to_kind(1, a1.kind)
    if not (close(a1.det(), one, tol) and close(a2.det(), one, tol)):
        raise ValueError("both members must have determinant 1")
    if not close(a1.trace(), a2.trace(), tol):
        raise ValueError("members must share their trace")
    j1, j2 = traceless_decompose(a1).j, traceless_decompose(a2).j
    if j2.close(j1, tol):
        return 1
    if j2.close(-j1, tol):
        return -1
    raise ValueError(f"traceless parts {j1.rows()} and {j2.rows()} are not ± each other")


def _require_kind(q: QuadraticForm, kind: ScalarKind) -> None:
    if q.kind is not kind:
        raise ScalarKindMismatch(f"form is {q.kind.value}, group is {kind.value}")


# ===== Synthesizers =====

def synth_averaging(g: GroupClosure, q0: QuadraticForm) -> Tuple[QuadraticForm, SynthesisReport]:
    """Average Q₀(m v) over a finite closure."""
    if not g.complete:
        raise IncompleteClosure("averaging needs a complete (finite) closure")
    if not is_positive_definite(q0):
        raise NotPositiveDefinite(f"initial form {q0.gram.rows()} is not positive-definite")
    _require_kind(q0, g.kind)

    total = Mat2.zero(g.kind)
    for m in g.members:
        total = total + _pullback(q0.gram, m)
    gram = _symmetrized(total.scaled(to_kind(Fraction(1, len(g)), g.kind)))
    form = QuadraticForm(gram)
    report = SynthesisReport(
        method=Method.AVERAGING,
        iterations=1,
        contraction_ratio=None,
        residual=invariance_residual(form, g),
        detail=f"uniform average over {len(g)} members",
    )
    return form, report


def _orbit_diameter(gram: Mat2, pool: Sequence[Mat2]) -> Scalar:
    """Largest pairwise distance in the orbit of gram, in the invariant norm over pool.

    Only used for the generator pool, which stays small.
    """
    orbit = [_pullback(gram, m) for m in pool]
    if len(orbit) < 2:
        return to_kind(0, gram.kind)
    return max(invariant_norm(x - y, pool) for x, y in combinations(orbit, 2))


def _converged(residual: Scalar, tol: Scalar) -> bool:
    return residual == 0 or residual < tol


def synth_contraction(
    spec: GroupSpec,
    q0: QuadraticForm,
    tol: Scalar,
    max_iter: int,
    seed: int = 0,
    closure: Optional[GroupClosure] = None,
) -> Tuple[QuadraticForm, SynthesisReport]:
    """Shrink the orbit of Q₀ by repeated barycenters until the generators fix it.

    The barycenter is taken over the whole closure when it is finite and
    complete, otherwise over {I} ∪ gens ∪ gens⁻¹. Orbit diameters are measured
    in the norm made invariant over that pool; their ratio per step is reported.
    A full-closure step lands on the fixed point, so its ratio is 0.

    Pass `closure` to reuse an already computed closure of `spec`.
    """
    if not is_positive_definite(q0):
        raise NotPositiveDefinite(f"initial form {q0.gram.rows()} is not positive-definite")
    if closure is None:
        closure = close_group(spec)
    screen = boundedness_screen(closure)
    if not screen.passed:
        raise ScreenFailed(screen)
    kind = closure.kind
    _require_kind(q0, kind)
    tol = to_kind(tol, kind)

    if closure.complete:
        pool = list(closure.members)
    else:
        pool = {_member_key(Mat2.identity(kind)): Mat2.identity(kind)}
        for m in spec.seeds:
            for x in (m, m.inverse()):
                pool.setdefault(_member_key(x), x)
        pool = list(pool.values())
    order = np.random.default_rng(seed).permutation(len(pool))
    pool = [pool[int(i)] for i in order]
    weight = to_kind(Fraction(1, len(pool)), kind)

    gram = q0.gram
    residual = _max_residual(gram, pool)
    diameter = None if closure.complete else _orbit_diameter(gram, pool)
    ratios = []
    iterations = 0
    while not _converged(residual, tol):
        if iterations >= max_iter:
            raise NoConvergence(max_iter, residual)
        total = Mat2.zero(kind)
        for m in pool:
            total = total + _pullback(gram, m)
        gram = _symmetrized(total.scaled(weight))
        iterations += 1

        if closure.complete:
            ratios.append(0.0)
        else:
            new_diameter = _orbit_diameter(gram, pool)
            ratios.append(float(new_diameter / diameter) if diameter else 0.0)
            diameter = new_diameter
        residual = _max_residual(gram, pool)
        logger.debug("Contraction step %d: residual %s, ratio %.3g", iterations, float(residual), ratios[-1])

    form = QuadraticForm(gram)
    if not is_positive_definite(form):
        raise NotPositiveDefinite(f"contraction ended at {gram.rows()}")
    final_residual = invariance_residual(form, closure) if closure.complete else residual
    report = SynthesisReport(
        method=Method.CONTRACTION,
        iterations=iterations,
        contraction_ratio=max(ratios) if ratios else None,
        residual=final_residual,
        ratios=tuple(ratios),
        detail="full closure barycenter" if closure.complete else f"generator barycenter over {len(pool)} maps",
    )
    return form, report


def _bilinear_gram(j: Mat2, w: WedgeForm) -> Mat2:
    """Gram of B(u, v) = (j u) ∧ v in the standard basis."""
    e = (Vec2.basis(0, j.kind), Vec2.basis(1, j.kind))
    rows = [[wedge(w, j @ e[i], e[k]) for k in range(2)] for i in range(2)]
    return _symmetrized(Mat2.from_rows(rows))


def _degenerate_gram(g: GroupClosure) -> Tuple[Mat2, str]:
    tol = get_settings().match_tol
    kind = g.kind
    one = to_kind(1, kind)
    reflections = [m for m in g.sorted_members() if close(m.det(), -one, tol)]
    if not reflections:
        return Mat2.identity(kind), "only scalar members: standard form"

    a = reflections[0]
    h = half(kind)
    basis = (Vec2.basis(0, kind), Vec2.basis(1, kind))
    plus = next(v for v in ((e + a @ e).scaled(h) for e in basis) if not v.is_zero(tol))
    minus = next(v for v in ((e - a @ e).scaled(h) for e in basis) if not v.is_zero(tol))
    frame = Mat2(plus.x1, minus.x1, plus.x2, minus.x2)
    inv = frame.inverse()
    return _symmetrized(inv.transpose() @ inv), f"identity in the eigenbasis of {a.rows()}"


def synth_algebraic(g: GroupClosure, w: WedgeForm) -> Tuple[QuadraticForm, SynthesisReport]:
    """Closed-form invariant form from a determinant-1, non-scalar member."""
    if not g.complete:
        raise IncompleteClosure("the algebraic construction needs a complete closure")
    screen = boundedness_screen(g)
    if not screen.passed:
        raise ScreenFailed(screen)
    kind = g.kind
    if w.kind is not kind:
        raise ScalarKindMismatch(f"wedge is {w.kind.value}, group is {kind.value}")

    tol = get_settings().match_tol
    one = to_kind(1, kind)
    candidates = [m for m in g.sorted_members() if close(m.det(), one, tol) and not m.is_scalar(tol)]
    if candidates:
        a = candidates[0]
        j = traceless_decompose(a).j
        b1 = Vec2.basis(0, kind)
        b2 = j @ b1
        # B(b1, b1) = b2 ∧ b1 is nonzero because j² < 0
        pivot = wedge(w, b2, b1)
        gram = _bilinear_gram(j, w)
        if pivot < 0:
            gram = -gram
        detail = f"J from {a.rows()}"
        logger.debug("Algebraic synthesis picked %s", a.rows())
    else:
        gram, detail = _degenerate_gram(g)
        logger.debug("Algebraic synthesis degenerate case: %s", detail)

    form = QuadraticForm(gram)
    report = SynthesisReport(
        method=Method.ALGEBRAIC,
        iterations=0,
        contraction_ratio=None,
        residual=invariance_residual(form, g),
        detail=detail,
    )
    return form, report
