#Complex structure induced by an invariant form and a wedge normalization.

import cmath
import logging
from dataclasses import dataclass

from geometry.errors import IrrationalNormalizer, NotPositiveDefinite, ScalarKindMismatch
from geometry.invariant import QuadraticForm, is_positive_definite
from geometry.linalg import Mat2, Scalar, ScalarKind, Vec2, WedgeForm, scalar_sqrt, unify

logger = logging.getLogger(__name__)

# unit antisymmetric matrix of the standard basis
_E = ((0, 1), (-1, 0))


@dataclass(frozen=True)
class ComplexStructure:
    """j with j·j = −I; orientation is the sign of the wedge constant."""

    j: Mat2
    orientation: int
    wedge: WedgeForm
    normalizer: Scalar

    def opposite(self) -> "ComplexStructure":
        return ComplexStructure(-self.j, -self.orientation, WedgeForm(-self.wedge.c), self.normalizer)

    def rescaled_wedge(self) -> WedgeForm:
        """The wedge c' for which ⟨u, v⟩ = (j u) ∧ v holds with the normalized j."""
        return WedgeForm(self.wedge.c * self.normalizer)

    def as_float(self) -> "ComplexStructure":
        return ComplexStructure(self.j.as_float(), self.orientation, WedgeForm(float(self.wedge.c)), float(self.normalizer))


def derive_j(q: QuadraticForm, w: WedgeForm) -> ComplexStructure:
    """Solve ⟨u, v⟩ = (J₀ u) ∧ v and normalize J₀ so that its square is −I."""
    if not is_positive_definite(q):
        raise NotPositiveDefinite(f"form {q.gram.rows()} is not positive-definite")
    unify(q.gram.a11, w.c)

    j0 = (Mat2.from_rows(_E, q.kind) @ q.gram).scaled(1 / w.c)
    square = (j0 @ j0).a11
    # J₀² = −det(gram)/c² · I
    normalizer = scalar_sqrt(-square)
    if normalizer is None:
        raise IrrationalNormalizer(f"sqrt({-square}) is irrational; use the float backend")
    j = j0.scaled(1 / normalizer)
    orientation = 1 if w.c > 0 else -1
    logger.debug("Derived j=%s (normalizer %s)", j.rows(), normalizer)
    return ComplexStructure(j=j, orientation=orientation, wedge=w, normalizer=normalizer)


def complex_action(z: complex, v: Vec2, cs: ComplexStructure) -> Vec2:
    """(a + ib)·v = a·v + b·(j v)."""
    if v.kind is not ScalarKind.FLOAT or cs.j.kind is not ScalarKind.FLOAT:
        raise ScalarKindMismatch("the complex action is defined on the float backend")
    return v.scaled(float(z.real)) + (cs.j @ v).scaled(float(z.imag))


def rotate(v: Vec2, theta: float, cs: ComplexStructure) -> Vec2:
    """cos θ·v + sin θ·(j v)."""
    if theta == 0:
        return v
    return complex_action(cmath.exp(1j * theta), v, cs)

