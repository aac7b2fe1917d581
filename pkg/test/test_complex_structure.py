#!/usr/bin/env python3
"""
Unit tests for the complex structure induced by an invariant form.

Run with: python -m pytest test/test_complex_structure.py -v
"""

import math
from fractions import Fraction

import numpy as np
import pytest

from geometry.complex_structure import complex_action, derive_j, rotate
from geometry.errors import IrrationalNormalizer, NotPositiveDefinite, ScalarKindMismatch
from geometry.invariant import QuadraticForm
from geometry.linalg import Mat2, Vec2, WedgeForm, wedge


SKEWED = QuadraticForm.from_entries(1, -1, 2)


class TestDeriveJ:
    """j with j·j = −I from a form and a wedge constant."""

    def test_standard_form(self):
        """The standard form gives the quarter turn."""
        cs = derive_j(QuadraticForm.standard(), WedgeForm(1))
        assert cs.j == Mat2(0, 1, -1, 0)
        assert cs.j @ cs.j == -Mat2.identity()
        assert cs.orientation == 1

    def test_skewed_form(self):
        """[[1,−1],[−1,2]] gives [[−1,2],[−1,1]], squaring to −I exactly."""
        cs = derive_j(SKEWED, WedgeForm(1))
        assert cs.j == Mat2(-1, 2, -1, 1)
        assert cs.j @ cs.j == -Mat2.identity()

    def test_defining_identity(self):
        """⟨u, v⟩ = (j u) ∧ v with the rescaled wedge."""
        q = QuadraticForm.from_entries(2, 1, 5)
        cs = derive_j(q.scaled(Fraction(9, 4)), WedgeForm(3))
        w = cs.rescaled_wedge()
        form = q.scaled(Fraction(9, 4))
        for u in (Vec2(1, 0), Vec2(0, 1), Vec2(2, -3)):
            for v in (Vec2(1, 1), Vec2(Fraction(1, 2), 4)):
                assert form.bilinear(u, v) == wedge(w, cs.j @ u, v)

    def test_orientation_flips_j(self):
        """A negative wedge constant selects −j."""
        positive = derive_j(SKEWED, WedgeForm(1))
        negative = derive_j(SKEWED, WedgeForm(-2))
        assert negative.orientation == -1
        assert negative.j == positive.opposite().j

    def test_not_positive_definite(self):
        """Indefinite forms have no complex structure."""
        with pytest.raises(NotPositiveDefinite):
            derive_j(QuadraticForm.from_entries(1, 0, -1), WedgeForm(1))

    def test_irrational_normalizer(self):
        """diag(1, 2) would need √2 on the exact backend."""
        with pytest.raises(IrrationalNormalizer):
            derive_j(QuadraticForm.from_entries(1, 0, 2), WedgeForm(1))

    def test_float_backend(self):
        """The float backend normalizes approximately."""
        cs = derive_j(QuadraticForm.from_entries(1.0, 0.0, 2.0), WedgeForm(1.0))
        assert (cs.j @ cs.j).close(-Mat2.identity().as_float(), tol=1e-12)


class TestRotate:
    """The one-dimensional complex vector space structure."""

    def test_zero_angle(self):
        """θ = 0 is the identity."""
        cs = derive_j(SKEWED, WedgeForm(1)).as_float()
        v = Vec2(0.3, -1.2)
        assert rotate(v, 0.0, cs) == v

    def test_quarter_turn_is_j(self):
        """θ = π/2 applies j."""
        cs = derive_j(SKEWED, WedgeForm(1)).as_float()
        v = Vec2(0.3, -1.2)
        assert rotate(v, math.pi / 2, cs).close(cs.j @ v, tol=1e-12)

    def test_i_squared_is_minus_one(self):
        """i·(i·v) = −v."""
        cs = derive_j(QuadraticForm.standard(), WedgeForm(1)).as_float()
        v = Vec2(1.5, 2.0)
        assert complex_action(1j, complex_action(1j, v, cs), cs).close(-v, tol=1e-12)

    def test_preserves_form(self):
        """Q(rotate(v, θ)) = Q(v) within 1e-12 over random inputs."""
        q = SKEWED.as_float()
        cs = derive_j(SKEWED, WedgeForm(1)).as_float()
        rng = np.random.default_rng(0)
        for _ in range(1000):
            v = Vec2(*(float(x) for x in rng.uniform(-1, 1, size=2)))
            theta = float(rng.uniform(-math.pi, math.pi))
            assert abs(q.value(rotate(v, theta, cs)) - q.value(v)) < 1e-12

    def test_rational_input_rejected(self):
        """The complex action lives on the float backend."""
        cs = derive_j(QuadraticForm.standard(), WedgeForm(1))
        with pytest.raises(ScalarKindMismatch):
            complex_action(1j, Vec2(1, 0), cs)
