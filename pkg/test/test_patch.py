#!/usr/bin/env python3
"""
Unit tests for assembling global quadratic forms from black-box evaluators.

Run with: python -m pytest test/test_patch.py -v
"""

from fractions import Fraction

import numpy as np
import pytest

from geometry.errors import (
    AsymmetricGram,
    DimensionMismatch,
    DimensionOutOfRange,
    NotPositiveDefinite,
    NotQuadratic,
)
from geometry.linalg import Mat2, ScalarKind
from geometry.patch import (
    FormEvaluator,
    GramN,
    VecN,
    biadditivity_residual,
    homogeneity_residual,
    parallelogram_residual,
    patch_form,
    polarize_eval,
    replay_witness,
    restrict_evaluator,
)
from test_helpers import random_spd_rows


def vec(*xs) -> VecN:
    return VecN(tuple(xs))


def random_vec(rng, dim: int) -> VecN:
    return VecN(tuple(Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))) for _ in range(dim)))


def truncated_sphere(dim: int) -> FormEvaluator:
    """|v|² near the origin, 0 far away: fine on unit pairs, not homogeneous."""

    def q(v: VecN):
        if all(abs(x) <= 2 for x in v):
            return sum((x * x for x in v), Fraction(0))
        return Fraction(0)

    return FormEvaluator(q, dim, name="truncated")


class TestGramN:
    """Symmetric n×n Gram matrices."""

    def test_leading_minors(self):
        """[[2,1],[1,2]] has minors 2 and 3."""
        gram = GramN(((2, 1), (1, 2)))
        assert gram.leading_minors() == (2, 3)
        assert gram.is_positive_definite()

    def test_indefinite(self):
        """diag(1, −1) is not positive-definite."""
        assert not GramN(((1, 0), (0, -1))).is_positive_definite()

    def test_asymmetric(self):
        """Asymmetric input is refused."""
        with pytest.raises(AsymmetricGram):
            GramN(((1, 2), (0, 1)))

    def test_restrict(self):
        """The (0, 2) block of a 3×3 Gram."""
        gram = GramN(((1, 2, 3), (2, 5, 6), (3, 6, 9)))
        assert gram.restrict(0, 2) == Mat2(1, 3, 3, 9)

    def test_dimension_range(self):
        """Dimensions run from 2 to 16."""
        with pytest.raises(DimensionOutOfRange):
            FormEvaluator.sphere(1)
        with pytest.raises(DimensionOutOfRange):
            FormEvaluator.sphere(17)


class TestResiduals:
    """Polarization and the functional equations."""

    def test_polarization_of_a_gram(self):
        """Polarizing vᵀMv gives back uᵀMv."""
        gram = GramN(random_spd_rows(seed=0, dim=3))
        q = FormEvaluator.from_gram(gram)
        u, v = vec(1, Fraction(1, 2), -2), vec(0, 3, Fraction(2, 3))
        assert polarize_eval(q, u, v) == gram.bilinear(u, v)

    def test_quadratic_forms_have_zero_residuals(self):
        """Parallelogram, homogeneity and biadditivity hold exactly."""
        q = FormEvaluator.from_gram(GramN(random_spd_rows(seed=1, dim=3)))
        a, b, c = vec(1, 2, 3), vec(Fraction(-1, 3), 0, 5), vec(2, 2, -1)
        assert parallelogram_residual(q, a, b) == 0
        assert homogeneity_residual(q, Fraction(-7, 2), a) == 0
        assert biadditivity_residual(q, a, b, c) == 0

    def test_quartic_residual(self):
        """Σ vᵢ⁴ breaks the parallelogram law at (e1, e1 + e2) and biadditivity at (e1 + e2, e1, e1)."""
        q = FormEvaluator.quartic(3)
        assert parallelogram_residual(q, vec(1, 0, 0), vec(1, 1, 0)) == -12
        assert biadditivity_residual(q, vec(1, 1, 0), vec(1, 0, 0), vec(1, 0, 0)) == -18

    def test_dimension_mismatch(self):
        """Vectors must match the evaluator."""
        with pytest.raises(DimensionMismatch):
            FormEvaluator.sphere(3)(VecN.basis(2, 0))


class TestPatchForm:
    """Assembling and certifying the global Gram matrix."""

    def test_recovers_random_spd_matrices(self):
        """Rational SPD Grams in dimensions 2 to 6 come back exactly."""
        for dim in range(2, 7):
            for seed in range(3):
                gram = GramN(random_spd_rows(seed=seed, dim=dim))
                assert patch_form(FormEvaluator.from_gram(gram), seed=seed) == gram, (dim, seed)

    def test_sphere(self):
        """The square norm patches to the identity."""
        gram = patch_form(FormEvaluator.sphere(4))
        assert gram.rows == tuple(tuple(Fraction(int(i == k)) for k in range(4)) for i in range(4))

    def test_quartic_witness(self):
        """The quartic fails at (1,0,0), (1,1,0) with residual −12, and the witness replays."""
        q = FormEvaluator.quartic(3)
        with pytest.raises(NotQuadratic) as excinfo:
            patch_form(q)
        witness = excinfo.value.witness
        assert witness.kind == "parallelogram"
        assert witness.vectors == (vec(1, 0, 0), vec(1, 1, 0))
        assert witness.residual == -12
        assert replay_witness(q, witness) == -12

    def test_nonzero_at_origin(self):
        """Q(0) ≠ 0 is reported before anything else."""
        q = FormEvaluator(lambda v: sum((x * x for x in v), Fraction(1)), 2)
        with pytest.raises(NotQuadratic) as excinfo:
            patch_form(q)
        assert excinfo.value.witness.kind == "zero"
        assert excinfo.value.witness.residual == 1

    def test_homogeneity_witness(self):
        """A form that is only quadratic near the origin fails homogeneity."""
        q = truncated_sphere(2)
        with pytest.raises(NotQuadratic) as excinfo:
            patch_form(q)
        witness = excinfo.value.witness
        assert witness.kind == "homogeneity"
        assert witness.lam is not None
        assert replay_witness(q, witness) == witness.residual != 0

    def test_indefinite_form(self):
        """A quadratic but indefinite form is rejected after assembly."""
        q = FormEvaluator.from_gram(GramN(((1, 0), (0, -1))))
        with pytest.raises(NotPositiveDefinite):
            patch_form(q)

    def test_seeded_runs_repeat(self):
        """Equal seeds reproduce the same witness."""
        q = truncated_sphere(3)
        witnesses = []
        for _ in range(2):
            with pytest.raises(NotQuadratic) as excinfo:
                patch_form(q, seed=5)
            witnesses.append(excinfo.value.witness)
        assert witnesses[0] == witnesses[1]

    def test_restriction_to_a_plane(self):
        """Patching Q on the (0, 2) plane gives the matching 2×2 block."""
        gram = GramN(random_spd_rows(seed=4, dim=4))
        planar = patch_form(restrict_evaluator(FormEvaluator.from_gram(gram), 0, 2))
        block = gram.restrict(0, 2)
        assert planar.rows == block.rows()

    def test_patched_forms_are_biadditive(self):
        """On random rational triples the patched Gram polarizes Q and is biadditive."""
        rng = np.random.default_rng(11)
        for dim in (2, 3, 5):
            source = FormEvaluator.from_gram(GramN(random_spd_rows(seed=dim, dim=dim)))
            patched = FormEvaluator.from_gram(patch_form(source, seed=dim))
            for _ in range(10):
                u, v, w = (random_vec(rng, dim) for _ in range(3))
                assert biadditivity_residual(patched, u, v, w) == 0
                assert polarize_eval(patched, u, v) == polarize_eval(source, u, v)

    def test_float_backend(self):
        """The float sphere patches within tolerance."""
        gram = patch_form(FormEvaluator.sphere(3, ScalarKind.FLOAT), tol=1e-9)
        for i in range(3):
            for k in range(3):
                assert gram.rows[i][k] == pytest.approx(1.0 if i == k else 0.0, abs=1e-12)
