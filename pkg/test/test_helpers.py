#Test helper functions for planeform tests.

from fractions import Fraction
from typing import Dict, Tuple

import numpy as np

from geometry.invariant import GroupSpec, QuadraticForm
from geometry.linalg import Mat2, WedgeForm
from geometry.wire import mat_to_wire
from workflow.nodes import METHOD_ORDER
from workflow.state import SynthesisState


R90 = Mat2.from_rows(((0, 1), (-1, 0)))
C3_GEN = Mat2.from_rows(((0, -1), (1, -1)))
C6_GEN = Mat2.from_rows(((1, -1), (1, 0)))
FLIP = Mat2.from_rows(((0, 1), (1, 0)))
MIRROR = Mat2.from_rows(((1, 0), (0, -1)))
SHEAR = Mat2.from_rows(((1, 1), (0, 1)))


def group_spec(*generators: Mat2, **overrides) -> GroupSpec:
    """Create a GroupSpec from generator matrices.

    Args:
        *generators: Generators of the group
        **overrides: Fields to override (elements, closure_limit, ...)

    Returns:
        GroupSpec with the kind taken from the first generator
    """
    data = {"generators": list(generators)}
    data.update(overrides)
    return GroupSpec(**data)


def conjugate(m: Mat2, s: Mat2) -> Mat2:
    """s·m·s⁻¹; an A-invariant form M becomes S⁻ᵀ·M·S⁻¹ for the conjugate."""
    return s @ m @ s.inverse()


def conjugate_form(gram: Mat2, s: Mat2) -> Mat2:
    inv = s.inverse()
    return inv.transpose() @ gram @ inv


def random_rational_matrix(seed: int, bound: int = 4) -> Mat2:
    """A seeded invertible rational matrix with small entries."""
    rng = np.random.default_rng(seed)
    while True:
        entries = [Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, 3))) for _ in range(4)]
        m = Mat2(*entries)
        if m.det() != 0:
            return m


def random_spd_rows(seed: int, dim: int, bound: int = 3) -> Tuple[Tuple[Fraction, ...], ...]:
    """A seeded rational symmetric positive-definite matrix: BᵀB + I."""
    rng = np.random.default_rng(seed)
    b = [[Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, 3))) for _ in range(dim)]
         for _ in range(dim)]
    return tuple(
        tuple(sum((b[k][i] * b[k][j] for k in range(dim)), Fraction(0)) + (1 if i == j else 0) for j in range(dim))
        for i in range(dim)
    )


def base_catalog() -> Dict[str, Tuple[Mat2, ...]]:
    """Generators of the finite planar groups used throughout the suite."""
    return {
        "C2": (-Mat2.identity(),),
        "C3": (C3_GEN,),
        "C4": (R90,),
        "C6": (C6_GEN,),
        "D4": (-Mat2.identity(), MIRROR),
        "D6": (C3_GEN, FLIP),
        "D8": (R90, MIRROR),
    }


def group_catalog() -> Dict[str, Tuple[Mat2, ...]]:
    """The base groups, each also conjugated by the shear and by a random rational matrix."""
    catalog = dict(base_catalog())
    for name, gens in base_catalog().items():
        catalog[f"{name}^shear"] = tuple(conjugate(g, SHEAR) for g in gens)
        s = random_rational_matrix(seed=len(name) * 7 + ord(name[1]))
        catalog[f"{name}^random"] = tuple(conjugate(g, s) for g in gens)
    return catalog


IRREDUCIBLE = ("C3", "C4", "C6", "D6", "D8")


def rotation(theta: float) -> Mat2:
    c, s = float(np.cos(theta)), float(np.sin(theta))
    return Mat2(c, -s, s, c)


def spec_file_payload(*generators: Mat2, **extra) -> dict:
    """Wire form of a group spec file."""
    payload = {
        "scalar": generators[0].kind.value,
        "generators": [mat_to_wire(g) for g in generators],
    }
    payload.update(extra)
    return payload


def create_synthesis_state(spec: GroupSpec, **overrides) -> SynthesisState:
    """Create a SynthesisState with default values and optional overrides."""
    defaults = {
        "spec": spec,
        "initial_form": QuadraticForm.standard(spec.scalar),
        "wedge": WedgeForm.standard(spec.scalar),
        "methods": list(METHOD_ORDER),
        "tolerance": 1e-10,
        "max_iter": 500,
        "seed": 0,
        "closure": None,
        "screen": None,
        "results": {},
        "cross_check": None,
        "complex_structure": None,
        "exit_code": 0,
        "log": [],
    }
    defaults.update(overrides)
    return SynthesisState(**defaults)
