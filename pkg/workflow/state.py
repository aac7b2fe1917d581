#SynthesisState definition for the invariant-form workflow.
#Carries the parsed group spec, the closure and screen verdict, and one outcome per method.


import operator
from dataclasses import dataclass
from typing import Annotated, Dict, List, Optional, TypedDict

from geometry.complex_structure import ComplexStructure
from geometry.invariant import GroupClosure, GroupSpec, Method, QuadraticForm, ScreenReport, SynthesisReport
from geometry.linalg import Scalar, WedgeForm


@dataclass(frozen=True)
class MethodOutcome:
    """What one synthesizer produced; form/report are None unless exit_code is 0."""

    method: Method
    exit_code: int
    form: Optional[QuadraticForm] = None
    report: Optional[SynthesisReport] = None
    error: str = ""
    skipped: bool = False


#Parallel synthesizer nodes each write their own key.
def merge_results(left: Optional[Dict[Method, MethodOutcome]], right: Optional[Dict[Method, MethodOutcome]]):
    return {**(left or {}), **(right or {})}


class SynthesisState(TypedDict):
    # Inputs
    spec: GroupSpec
    initial_form: QuadraticForm
    wedge: WedgeForm
    methods: List[Method]
    tolerance: Scalar
    max_iter: int
    seed: int

    # Filled in by the nodes
    closure: Optional[GroupClosure]
    screen: Optional[ScreenReport]
    results: Annotated[Dict[Method, MethodOutcome], merge_results]
    cross_check: Optional[dict]
    complex_structure: Optional[ComplexStructure]
    exit_code: int

    log: Annotated[List[str], operator.add]
