#Node functions for the invariant-form workflow.
#Each node wraps one kernel service and turns its failures into state, never exceptions.

import logging
from typing import List, Literal, Union

from geometry.complex_structure import derive_j
from geometry.errors import (
    IncompleteClosure,
    IrrationalNormalizer,
    NoConvergence,
    NotPositiveDefinite,
    ScalarKindMismatch,
    ScreenFailed,
    SingularGenerator,
)
from geometry.invariant import (
    GroupSpec,
    Method,
    ScreenReason,
    ScreenReport,
    acts_irreducibly,
    boundedness_screen,
    close_group,
    is_positive_definite,
    proportional_ratio,
    synth_algebraic,
    synth_averaging,
    synth_contraction,
)
from geometry.linalg import WedgeForm, is_zero
from geometry.wire import mat_to_wire, payload_hash, scalar_to_wire
from workflow.state import MethodOutcome, SynthesisState

logger = logging.getLogger(__name__)

METHOD_ORDER = (Method.AVERAGING, Method.CONTRACTION, Method.ALGEBRAIC)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_REJECTED = 2
EXIT_NO_CONVERGENCE = 3


# ===== Closure and screen =====

def close_group_node(state: SynthesisState) -> SynthesisState:
    spec = state["spec"]
    try:
        closure = close_group(spec)
    except SingularGenerator as exc:
        witness = next(m for m in spec.seeds if is_zero(m.det()))
        report = ScreenReport(passed=False, reason=ScreenReason.DETERMINANT, witness=witness, detail=str(exc))
        return {"closure": None, "screen": report, "log": [f"closure failed: {exc}"]}

    status = "complete" if closure.complete else f"sampled (limit {spec.closure_limit})"
    return {"closure": closure, "log": [f"closure: {len(closure)} members, {status}"]}


def screen_node(state: SynthesisState) -> SynthesisState:
    if state.get("closure") is None:
        return {}
    report = boundedness_screen(state["closure"])
    line = "screen: passed" if report.passed else f"screen: rejected ({report.reason.value})"
    return {"screen": report, "log": [line]}


#Fan out to every requested synthesizer, or stop at the rejection handler.
def route_after_screen(state: SynthesisState) -> Union[List[str], Literal["handle_rejection"]]:
    screen = state.get("screen")
    if state.get("closure") is None or screen is None or not screen.passed:
        return "handle_rejection"
    return [method.value for method in METHOD_ORDER if method in state["methods"]]


def handle_rejection_node(state: SynthesisState) -> SynthesisState:
    screen = state["screen"]
    witness = screen.witness.rows() if screen.witness is not None else None
    return {
        "exit_code": EXIT_REJECTED,
        "log": [f"rejected: {screen.reason.value}, witness {witness}"],
    }


# ===== Synthesizers =====

def _outcome(state: SynthesisState, method: Method, run) -> SynthesisState:
    several = len(state["methods"]) > 1
    try:
        form, report = run()
    except IncompleteClosure as exc:
        if several:
            outcome = MethodOutcome(method, EXIT_OK, error=str(exc), skipped=True)
        else:
            outcome = MethodOutcome(method, EXIT_INPUT, error=str(exc))
    except (NotPositiveDefinite, ScalarKindMismatch) as exc:
        outcome = MethodOutcome(method, EXIT_INPUT, error=str(exc))
    except ScreenFailed as exc:
        outcome = MethodOutcome(method, EXIT_REJECTED, error=str(exc))
    except NoConvergence as exc:
        outcome = MethodOutcome(method, EXIT_NO_CONVERGENCE, error=str(exc))
    else:
        outcome = MethodOutcome(method, EXIT_OK, form=form, report=report)

    if outcome.skipped:
        line = f"{method.value}: skipped ({outcome.error})"
    elif outcome.exit_code:
        line = f"{method.value}: failed ({outcome.error})"
    else:
        line = f"{method.value}: residual {outcome.report.residual}, {outcome.report.iterations} iteration(s)"
    logger.debug(line)
    return {"results": {method: outcome}, "log": [line]}


def averaging_node(state: SynthesisState) -> SynthesisState:
    return _outcome(state, Method.AVERAGING, lambda: synth_averaging(state["closure"], state["initial_form"]))


def contraction_node(state: SynthesisState) -> SynthesisState:
    return _outcome(
        state,
        Method.CONTRACTION,
        lambda: synth_contraction(
            state["spec"],
            state["initial_form"],
            state["tolerance"],
            state["max_iter"],
            seed=state["seed"],
            closure=state["closure"],
        ),
    )


def algebraic_node(state: SynthesisState) -> SynthesisState:
    return _outcome(state, Method.ALGEBRAIC, lambda: synth_algebraic(state["closure"], state["wedge"]))


# ===== Cross-check and certificate =====

def _successful(state: SynthesisState) -> List[MethodOutcome]:
    results = state.get("results") or {}
    return [results[m] for m in METHOD_ORDER if m in results and results[m].form is not None]


def cross_check_node(state: SynthesisState) -> SynthesisState:
    """Pairwise proportionality of the synthesized Grams on irreducible groups."""
    done = _successful(state)
    if len(done) < 2:
        verdict = {"checked": False, "agree": None, "pairs": [], "note": "fewer than two results"}
        return {"cross_check": verdict, "log": ["cross-check: not run (fewer than two results)"]}

    if not acts_irreducibly(state["closure"]):
        verdict = {
            "checked": False,
            "agree": None,
            "pairs": [],
            "note": "reducible action: invariant forms need not be proportional",
        }
        return {"cross_check": verdict, "log": ["cross-check: skipped (reducible action)"]}

    pairs = []
    for i, first in enumerate(done):
        for second in done[i + 1:]:
            ratio = proportional_ratio(first.form, second.form)
            pairs.append({
                "pair": f"{first.method.value}/{second.method.value}",
                "ratio": None if ratio is None else scalar_to_wire(ratio),
            })
    agree = all(p["ratio"] is not None for p in pairs)
    verdict = {"checked": True, "agree": agree, "pairs": pairs, "note": ""}
    return {"cross_check": verdict, "log": [f"cross-check: {'proportional' if agree else 'DISAGREE'}"]}


def certify_node(state: SynthesisState) -> SynthesisState:
    results = state.get("results") or {}
    ran = [results[m] for m in METHOD_ORDER if m in results and not results[m].skipped]
    exit_code = next((o.exit_code for o in ran if o.exit_code), EXIT_OK)

    updates = {"exit_code": exit_code, "complex_structure": None, "log": []}
    done = _successful(state)
    if done and is_positive_definite(done[0].form):
        form, w = done[0].form, state["wedge"]
        try:
            cs = derive_j(form, w)
        except IrrationalNormalizer:
            cs = derive_j(form.as_float(), WedgeForm(float(w.c)))
            updates["log"].append("complex structure: irrational normalizer, float backend used")
        updates["complex_structure"] = cs
        updates["log"].append(f"complex structure: j = {cs.j.rows()} from {done[0].method.value}")
    updates["log"].append(f"exit code {exit_code}")
    return updates


# ===== Payloads =====

def spec_hash(spec: GroupSpec) -> str:
    """Hash of the group itself; the closure limit is a run parameter and stays out."""
    wire = spec.to_wire()
    return payload_hash({key: wire[key] for key in ("scalar", "generators", "elements")})


def screen_payload(screen: ScreenReport) -> dict:
    return {
        "passed": screen.passed,
        "reason": screen.reason.value if screen.reason else None,
        "witness": mat_to_wire(screen.witness) if screen.witness is not None else None,
        "detail": screen.detail,
    }


def certificate_payload(state: SynthesisState) -> dict:
    spec = state["spec"]
    results = state.get("results") or {}
    certificates = []
    for method in METHOD_ORDER:
        outcome = results.get(method)
        if outcome is None:
            continue
        entry = {"method": method.value, "exit_code": outcome.exit_code, "skipped": outcome.skipped}
        if outcome.form is not None:
            report = outcome.report
            entry.update({
                "gram": mat_to_wire(outcome.form.gram),
                "residual": scalar_to_wire(report.residual),
                "iterations": report.iterations,
                "contraction_ratio": report.contraction_ratio,
                "positive_definite": is_positive_definite(outcome.form),
                "detail": report.detail,
            })
        else:
            entry["error"] = outcome.error
        certificates.append(entry)

    cs = state.get("complex_structure")
    return {
        "spec_hash": spec_hash(spec),
        "scalar": spec.scalar.value,
        "screen": screen_payload(state["screen"]) if state.get("screen") else None,
        "certificates": certificates,
        "cross_check": state.get("cross_check"),
        "complex_structure": None if cs is None else {
            "j": mat_to_wire(cs.j),
            "orientation": cs.orientation,
            "normalizer": scalar_to_wire(cs.normalizer),
            "scalar": cs.j.kind.value,
        },
        "exit_code": state["exit_code"],
    }
