"""
Planeform - Main Entry Point
Command-line front door for invariant-form synthesis, form checks, plane
constructions and quadratic-form patching.
"""

import argparse
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, ValidationError, model_validator

from geometry.config import get_settings
from geometry.errors import (
    AsymmetricGram,
    BadBounds,
    BadIndices,
    DegenerateLine,
    DimensionMismatch,
    DimensionOutOfRange,
    GeometryError,
    MalformedInput,
    NotPositiveDefinite,
    NotQuadratic,
    SingularGenerator,
    TooShort,
)
from geometry.invariant import (
    GroupSpec,
    QuadraticForm,
    axiom_report,
    close_group,
    invariance_residual,
    is_positive_definite,
)
from geometry.kernel import (
    Point,
    complete_parallelogram,
    is_parallelogram,
    line_point_construction,
    rational_line,
    ruler_between,
)
from geometry.linalg import ScalarKind, WedgeForm, is_zero
from geometry.patch import FormEvaluator, GramN, patch_form
from geometry.wire import (
    mat_from_wire,
    read_json,
    scalar_from_wire,
    scalar_to_wire,
    vec_from_wire,
    vec_to_wire,
    write_json,
)
from workflow.graph import build_graph, tracing_callbacks
from workflow.nodes import EXIT_INPUT, EXIT_OK, EXIT_REJECTED, METHOD_ORDER, certificate_payload, spec_hash
from workflow.state import SynthesisState

logger = logging.getLogger(__name__)

# Input-side failures: the file or the request is wrong, not the mathematics
INPUT_ERRORS = (
    MalformedInput,
    AsymmetricGram,
    BadIndices,
    BadBounds,
    TooShort,
    DegenerateLine,
    DimensionMismatch,
    DimensionOutOfRange,
)


class RunConfig(BaseModel):
    command: Literal["synth", "check", "geom", "patch"]
    method: Optional[Literal["averaging", "contraction", "algebraic", "all"]] = None
    input: Optional[Path] = None
    output: Optional[Path] = None
    form: Optional[Path] = None
    tolerance: float = Field(default_factory=lambda: get_settings().default_tol, ge=0)
    seed: int = 0
    closure_limit: Optional[int] = Field(None, ge=1)
    max_iter: int = Field(default_factory=lambda: get_settings().max_iter, ge=1)
    dim: Optional[int] = None
    builtin: Optional[Literal["quartic", "sphere"]] = None

    @model_validator(mode="after")
    def _check_command(self):
        if self.command == "synth" and self.method is None:
            raise ValueError("method is required for synth")
        if self.command in ("synth", "check", "geom") and self.input is None:
            raise ValueError(f"input is required for {self.command}")
        if self.command == "check" and self.form is None:
            raise ValueError("form is required for check")
        if self.command == "patch":
            if self.builtin is None and self.input is None:
                raise ValueError("patch needs --builtin or --input")
            if self.builtin is not None and self.dim is None:
                raise ValueError("dim is required with --builtin")
        return self


def print_separator():
    print("\n" + "=" * 60 + "\n")


def print_banner(title: str):
    print("\n" + "=" * 60)
    print(title)
    print("=" * 60 + "\n")


def _require_object(raw, field: str) -> dict:
    if not isinstance(raw, dict):
        raise MalformedInput(field, f"expected a JSON object, got {type(raw).__name__}")
    return raw


#Parse a group spec file plus its optional initial form and wedge constant.
def load_group(cfg: RunConfig) -> Tuple[GroupSpec, QuadraticForm, WedgeForm]:
    raw = dict(_require_object(read_json(cfg.input, "input"), "input"))
    if cfg.closure_limit is not None:
        raw["closure_limit"] = cfg.closure_limit
    spec = GroupSpec.model_validate(raw)

    kind = spec.scalar
    if raw.get("initial_form") is not None:
        initial = QuadraticForm(mat_from_wire(raw["initial_form"], kind, "initial_form"))
    else:
        initial = QuadraticForm.standard(kind)

    c = scalar_from_wire(raw.get("wedge", 1), kind, "wedge")
    if is_zero(c):
        raise MalformedInput("wedge", "the wedge constant must be nonzero")
    return spec, initial, WedgeForm(c)


# ===== synth =====

def run_synth(cfg: RunConfig) -> int:
    spec, initial, w = load_group(cfg)
    methods = list(METHOD_ORDER) if cfg.method == "all" else [m for m in METHOD_ORDER if m.value == cfg.method]

    print_banner("INVARIANT FORM SYNTHESIS")
    print(f"Scalar backend: {spec.scalar.value}")
    print(f"Methods: {', '.join(m.value for m in methods)}")

    state: SynthesisState = {
        "spec": spec,
        "initial_form": initial,
        "wedge": w,
        "methods": methods,
        "tolerance": cfg.tolerance,
        "max_iter": cfg.max_iter,
        "seed": cfg.seed,
        "closure": None,
        "screen": None,
        "results": {},
        "cross_check": None,
        "complex_structure": None,
        "exit_code": EXIT_OK,
        "log": [],
    }

    app = build_graph()
    final = app.invoke(state, config={"callbacks": tracing_callbacks()})

    print_separator()
    for line in final["log"]:
        print(f"  {line}")

    payload = certificate_payload(final)
    text = write_json(cfg.output, payload)
    print_separator()
    if cfg.output is None:
        print(text)
    else:
        print(f"Certificate written to {cfg.output}")
    return final["exit_code"]


# ===== check =====

def _form_from_file(cfg: RunConfig, spec: GroupSpec) -> QuadraticForm:
    raw = _require_object(read_json(cfg.form, "form"), "form")
    if "certificates" in raw:
        expected = spec_hash(spec)
        if raw.get("spec_hash") != expected:
            raise MalformedInput("spec_hash", f"certificate was issued for {raw.get('spec_hash')}, input is {expected}")
        grams = [c["gram"] for c in raw["certificates"] if isinstance(c, dict) and "gram" in c]
        if not grams:
            raise MalformedInput("certificates", "no certificate carries a gram")
        try:
            kind = ScalarKind(raw.get("scalar", spec.scalar.value))
        except ValueError:
            raise MalformedInput("scalar", f"expected 'rational' or 'float', got {raw.get('scalar')!r}")
        return QuadraticForm(mat_from_wire(grams[0], kind, "certificates[0].gram"))
    if "gram" not in raw:
        raise MalformedInput("gram", "expected a certificate or an object with a 'gram' entry")
    return QuadraticForm(mat_from_wire(raw["gram"], spec.scalar, "gram"))


def run_check(cfg: RunConfig) -> int:
    spec, _, _ = load_group(cfg)
    form = _form_from_file(cfg, spec)
    closure = close_group(spec)
    axioms = axiom_report(closure)

    residual = invariance_residual(form, closure)
    if form.kind is ScalarKind.RATIONAL:
        invariant = residual == 0
    else:
        invariant = float(residual) <= cfg.tolerance
    positive = is_positive_definite(form)

    print_banner("INVARIANCE CHECK")
    print(f"Closure: {len(closure)} members ({'complete' if closure.complete else 'sampled'})")
    print(f"Residual: {residual}")
    print(f"Positive-definite: {positive}")
    print(f"-I in group: {axioms.negation_present}")
    for note in axioms.notes:
        print(f"Note: {note}")

    exit_code = EXIT_OK if invariant and positive else EXIT_REJECTED
    report = {
        "spec_hash": spec_hash(spec),
        "residual": scalar_to_wire(residual),
        "invariant": invariant,
        "positive_definite": positive,
        "closure_complete": closure.complete,
        "negation_present": axioms.negation_present,
        "screen_passed": axioms.screen.passed,
        "exit_code": exit_code,
    }
    if cfg.output is not None:
        write_json(cfg.output, report)
    return exit_code


# ===== geom =====

class GeomRequest(BaseModel):
    construction: Literal["ruler", "line", "parallelogram"]
    scalar: ScalarKind = ScalarKind.RATIONAL
    a: List = Field(default_factory=list)
    b: List = Field(default_factory=list)
    c: Optional[List] = None
    d: Optional[List] = None
    k: int = 1
    l: int = 0
    n: int = 2
    num_bound: int = 2
    den_bound: int = 2


def _point(raw, kind: ScalarKind, field: str) -> Point:
    return Point(vec_from_wire(raw, kind, field))


def _show(p: Point) -> str:
    return "(" + ", ".join(str(x) for x in vec_to_wire(p.coords)) + ")"


def run_geom(cfg: RunConfig) -> int:
    request = GeomRequest.model_validate(_require_object(read_json(cfg.input, "input"), "input"))
    kind = request.scalar
    a, b = _point(request.a, kind, "a"), _point(request.b, kind, "b")
    report = {"construction": request.construction}

    print_banner(f"PLANE CONSTRUCTION: {request.construction.upper()}")
    if request.construction == "ruler":
        ruler = ruler_between(a, b, request.k, request.l, request.n)
        for i, p in enumerate(ruler.points):
            print(f"  c_{i} = {_show(p)}")
        report["points"] = [vec_to_wire(p.coords) for p in ruler.points]

    elif request.construction == "line":
        line = rational_line(a, b, request.num_bound, request.den_bound)
        ordered = sorted(line, key=lambda p: tuple(float(x) for x in p.coords))
        print(f"  {len(ordered)} points with |p| <= {request.num_bound}, 1 <= d <= {request.den_bound}")
        for p in ordered:
            print(f"  {_show(p)}")
        # one concrete ruler reaching the far end of the parameter range
        ruler, index = line_point_construction(a, b, Fraction(-request.num_bound, request.den_bound))
        print(f"  b + q(a - b) for q = -{request.num_bound}/{request.den_bound} is c_{index} of a {ruler.n}-ruler")
        report["points"] = [vec_to_wire(p.coords) for p in ordered]
        report["witness_ruler"] = {"n": ruler.n, "index": index, "point": vec_to_wire(ruler[index].coords)}

    else:
        c = _point(request.c, kind, "c") if request.c is not None else None
        if c is None:
            raise MalformedInput("c", "a parallelogram needs a, b and c")
        d = _point(request.d, kind, "d") if request.d is not None else complete_parallelogram(a, b, c)
        holds = is_parallelogram(a, b, c, d)
        print(f"  a={_show(a)} b={_show(b)} c={_show(c)} d={_show(d)}")
        print(f"  parallelogram: {holds}")
        report.update({"d": vec_to_wire(d.coords), "parallelogram": holds})

    if cfg.output is not None:
        write_json(cfg.output, report)
    return EXIT_OK


# ===== patch =====

def _evaluator(cfg: RunConfig) -> FormEvaluator:
    if cfg.builtin == "quartic":
        return FormEvaluator.quartic(cfg.dim)
    if cfg.builtin == "sphere":
        return FormEvaluator.sphere(cfg.dim)
    raw = _require_object(read_json(cfg.input, "input"), "input")
    try:
        kind = ScalarKind(raw.get("scalar", "rational"))
    except ValueError:
        raise MalformedInput("scalar", f"expected 'rational' or 'float', got {raw.get('scalar')!r}")
    rows = raw.get("gram")
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise MalformedInput("gram", "expected an n×n array")
    gram = GramN(tuple(
        tuple(scalar_from_wire(x, kind, f"gram[{i}][{k}]") for k, x in enumerate(row))
        for i, row in enumerate(rows)
    ))
    return FormEvaluator.from_gram(gram)


def run_patch(cfg: RunConfig) -> int:
    q = _evaluator(cfg)
    tol = 0 if q.kind is ScalarKind.RATIONAL else cfg.tolerance

    print_banner(f"FORM PATCH: {q.name} in dimension {q.dim}")
    try:
        gram = patch_form(q, tol=tol, seed=cfg.seed)
    except NotQuadratic as exc:
        w = exc.witness
        print(f"Not quadratic: {w.kind} residual {w.residual}")
        print(f"Witness vectors: {[[str(x) for x in v] for v in w.vectors]}")
        report = {
            "quadratic": False,
            "witness": {
                "kind": w.kind,
                "vectors": [[scalar_to_wire(x) for x in v] for v in w.vectors],
                "residual": scalar_to_wire(w.residual),
                "lam": None if w.lam is None else scalar_to_wire(w.lam),
            },
            "exit_code": EXIT_REJECTED,
        }
        if cfg.output is not None:
            write_json(cfg.output, report)
        return EXIT_REJECTED
    except NotPositiveDefinite as exc:
        print(f"Assembled form is not positive-definite: {exc}")
        if cfg.output is not None:
            write_json(cfg.output, {"quadratic": True, "positive_definite": False, "exit_code": EXIT_REJECTED})
        return EXIT_REJECTED

    for row in gram.rows:
        print("  " + "  ".join(str(x) for x in row))
    if cfg.output is not None:
        write_json(cfg.output, {
            "quadratic": True,
            "positive_definite": True,
            "gram": [[scalar_to_wire(x) for x in row] for row in gram.rows],
            "exit_code": EXIT_OK,
        })
    return EXIT_OK


# ===== Entry point =====

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="planeform", description="Invariant quadratic forms on the plane")
    parser.add_argument("command", choices=["synth", "check", "geom", "patch"])
    parser.add_argument("--method", choices=["averaging", "contraction", "algebraic", "all"])
    parser.add_argument("--input", type=Path)
    parser.add_argument("--output", type=Path)
    parser.add_argument("--form", type=Path)
    parser.add_argument("--tol", type=float, dest="tolerance")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--closure-limit", type=int, dest="closure_limit")
    parser.add_argument("--max-iter", type=int, dest="max_iter")
    parser.add_argument("--dim", type=int)
    parser.add_argument("--builtin", choices=["quartic", "sphere"])
    return parser


COMMANDS = {
    "synth": run_synth,
    "check": run_check,
    "geom": run_geom,
    "patch": run_patch,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    settings = get_settings()
    logging.basicConfig(level=settings.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")

    args = build_parser().parse_args(argv)
    options = {key: value for key, value in vars(args).items() if value is not None}
    try:
        cfg = RunConfig(**options)
        return COMMANDS[cfg.command](cfg)
    except ValidationError as e:
        print(f"\nInvalid input: {e}\n")
        return EXIT_INPUT
    except INPUT_ERRORS as e:
        print(f"\nInvalid input: {e}\n")
        return EXIT_INPUT
    except SingularGenerator as e:
        print(f"\nRejected: {e}\n")
        return EXIT_REJECTED
    except GeometryError as e:
        logger.debug("Unhandled kernel error", exc_info=True)
        print(f"\nError: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
