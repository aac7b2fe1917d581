#Shared wire representation.
#Matrices are row-major 2x2 arrays, rationals are "p/q" strings, floats are JSON numbers.

import hashlib
import json
from fractions import Fraction
from pathlib import Path
from typing import Any, List, Optional

from geometry.errors import MalformedInput
from geometry.linalg import Mat2, Scalar, ScalarKind, Vec2


def scalar_to_wire(x: Scalar) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


def scalar_from_wire(raw: Any, kind: ScalarKind, field: str) -> Scalar:
    if isinstance(raw, bool) or not isinstance(raw, (int, float, str, Fraction)):
        raise MalformedInput(field, f"expected a number or 'p/q' string, got {raw!r}")
    try:
        if kind is ScalarKind.RATIONAL:
            # decimal literals stay exact: 0.1 means 1/10
            return Fraction(repr(raw)) if isinstance(raw, float) else Fraction(raw)
        return float(Fraction(raw)) if isinstance(raw, str) else float(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(field, f"cannot parse {raw!r}: {exc}") from exc


def vec_to_wire(v: Vec2) -> List[Any]:
    return [scalar_to_wire(x) for x in v]


def vec_from_wire(raw: Any, kind: ScalarKind, field: str) -> Vec2:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise MalformedInput(field, f"expected 2 coordinates, got {raw!r}")
    return Vec2(*(scalar_from_wire(x, kind, f"{field}[{i}]") for i, x in enumerate(raw)))


def mat_to_wire(m: Mat2) -> List[List[Any]]:
    return [[scalar_to_wire(x) for x in row] for row in m.rows()]


def mat_from_wire(raw: Any, kind: ScalarKind, field: str) -> Mat2:
    if isinstance(raw, Mat2):
        return raw
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise MalformedInput(field, f"expected 2 rows, got {raw!r}")
    rows = []
    for i, row in enumerate(raw):
        if not isinstance(row, (list, tuple)) or len(row) != 2:
            raise MalformedInput(f"{field}[{i}]", f"expected 2 entries, got {row!r}")
        rows.append([scalar_from_wire(x, kind, f"{field}[{i}][{k}]") for k, x in enumerate(row)])
    return Mat2.from_rows(rows)


def sort_key(m: Mat2) -> str:
    """Deterministic order used for reproducible tie-breaking."""
    return json.dumps(mat_to_wire(m))


def canonical_json(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def payload_hash(payload: Any) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


def read_json(path: Path, field: str = "input") -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise MalformedInput(field, f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(field, f"invalid JSON in {path}: {exc}") from exc


def write_json(path: Optional[Path], payload: Any) -> str:
    text = canonical_json(payload)
    if path is not None:
        Path(path).write_text(text)
    return text
