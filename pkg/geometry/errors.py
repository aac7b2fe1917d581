#Exception hierarchy for the geometry kernel.


class GeometryError(Exception):
    """Root of every error raised by the kernel."""


class ScalarKindMismatch(GeometryError, TypeError):
    """Exact rationals and binary floats met in one operation."""


class MalformedInput(GeometryError, ValueError):
    """A wire value could not be parsed; `field` names the offending entry."""

    def __init__(self, field: str, detail: str):
        self.field = field
        self.detail = detail
        super().__init__(f"{field}: {detail}")


class AsymmetricGram(GeometryError, ValueError):
    pass


class NotTraceless(GeometryError):
    pass


class SingularMatrix(GeometryError):
    pass


class SingularGenerator(SingularMatrix):
    pass


class IrrationalValue(GeometryError):
    """The exact backend would need an irrational number."""


class IrrationalNormalizer(IrrationalValue):
    pass


class BadIndices(GeometryError):
    pass


class BadBounds(GeometryError):
    pass


class TooShort(GeometryError):
    pass


class NotARuler(GeometryError, ValueError):
    """A point sequence that breaks the middle recurrence."""


class DegenerateLine(GeometryError):
    pass


class MissingNegation(GeometryError):
    pass


class IncompleteClosure(GeometryError):
    pass


class NotPositiveDefinite(GeometryError):
    pass


class NoConvergence(GeometryError):
    def __init__(self, max_iter: int, residual):
        self.max_iter = max_iter
        self.residual = residual
        super().__init__(f"no convergence after {max_iter} iterations (residual {residual})")


class ScreenFailed(GeometryError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"boundedness screen rejected the group: {report.reason}")


class DimensionMismatch(GeometryError):
    pass


class DimensionOutOfRange(GeometryError):
    pass


class NotQuadratic(GeometryError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"not quadratic: {witness.kind} violation {witness.residual}")
