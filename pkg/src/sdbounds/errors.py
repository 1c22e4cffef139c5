"""Exception hierarchy.

All validation failures derive from :class:`SDBoundsError` so the CLI can map
them to exit code 1 with a JSON payload naming the class.
"""


class SDBoundsError(ValueError):
    """Base class for every input/validation error raised by the package."""

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class NotSquare(SDBoundsError):
    pass


class NotHermitian(SDBoundsError):
    def __init__(self, asymmetry: float, tol: float):
        super().__init__(f"max |H - H^dagger| = {asymmetry:.3e} exceeds {tol:.3e}")
        self.asymmetry = asymmetry


class DimensionMismatch(SDBoundsError):
    pass


class NonNormalizedState(SDBoundsError):
    pass


NotNormalized = NonNormalizedState


class NegativeEigenvalue(SDBoundsError):
    def __init__(self, lam_min: float):
        super().__init__(f"smallest eigenvalue {lam_min:.3e} is below the clamp window")
        self.lam_min = lam_min


class NotDensityMatrix(SDBoundsError):
    pass


class DegenerateSuperposition(SDBoundsError):
    """The superposed components cancel: the assembled vector has (near) zero norm."""


class InvalidSpec(SDBoundsError):
    pass


class GenerationFailure(SDBoundsError):
    def __init__(self, message: str, index: int | None = None):
        super().__init__(message if index is None else f"trial {index}: {message}")
        self.index = index


class ParseError(SDBoundsError):
    pass


class ConvergenceFailure(RuntimeError):
    """Jacobi sweeps did not drive the off-diagonal mass below tolerance."""


class InvariantViolation(RuntimeError):
    """An identity that must hold by construction failed; indicates a bug."""
