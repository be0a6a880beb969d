"""Exception types shared across the package."""


class SwinferError(Exception):
    """Base class for all package errors."""


class EmptySample(SwinferError):
    """A sample or projection with no points was supplied."""


class DimensionMismatch(SwinferError):
    """Point dimension and direction dimension disagree."""


class InvalidTrim(SwinferError):
    """Trimming constant outside [0, 1/2) or order r < 1."""


class WrongFamily(SwinferError):
    """A band operation was called with a spec of the other family."""


class NuTooLarge(SwinferError):
    """The relative-VC constant is >= 1: n is too small for this alpha."""


class A1Violated(SwinferError):
    """The band leaves (0, 1) at the trimming boundaries.

    ``min_delta`` is the smallest trimming constant that would satisfy the
    condition at the same (alpha, n, m), or None when no delta < 1/2 works.
    """

    def __init__(self, message: str, min_delta: float | None = None):
        super().__init__(message)
        self.min_delta = min_delta


class TooFewPoints(SwinferError):
    """An operation needs at least two points."""


class InvalidParams(SwinferError):
    """Model or simulator parameters outside their documented domain."""


class NoOracle(SwinferError):
    """No closed-form distance is registered for this model and trim order."""


class InvalidSpec(SwinferError):
    """An analytic distribution specification is inconsistent."""


class SimulatorFailure(SwinferError):
    """A user simulator raised or returned points of the wrong shape."""
