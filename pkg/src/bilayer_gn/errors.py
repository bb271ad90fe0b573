"""Exception hierarchy shared by every module."""

from __future__ import annotations


class BilayerGNError(Exception):
    """Base class for all package errors."""


class NonPositiveNu(BilayerGNError, ValueError):
    """``lambda - 1/bo`` fell below ``nu0``: surface tension too strong for the model."""


class ConditionViolation(BilayerGNError):
    """A pointwise admissibility condition (H1, H2 or H3) failed.

    Attributes
    ----------
    condition : str
        ``"H1"``, ``"H2"`` or ``"H3"``.
    location : int or None
        First grid index where the condition fails.
    value : float
        Offending minimum.
    """

    condition = "H?"

    def __init__(self, message: str, location: int | None = None, value: float = float("nan")):
        super().__init__(message)
        self.location = location
        self.value = value


class DepthViolation(ConditionViolation):
    condition = "H1"


class EllipticityViolation(ConditionViolation):
    condition = "H2"


class SymmetrizerViolation(ConditionViolation):
    condition = "H3"


class NumericalFailure(BilayerGNError):
    """Integrator or linear algebra produced something unusable."""


class SolveFailure(NumericalFailure):
    pass


class NonFiniteSpeed(NumericalFailure):
    pass


class NonFiniteState(NumericalFailure):
    pass


class EmptySeries(BilayerGNError, ValueError):
    pass


class DegenerateLadder(BilayerGNError, ValueError):
    pass


class ParseError(BilayerGNError, ValueError):
    """Malformed scenario configuration; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
