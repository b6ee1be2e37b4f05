"""Exception hierarchy shared by every accelwave package."""

from typing import Any, Dict, Optional


class AccelwaveError(Exception):
    """Base class for all accelwave errors"""

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        return {"status": "error", "error": type(self).__name__, "message": self.message, **self.details}


# analytic-solutions
class InvalidRegion(AccelwaveError):
    """A square-root argument (the G^2 radicand) is negative"""


class DivisionNearZero(AccelwaveError):
    """|psi| fell below the configured floor where G'/(2 psi^2) was requested"""


class QuadratureFailure(AccelwaveError):
    """Adaptive quadrature did not reach the requested tolerance"""


# residual-oracle
class PsiFloor(AccelwaveError):
    """Samples were skipped because |psi| was below the floor"""


class Inconclusive(AccelwaveError):
    """Both or neither adjudication candidates converged"""


# propagator
class NonFiniteField(AccelwaveError):
    """A wave field contains NaN or Inf"""


class Overflow(AccelwaveError):
    """max|Psi| exceeded the gain ceiling"""


class SolveFailure(AccelwaveError):
    """The Crank-Nicolson system is numerically singular"""


# diagnostics
class NormFloor(AccelwaveError):
    """Norm below floor: the centre of mass cannot be defined"""


class DegenerateTimes(AccelwaveError):
    """Trajectory times are not distinct"""


# experiments / output
class NormalizationError(AccelwaveError):
    """A density map cannot be normalised because its maximum is zero"""


class InsufficientSnapshots(AccelwaveError):
    """A record holds fewer stored fields than an output requires"""


class IOFailure(AccelwaveError):
    """Writing an artifact failed"""


class ParseError(AccelwaveError):
    """A configuration text could not be parsed"""

    def __init__(self, message: str, line: Optional[int] = None, **details: Any):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, line=line, **details)
        self.line = line


class ValidationError(AccelwaveError):
    """A parsed value violates an invariant"""

    def __init__(self, message: str, invariant: Optional[str] = None, **details: Any):
        super().__init__(message, invariant=invariant, **details)
        self.invariant = invariant
