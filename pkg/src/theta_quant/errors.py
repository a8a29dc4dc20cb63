"""Exception hierarchy for Theta-Quant."""

from typing import Optional, Tuple


class ThetaQuantError(Exception):
    """Base class for every error raised by this package."""


class NonConvergent(ThetaQuantError, ArithmeticError):
    """A series or iteration failed to converge (e.g. Im tau <= 0)."""


class PoleError(ThetaQuantError, ArithmeticError):
    """Evaluation landed on (or too close to) a pole of an elliptic function."""


class BranchPointOnPath(ThetaQuantError, ValueError):
    """A branch point or pole of an integrand lies on the integration segment."""


class SingularParameter(ThetaQuantError, ValueError):
    """A closed formula is evaluated at a parameter value where it is singular."""


class BranchError(ThetaQuantError, ValueError):
    """The elliptic square root y vanishes at the requested point."""


class PoleState(ThetaQuantError, ArithmeticError):
    """The theta vector field is evaluated where theta_1 vanishes."""


class DegenerateState(ThetaQuantError, ValueError):
    """A coordinate change is evaluated on its degeneracy locus."""


class DegenerateInertia(ThetaQuantError, ValueError):
    """Two principal moments of inertia coincide."""


class StepUnderflow(ThetaQuantError, ArithmeticError):
    """The adaptive integrator step collapsed below the representable minimum."""


class SingularJacobian(ThetaQuantError, ArithmeticError):
    """The jacobian of a coordinate map is singular."""


class FieldZero(ThetaQuantError, ValueError):
    """The planar vector field component A(x, y) vanishes at the point."""


class TruncationOverflow(ThetaQuantError, ValueError):
    """An operator would produce a monomial above the truncation degree."""


class IdentityViolation(ThetaQuantError):
    """An exact operator identity failed.

    Attributes:
        identity: Human readable name of the identity
        monomial: Exponent pair (a, b) of the first failing basis monomial
        residual: The nonzero residual polynomial as a string
    """

    def __init__(self, identity: str, monomial: Tuple[int, int], residual: str):
        self.identity = identity
        self.monomial = monomial
        self.residual = residual
        super().__init__(
            f"{identity} fails on x^{monomial[0]} y^{monomial[1]}: residual {residual}"
        )


class NotConverged(ThetaQuantError):
    """Band edges moved more than the tolerance when the truncation grew.

    Attributes:
        shift: Largest observed edge shift
        tolerance: The convergence tolerance that was exceeded
    """

    def __init__(self, shift: float, tolerance: float):
        self.shift = shift
        self.tolerance = tolerance
        super().__init__(f"Band edges not converged: shift {shift:.3e} > {tolerance:.1e}")


class ConfigError(ThetaQuantError, ValueError):
    """Invalid configuration file or option value.

    Attributes:
        line: 1-based line number in the configuration file, if known
        field: Name of the offending field, if known
    """

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        self.line = line
        self.field = field
        prefix = ""
        if line is not None:
            prefix = f"line {line}: "
        elif field is not None:
            prefix = f"{field}: "
        super().__init__(prefix + message)
