"""Exception types, split by how the CLI reports them.

ValidationError covers bad inputs (file format, graph preconditions,
parameter misuse); NumericalError covers computations that leave their
valid domain at runtime.
"""


class SoapcertError(Exception):
    """Base class for all library errors."""


class ValidationError(SoapcertError, ValueError):
    """Input data or a parameter violates a documented precondition."""


class NumericalError(SoapcertError, ArithmeticError):
    """A computation left its valid domain."""


class DiameterBoundError(NumericalError):
    """Spherical points too close to an antipodal pair."""


class ConjugatePointError(NumericalError):
    """Radial quantity requested at or beyond the conjugate radius."""


class ApexOnGraphError(NumericalError):
    """Cone apex coincides with a point of the graph."""


class IterationError(NumericalError):
    """A fixed-point or search iteration failed to converge."""
