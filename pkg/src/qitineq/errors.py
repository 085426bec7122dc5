"""Exception hierarchy.

Every error that signals a violated precondition derives from
:class:`PreconditionError`; the verification harness catches that base
class to regenerate an instance instead of aborting the campaign.
"""


class QitIneqError(Exception):
    """Base class for all package errors."""


class PreconditionError(QitIneqError, ValueError):
    """An input does not satisfy the documented precondition."""


class NotHermitian(PreconditionError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class SingularB(PreconditionError):
    """A matrix that must be strictly positive is not (above threshold)."""


class DomainViolation(PreconditionError):
    """An eigenvalue lies outside a scalar function's domain."""


class ShapeMismatch(PreconditionError):
    pass


class DegenerateBlock(PreconditionError):
    pass


class WrongKind(PreconditionError):
    pass


class SingularNormalizer(PreconditionError):
    """The covariance normalizer Phi(f(rho) g(rho)^2) is not strictly positive."""


class NotSameMonotone(PreconditionError):
    pass


class NonCommutativeRange(PreconditionError):
    pass


class NoConvergence(QitIneqError, RuntimeError):
    """Jacobi sweep cap reached; indicates an implementation fault."""
