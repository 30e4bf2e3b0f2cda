"""Exception hierarchy.

Domain errors (``DomainError`` subclasses) map to CLI exit code 2; plain
``ValidationError`` and JSON parse problems map to exit code 1.
"""


class ProbteleError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(ProbteleError, ValueError):
    """Input data violates a structural invariant (shape, normalization, ...)."""


class DimensionError(ValidationError):
    """Operands have incompatible shapes."""


class DomainError(ProbteleError):
    """A well-formed input for which the requested quantity does not exist."""


class SingularError(DomainError):
    """Matrix (usually the channel Q) has a vanishing singular value.

    For a channel this means a zero Schmidt coefficient: faithful
    teleportation is impossible and the faithful probability is undefined.
    """


class NotUnitaryError(DomainError):
    """A matrix expected to be unitary fails the unitarity tolerance."""


class NotFaithfulError(DomainError):
    """Measurement operator admits no state-independent recovery unitary."""


class NotOrthonormalError(DomainError):
    """Operators handed to basis completion are not pairwise orthonormal."""


class ZeroProbabilityError(DomainError):
    """Projection annihilates the state, so no normalized output exists."""


class UnsupportedDimensionError(DomainError):
    """Operation is only defined for a specific dimension (e.g. N = 2)."""


class ConvergenceError(DomainError):
    """An iterative kernel hit its iteration cap without converging."""
