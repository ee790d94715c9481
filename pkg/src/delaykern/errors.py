"""Exception hierarchy shared by all delaykern modules.

Two families matter to callers: configuration/domain errors (the request
itself is invalid: parameters outside the formulas' domain, inconsistent
grids) and numerical failures discovered while computing (divergence of a
simulated trajectory, loss of closed-loop stability). The CLI maps the
first family to exit code 2 and the second to exit code 3.
"""


class DelaykernError(Exception):
    """Base class for all package errors."""


class DomainError(DelaykernError):
    """Parameters outside the domain of a formula or operation."""


class BoundaryError(DomainError):
    """Evaluation exactly on a boundary where the formula is undefined."""


class NoSolutionError(DomainError):
    """The defining equation has no solution for these parameters."""


class SymmetryError(DomainError):
    """An input required to be symmetric is not."""


class AliasError(DomainError):
    """Frequency window and spatial grid are mutually under-resolved."""


class ResolutionError(DomainError):
    """Grid spacing too coarse to resolve the requested computation."""


class UnstabilizableError(DelaykernError):
    """A subsystem cannot be stabilized by any proportional gain."""


class DivergenceError(DelaykernError):
    """A simulated trajectory exceeded the divergence threshold."""


class InstabilityError(DelaykernError):
    """A gain fails the closed-loop stability certificate."""
