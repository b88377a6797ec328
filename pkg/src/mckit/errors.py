"""Exception types shared across the package.

Everything numerical raises DomainError for bad arguments rather than letting
NaNs propagate; the more specific classes below exist so callers can react to
recoverable sampling failures (a vanishing acceptance rate, an empty
truncation region) without string-matching messages.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class NotPositiveDefinite(DomainError):
    """A matrix required to be positive definite has a pivot at or below tolerance."""


class NotLogConcave(DomainError):
    """Log-density evaluations violate the concavity the adaptive hull requires."""


class InvalidStart(DomainError):
    """A chain's starting point has zero density or violates its constraints."""


class BoundViolation(DomainError):
    """The envelope constant in a rejection sampler is too small for the target."""


class InvalidPieces(DomainError):
    """A piecewise CDF specification is inconsistent (breaks, masses, or inverses)."""


class BadSimplex(DomainError):
    """A probability vector has negative entries or does not sum to one."""


class EmptyRegion(DomainError):
    """A truncation region carries no probability mass under the parent law."""


class LowAcceptance(RuntimeError):
    """A rejection loop's acceptance rate is too small to finish realistically."""


class InfeasibleBounds(DomainError):
    """Linear constraints leave an empty interval for some coordinate."""


class DofTooSmall(DomainError):
    """The requested moment does not exist at this degrees-of-freedom value."""


class DegenerateSample(DomainError):
    """A sample is too concentrated for the moment-matching estimate to exist."""


class EmptyCluster(RuntimeError):
    """A clustering step produced a cluster with no members and could not recover."""


class QuadratureFailure(RuntimeError):
    """A numerical integral came back non-finite or non-positive."""


class SingularMatrix(DomainError):
    """A matrix required to be invertible is singular to working precision."""
