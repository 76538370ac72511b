"""Exception types raised across the package.

Grouped here so modules can share them without circular imports; each
module re-exports the names its own API raises.
"""


class ApointlabError(Exception):
    """Base class for every package-specific error."""


# ---------------------------------------------------------------- complexfn

class PoleAtOne(ApointlabError):
    """zeta (or a function built on it) was requested at its pole s = 1."""


class RangeExceeded(ApointlabError):
    """Requested point is outside the supported evaluation range."""


class PoleAtNonpositiveInteger(ApointlabError):
    """log_gamma was requested at a pole of Gamma (s = 0, -1, -2, ...)."""


class PoleAtOddInteger(ApointlabError):
    """delta was requested at one of its poles (s = 1, 3, 5, ...)."""


class NearSingularity(ApointlabError):
    """delta_log_deriv was requested too close to a zero or pole of delta."""


# ------------------------------------------------------------------ apoints

class BoundaryTooClose(ApointlabError):
    """A contour edge passes too close to a root for reliable counting."""


class NonIntegralWinding(ApointlabError):
    """Phase tracking could not settle on an integral winding number."""


class RefinementDiverged(ApointlabError):
    """Root isolation or polishing failed to converge within its budget."""


class WindowCountMismatch(ApointlabError):
    """Located roots do not account for the window's full winding count."""


class TableError(ApointlabError):
    """Base class for zero-table ingestion problems; carries a line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class ParseError(TableError):
    """A zero-table line is not a positive decimal number."""


class NotAscending(TableError):
    """Zero-table ordinates are not strictly ascending."""


class ResidualTooLarge(TableError):
    """A tabulated ordinate fails the on-the-line residual check."""


# ---------------------------------------------------------------- dirichlet

class LengthMismatch(ApointlabError):
    """Two Dirichlet series of different lengths were combined."""


class ZeroLeadingCoefficient(ApointlabError):
    """Dirichlet inversion needs a nonzero coefficient at n = 1."""


class ACaseOne(ApointlabError):
    """Operation undefined at a = 1 (zeta(s) - 1 has no leading term)."""


class ACaseZero(ApointlabError):
    """Operation undefined at a = 0."""


# ------------------------------------------------------------------- verify

class InsufficientPoints(ApointlabError):
    """The supplied a-point set does not cover the requested height."""


class TooSmallT(ApointlabError):
    """Height T is below the smallest value the formula is defined for."""


class QuadratureNotConverged(ApointlabError):
    """Panel doubling failed to stabilise the contour integral."""


class SeriesTooShort(ApointlabError):
    """Dirichlet series has fewer coefficients than the height requires."""


class InsufficientCoefficients(ApointlabError):
    """Coefficient table does not reach the summation cutoff."""


class SampleTooCloseToAPoint(ApointlabError):
    """A probe point violates the minimum distance to the a-point set."""
