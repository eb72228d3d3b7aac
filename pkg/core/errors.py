"""Exception hierarchy for the integrator library."""


class BorisGCError(Exception):
    """Base class for all library errors."""


class SingularMatrix(BorisGCError):
    """A 3x3 system has a determinant below the singularity tolerance."""


class FieldDomainError(BorisGCError):
    """A field was evaluated outside the region where it is defined."""


class ZeroField(FieldDomainError):
    """The magnetic field vanishes, so the B direction is undefined."""


class NonFinite(BorisGCError):
    """
    The integration left the finite range.

    Raised when a state component becomes NaN/Inf or the position norm
    exceeds the blow-up radius.
    """

    def __init__(self, message: str, step: int | None = None) -> None:
        super().__init__(message)
        self.step = step


class GridMismatch(BorisGCError):
    """Two trajectories do not share the same output time grid."""


class ConfigurationError(BorisGCError):
    """Invalid experiment or field configuration."""
