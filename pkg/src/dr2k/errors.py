"""Exception types shared across the package.

The split matters for the CLI exit-code policy: input problems
(DimensionMismatchError, ModelValidationError, EnumerationCapError,
NotApplicableError) mean the tool was fed something it refuses to
analyze, while InternalConsistencyError means a machine-checked
mathematical identity failed and the implementation itself is wrong.
"""


class Dr2kError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(Dr2kError, ValueError):
    """Operands have incompatible shapes or ambient dimensions."""


class ModelValidationError(Dr2kError, ValueError):
    """A dynamics model violates its invariants (with a witness).

    The offending point, map index, or matrix entry is carried in
    ``witness`` so callers can point at the exact violation.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class EnumerationCapError(Dr2kError, ValueError):
    """An exhaustive enumeration would exceed the configured cap."""


class NotApplicableError(Dr2kError, ValueError):
    """The requested analysis does not apply to this kind of model."""


class InternalConsistencyError(Dr2kError, AssertionError):
    """A construction-time verification failed.

    Raised when a property that is supposed to hold by theorem (square
    commutes, row exact, witness re-verifies) does not. This never
    indicates bad input; it falsifies the implementation.
    """
