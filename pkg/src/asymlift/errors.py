"""Exception types shared across the package."""


class AsymliftError(Exception):
    """Base class for all package-specific failures."""


class DimensionError(AsymliftError, ValueError):
    """Inputs are not square or their dimensions do not match."""


class ValidationError(AsymliftError):
    """A map failed channel validation (complete positivity / unitality)."""


class ResourceLimitError(AsymliftError):
    """An operation would allocate beyond the configured dimension ceiling."""


class PeripheralDefectError(AsymliftError):
    """A peripheral eigenvalue cluster is numerically defective.

    For a validated unital completely positive map the peripheral spectrum
    is semisimple, so hitting this on such input signals numerical trouble
    rather than genuine Jordan structure.
    """


class QRangeMismatchError(AsymliftError):
    """The idempotent maps a product outside the span it is supposed to fix."""


class AlgebraAxiomError(AsymliftError):
    """A Choi-Effros algebra axiom (associativity, involution, unit) failed."""


class InternalInconsistencyError(AsymliftError):
    """Two routes to the same object disagree beyond tolerance.

    Raised when theory guarantees agreement, so the root cause is an invalid
    input channel or a numerical fault, never a recoverable condition.
    """
