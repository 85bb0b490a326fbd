"""Exception types shared across the package.

Everything derives from SieveLogicError so the CLI can map library
failures to a single "bad input" exit code.
"""


class SieveLogicError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SieveLogicError):
    """Malformed user input: files, names, tolerance keys, spec strings."""


class NotHermitianError(InputError):
    """A matrix that must be Hermitian is not, beyond tolerance."""


class DegenerateClusteringError(InputError):
    """Eigenvalue clustering is order-dependent: a closeness chain spans
    more than the grouping tolerance."""


class ZeroNormError(InputError):
    """A state vector with (numerically) zero norm."""


class BaseMismatchError(SieveLogicError):
    """Sieve operation applied to sieves over different bases or modes."""


class NotSubalgebraError(SieveLogicError):
    """Claimed subalgebra relation does not hold."""


class InconsistentAssignmentsError(InputError):
    """Explicit partial-valuation assignments contradict each other on a
    common coarse-graining."""


class StillColorableError(SieveLogicError):
    """Minimization requested for a family that admits a section."""
