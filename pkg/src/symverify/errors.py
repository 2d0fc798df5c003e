"""Exception types shared across the package.

Each error class marks one failure kind so callers (and the CLI exit-code
mapping) can tell configuration mistakes apart from runtime problems.
"""


class SymverifyError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(SymverifyError):
    """Operands act on different qubit counts or mismatched array shapes."""


class CapacityError(SymverifyError):
    """Request exceeds the dense-simulation size limit."""


class DomainError(SymverifyError):
    """Input is well-formed but outside the operation's domain."""


class RejectionError(SymverifyError):
    """Post-selection kept no statistical weight."""


class DegenerateOverlapError(SymverifyError):
    """Subspace overlap matrix is singular beyond tolerance."""


class DatasetError(SymverifyError):
    """Molecular dataset is missing, unreadable, or fails validation."""


class OptimizerError(SymverifyError):
    """Scalar minimization failed to converge within the evaluation budget."""


class ExperimentError(SymverifyError):
    """A sweep or scan failed; the message names the offending work item."""
