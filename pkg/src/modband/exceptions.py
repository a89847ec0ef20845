class ModbandError(Exception):
    """Base class for all errors raised by modband."""


class GridMismatchError(ModbandError, ValueError):
    """A frequency or index does not sit on the required harmonic grid."""


class ConjugateSymmetryError(ModbandError, ValueError):
    """A coefficient map does not describe a real-valued signal."""


class ResolutionError(ModbandError):
    """The event-detection grid is too coarse to separate two folding events."""


class PartitionError(ModbandError, ValueError):
    """Residue cells overlap or fall outside the sample range."""


class UnavailableError(ModbandError):
    """Requested quantity needs data (e.g. ground truth) that is not present."""


class InsufficientDataError(ModbandError, ValueError):
    """Not enough samples or DFT bins for the requested operation."""


class InfeasiblePlanError(ModbandError):
    """A sampling plan is empty or violates one of its guards."""

    def __init__(self, reason, plan=None):
        super().__init__(reason)
        self.reason = reason
        self.plan = plan


class UnsupportedModeError(ModbandError, NotImplementedError):
    """The requested recovery mode is outside what this package implements."""


class IllConditionedError(ModbandError, ValueError):
    """A division by a near-zero quantity was requested."""
