"""Exception hierarchy shared across the package."""


class ReldiffError(Exception):
    """Base class for all package-specific errors."""


class InvalidConfigError(ReldiffError, ValueError):
    """A configuration value violates a documented precondition."""


class CorruptContainerError(ReldiffError, IOError):
    """A container file is structurally inconsistent (sizes, magic, header)."""


class UnsupportedVersionError(ReldiffError, IOError):
    """A container declares a schema version this code does not understand."""


class GenerationError(ReldiffError, RuntimeError):
    """Dataset generation failed (e.g. no stable coefficient matrix found)."""


class MaskGenerationError(ReldiffError, RuntimeError):
    """No usable target row could be selected while generating masks."""


class TrainingDivergedError(ReldiffError, RuntimeError):
    """Training produced a non-finite loss."""


class UndefinedMetricError(ReldiffError, ValueError):
    """A metric is undefined for the given inputs (e.g. single-class AUROC)."""
