"""Exception types shared across the library."""


class VordiffError(Exception):
    """Base class for all library errors."""


class DomainError(VordiffError, ValueError):
    """Input outside the domain or preconditions of an operation."""


class SingularOrderError(DomainError):
    """Fractional integral requested at a node where the order vanishes."""


class NumericalError(VordiffError):
    """A numerical step failed (non-invertible step coefficient, overflow)."""


class IllPosedExtractionError(VordiffError):
    """Mode-extraction design matrix is too ill-conditioned to trust."""


class ConfigError(VordiffError):
    """Invalid or unparsable run configuration."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc = f"{path}: " if line is None else f"{path}:{line}: "
        super().__init__(f"{loc}{message}")
        self.path = path
        self.line = line
