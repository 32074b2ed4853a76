"""Exception types shared across the package."""


class TruncratioError(Exception):
    """Base class for all package-specific errors."""


class ContractViolationError(TruncratioError):
    """An argument violated a documented precondition."""


class UnsupportedCapabilityError(TruncratioError):
    """The model does not implement the requested optional capability."""


class WrongOracleError(TruncratioError):
    """The oracle that was called does not apply to this latent space."""


class EnumerationCapError(TruncratioError):
    """Latent-space cardinality exceeds the configured enumeration cap."""


class NonIntegrableError(TruncratioError):
    """Quadrature bracketing failed because the integrand does not decay."""


class DegenerateSupportError(TruncratioError):
    """Joint densities vanish where they are assumed nonzero almost everywhere."""


class UndefinedRatioError(TruncratioError):
    """A ratio estimate was requested from a zero-mean integral estimate."""


class BadInitializationError(TruncratioError):
    """A chain was started at a state with zero joint density."""


class StuckChainError(TruncratioError):
    """A chain accepted no proposal during its entire burn-in."""


class ConfigError(TruncratioError):
    """A run configuration document failed validation."""


class AscentAbortedError(TruncratioError):
    """An ascent run failed mid-iteration; carries the partial trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
