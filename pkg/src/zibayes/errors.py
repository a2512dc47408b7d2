"""Exception hierarchy shared by every module."""


class ZibayesError(Exception):
    """Base class for all package errors."""


class InvalidInputError(ZibayesError, ValueError):
    """Malformed input: empty samples, NaN where a number is required."""


class DomainError(ZibayesError, ValueError):
    """A parameter lies outside the domain of the function."""


class DataError(ZibayesError):
    """Unreadable or invalid data file.

    ``line`` carries the 1-based line number when the problem is local.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class OracleError(ZibayesError, ArithmeticError):
    """A numerical reference (quadrature, summation) failed to converge."""


class RadicandError(ZibayesError, ArithmeticError):
    """A closed-form square root received a negative radicand.

    The offending value is kept on the instance so callers can report the
    region rather than propagate NaN.
    """

    def __init__(self, message, radicand, kappa, gamma):
        super().__init__(message)
        self.radicand = radicand
        self.kappa = kappa
        self.gamma = gamma


class FitError(ZibayesError):
    """Maximum likelihood fitting could not produce an estimate."""


class NonIdentifiableError(FitError):
    """The model parameters are not identifiable from this sample."""


class DegenerateVarianceError(ZibayesError, ArithmeticError):
    """Vuong statistic undefined: the pointwise log ratios have zero spread."""


class NoSelectionError(ZibayesError):
    """No converged fit was available to select from."""
