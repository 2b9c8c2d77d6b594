"""Exception hierarchy shared by every dosched module."""


class DoschedError(Exception):
    """Base class for all library errors."""


class ParameterError(DoschedError, ValueError):
    """An argument or configuration value is outside its domain."""


class NumericError(DoschedError, ArithmeticError):
    """A quadrature or iteration failed to converge.

    Attributes
    ----------
    residual : float or None
        Last residual or error estimate, when one is available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BracketError(NumericError):
    """A root finder was handed an interval without a sign change."""


class ContractError(DoschedError, RuntimeError):
    """A precondition on a sample or result was violated."""


class NoNeighborError(DoschedError, LookupError):
    """Nearest-neighbour query on a sample with a single pair."""


class DegenerateConfigError(DoschedError, ValueError):
    """A configuration that cannot produce a conditioned reference link."""


class SpecValidationError(ParameterError):
    """An experiment spec failed schema validation.

    Attributes
    ----------
    problems : list of str
        One entry per offending field.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid experiment spec: " + "; ".join(self.problems))
