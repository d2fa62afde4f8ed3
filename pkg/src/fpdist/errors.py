"""Exception types shared across the package.

The CLI maps these onto exit codes: parameter/domain errors -> 1,
input/parse errors -> 2, convergence failures -> 3.
"""


class FpdistError(Exception):
    """Base class for all package errors."""


class ParameterError(FpdistError, ValueError):
    """Invalid or out-of-domain parameter value."""


class ParseError(FpdistError, ValueError):
    """Malformed input file."""

    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ConsistencyError(FpdistError, ValueError):
    """Inputs that are individually valid but mutually inconsistent."""


class ConvergenceError(FpdistError, RuntimeError):
    """An iterative solver failed to converge."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class UnachievableTargetError(ParameterError):
    """A fitting target lies outside the achievable range."""

    def __init__(self, message, achievable=None):
        super().__init__(message)
        self.achievable = achievable
