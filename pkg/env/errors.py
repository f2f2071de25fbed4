"""
Exception tree shared by the simulator, the compiler and the CLI.
"""


class ModularError(Exception):
    """Base class for every error raised by this project."""


class GridError(ModularError, ValueError):
    pass


class DomainError(ModularError, ValueError):
    pass


class RepresentationError(ModularError):
    pass


class GridMismatchError(ModularError, ValueError):
    pass


class FiberIndexError(ModularError, IndexError):
    pass


class WeightError(ModularError, ValueError):
    pass


class EnvelopeError(ModularError, ValueError):
    pass


class PolicyError(ModularError, ValueError):
    pass


class BudgetError(ModularError):
    pass


class CompileError(ModularError):
    pass


class ConfigError(ModularError):
    pass


class InvariantViolation(ModularError):
    pass


class CircuitParseError(ModularError):
    """Circuit text error with a 1-based line/column position."""

    def __init__(self, message, line, column):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")
