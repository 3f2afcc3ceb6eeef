"""Error taxonomy for circuit compilation, spectra and dynamics."""
from typing import Optional


class StirapError(Exception):
    """Base class for all errors raised by the simulator."""


class CircuitError(StirapError):
    """Invalid circuit or gate."""


class CircuitSyntaxError(CircuitError):
    """Circuit DSL source could not be parsed."""

    def __init__(self, message: str, line: int, column: int, source_name: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.source_name = source_name
        location = f"{source_name or '<circuit>'}:{line}:{column}"
        super().__init__(f"{location}: {message}")


class CircuitValidationError(CircuitError):
    """Circuit is well-formed text but violates a circuit invariant."""


class NonUnitaryError(CircuitError):
    """Matrix expected to be unitary is not (within tolerance)."""


class ParameterRangeError(StirapError):
    """Numeric parameter outside its admissible range (s, J, M, T, ...)."""


class DimensionError(StirapError):
    """Vector or matrix of the wrong dimension."""


class DenseLimitError(StirapError):
    """Requested dense object exceeds the configured desk-scale cap."""


class SpectralError(StirapError):
    """Eigen-analysis precondition or postcondition failed."""


class GapFitError(StirapError):
    """Power-law fit of the gap scan is degenerate."""


class StepUnderflowError(StirapError):
    """Propagation would need more steps than the configured cap."""


class InvariantViolation(StirapError):
    """A checked physical invariant does not hold."""


class OutputExistsError(StirapError):
    """Refusing to overwrite an existing result file."""
