"""Exception types shared across the package.

The CLI maps these onto exit codes, so each one names a failure class rather
than a module.
"""


class DomainError(ValueError):
    """Argument outside the mathematical domain (pole, even modulus, ...)."""


class RangeError(ValueError):
    """Input exceeds a configured guard (norm cap, prime coverage, memory cap)."""


class NumericError(ArithmeticError):
    """A numerical method failed to converge or lost its accuracy guarantee."""


class TruncationError(NumericError):
    """A coefficient table is too short for the requested evaluation.

    ``required`` carries the table length that would have sufficed.
    """

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


class VerificationError(AssertionError):
    """A runtime self-check failed; points at an upstream bug."""
