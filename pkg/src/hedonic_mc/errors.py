"""Exception hierarchy.

Every error carries a short ``category`` string; the CLI prints it as the
one-line prefix of its error message.
"""


class HedonicError(Exception):
    category = "error"


class InvalidPlayerError(HedonicError, ValueError):
    category = "invalid-player"


class OutOfRangeError(HedonicError, ValueError):
    category = "out-of-range"


class NotAMemberError(HedonicError, ValueError):
    category = "not-a-member"


class CoalitionIndexError(HedonicError, IndexError):
    category = "index-error"


class InvalidPartitionError(HedonicError, ValueError):
    category = "invalid-partition"


class ValidationError(HedonicError, ValueError):
    category = "validation"


class InfeasibleEnumerationError(HedonicError, ValueError):
    category = "infeasible-enumeration"


class InsufficientDataError(HedonicError, ValueError):
    category = "insufficient-data"


class NoFitError(HedonicError, ValueError):
    category = "no-fit"


class ConvergenceError(HedonicError, RuntimeError):
    category = "convergence"

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class ComparisonError(HedonicError, ValueError):
    category = "comparison"


class ResumeError(HedonicError):
    category = "resume"
