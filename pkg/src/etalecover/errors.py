"""Exception hierarchy shared by all modules."""


class EtaleCoverError(Exception):
    """Base class for all library errors."""


class NotPrime(EtaleCoverError):
    pass


class NoEmbedding(EtaleCoverError):
    pass


class NotHomogeneous(EtaleCoverError):
    pass


class ZeroInput(EtaleCoverError):
    pass


class DegenerateInput(EtaleCoverError):
    pass


class ResourceBudgetExceeded(EtaleCoverError):
    pass


class BudgetExceeded(EtaleCoverError):
    pass


class DegreeCapExceeded(EtaleCoverError):
    pass


class PointOnDivisor(EtaleCoverError):
    pass


class NotTransverse(EtaleCoverError):
    pass


class ComponentCollapse(EtaleCoverError):
    pass


class ComponentCoverageFailed(EtaleCoverError):
    pass


class UnsupportedRequiresBlowup(EtaleCoverError):
    pass


class DegreeMismatch(EtaleCoverError):
    pass


class OracleViolation(EtaleCoverError):
    pass


class ParseError(EtaleCoverError):
    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}: {message}" if column is None else \
                f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(EtaleCoverError):
    pass
