"""
Common Custom Exceptions

Define custom exceptions for workbench errors.
"""


class PivotBenchException(Exception):
    """Base exception for all pivotbench custom exceptions."""
    pass


class ValidationError(PivotBenchException):
    """Raised when a parameter is outside its allowed range."""
    pass


class DimensionMismatch(ValidationError):
    """Raised when points of different dimension are combined."""
    pass


class MetricDomainError(ValidationError):
    """Raised when a point lies outside the domain of its metric."""
    pass


class PivotError(ValidationError):
    """Raised for duplicate, out-of-range or too many pivots."""
    pass


class DatasetFormatError(PivotBenchException):
    """Raised when a dataset or index file cannot be parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        location = ''
        if path is not None:
            location = f'{path}'
            if line is not None:
                location += f', line {line}'
            location += ': '
        super().__init__(f'{location}{message}')


class CapacityError(PivotBenchException):
    """Raised when a structure would exceed its configured size cap."""
    pass
