"""Exception hierarchy.

Each exception carries a stable machine-readable ``code`` and the CLI exit
status it maps to (2 for configuration problems, 3 for data problems).
"""


class PTError(ValueError):
    code = "error"
    exit_status = 2

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DimensionError(PTError):
    code = "invalid-dimension"


class DomainError(PTError):
    code = "outside-domain"


class ConfigurationError(PTError):
    code = "configuration"


class UnsupportedModelError(PTError):
    code = "unsupported-model"


class ComplexityError(PTError):
    code = "complexity-guard"


class DataError(PTError):
    code = "data"
    exit_status = 3


class InsufficientDataError(DataError):
    code = "insufficient-data"


class IngestionError(DataError):
    code = "ingestion"

    def __init__(self, message, row=None, col=None, code=None):
        super().__init__(message, code=code)
        self.row = row
        self.col = col
