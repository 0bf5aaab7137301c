"""Exception hierarchy.

Every error carries the process exit code the command-line front end uses
for it, so callers embedding the library can map failures the same way.
"""


class StateAlgebraError(Exception):
    exit_code = 1


class UsageError(StateAlgebraError, ValueError):
    """Malformed call: width mismatch, wildcard where a state is expected, ..."""

    exit_code = 2


class ModelError(StateAlgebraError, ValueError):
    """A rule-model document could not be turned into a rule system."""

    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" if column is None else f"line {line}, column {column}"
            message = f"{where}: {message}"
        super().__init__(message)


class ModelSyntaxError(ModelError):
    pass


class UndeclaredVariableError(ModelError):
    pass


class DuplicateVariableError(ModelError):
    pass


class WeightRangeError(ModelError):
    pass


class InconsistentEvidenceError(StateAlgebraError):
    """Both polarities of the target carry zero mass (the 0/0 case)."""

    exit_code = 3


class ResourceLimitError(StateAlgebraError):
    """A configured size guard would be exceeded."""

    exit_code = 4


class InconsistentModelError(StateAlgebraError):
    """Deterministic rules admit no joint model (c0 == 0)."""

    exit_code = 5
