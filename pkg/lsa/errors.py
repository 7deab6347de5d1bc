"""
Exceptions raised by the lsa package.

Reporting operations (residuals, `check_*`) never raise on a failed check,
they return a report flagged `verified: false`. The exceptions below are
reserved for malformed input.
"""


class LSAError(ValueError):
    pass


class DimensionError(LSAError):
    pass


class NotLeftSymmetricError(LSAError):
    pass


class SymmetryError(LSAError):
    pass


class SingularError(LSAError):
    pass


class ConstraintError(LSAError):
    pass


class UnknownEntryError(LSAError):
    pass


class FormatError(LSAError):
    """
    Malformed JSON input. `field` names the offending key path.
    """

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
