"""Exception taxonomy.

Every error carries a machine-parseable ``category`` and the CLI exit code
for that category: 2 usage, 3 schema/file, 4 numerical.
"""


class CcxlabError(Exception):
    category = "numerical"
    exit_code = 4


class UsageError(CcxlabError):
    category = "usage"
    exit_code = 2


class SchemaError(CcxlabError):
    """A file failed schema validation; message names the offending path."""

    category = "schema"
    exit_code = 3


class ParseError(SchemaError):
    def __init__(self, line_number, reason):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class CoherenceViolation(SchemaError):
    """Calibration record with t2 > 2*t1 (or otherwise unphysical times)."""


class IoError(SchemaError):
    """Report/dataset file could not be written or read."""


# -- numerical / linear-algebra domain errors (exit code 4) ------------------

class NotHermitianError(CcxlabError):
    pass


class NotPSDError(CcxlabError):
    pass


class NotUnitaryError(CcxlabError):
    pass


class DimensionMismatchError(CcxlabError):
    pass


class ZeroTraceError(CcxlabError):
    pass


class ErrTooLargeError(CcxlabError):
    pass


class InvalidCoherenceError(CcxlabError):
    pass


# -- API misuse (exit code 2 when reached from the CLI) ----------------------

class UnknownGateError(UsageError):
    pass


class TooManyQubitsError(UsageError):
    pass


class NonNativeGateError(UsageError):
    pass


class NonPathQubitsError(UsageError):
    pass


class InvalidLabelError(UsageError):
    pass


class InvalidPauliStringError(UsageError):
    pass


class KOutOfRangeError(UsageError):
    pass


class MissingSettingError(UsageError):
    pass


class MissingCellError(UsageError):
    pass


class MissingCalibrationError(UsageError):
    pass
