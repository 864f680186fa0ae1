"""Exception hierarchy.

Two families matter to callers: :class:`ConfigError` (bad parameters, exit
code 1 from the CLI) and :class:`DataError` (bad or inconsistent data,
exit code 2).
"""


class HsError(Exception):
    """Base class for every error raised by hsprune."""


class ConfigError(HsError, ValueError):
    pass


class DataError(HsError, ValueError):
    pass


class DimensionMismatch(DataError):
    pass


class ZeroAtomError(DataError):
    def __init__(self, name):
        super().__init__(f"atom {name!r} has (near) zero norm")
        self.name = name


class EmptyResultError(DataError):
    pass


class CombinatorialLimitError(ConfigError):
    pass


class MaxIterationsError(DataError):
    def __init__(self, limit):
        super().__init__(f"active-set loop exceeded {limit} iterations")
        self.limit = limit


class ConvergenceFailure(DataError):
    pass


class KOutOfRange(ConfigError):
    pass


class NonPositiveGamma(ConfigError):
    pass


class SupportTooLargeError(ConfigError):
    pass


class ZeroSignalError(DataError):
    pass


class CTooLargeError(ConfigError):
    pass


class ZeroResidualError(DataError):
    pass


# file formats

class EmptyFileError(DataError):
    pass


class UnparseableLineError(DataError):
    def __init__(self, line_no, line):
        super().__init__(f"line {line_no}: cannot parse {line!r}")
        self.line_no = line_no


class AllMissingError(DataError):
    pass


class BadMagicError(DataError):
    pass


class TruncatedFileError(DataError):
    def __init__(self, offset, needed):
        super().__init__(f"file truncated at byte {offset}: needed {needed} more bytes")
        self.offset = offset


class VersionUnsupportedError(DataError):
    pass
