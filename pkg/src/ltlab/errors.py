"""Exception hierarchy shared across the package.

Every error carries the process exit code the CLI maps it to:
0 pass, 1 check failure, 2 usage/config, 3 I/O, 4 enumeration budget.
"""


class LtlabError(Exception):
    exit_code = 1


class SingularCurveError(LtlabError):
    """4a^3 + 27b^2 = 0: the Weierstrass model is singular."""
    exit_code = 2


class BadReductionError(LtlabError):
    """Reduction attempted at a prime dividing the discriminant."""


class RamifiedPrimeError(LtlabError):
    """Unit-group structure requested at a prime ramified in the CM order."""


class CMZeroTraceError(LtlabError):
    """r = 0 requested for a CM curve, where the constant is undefined."""


class EmptyTableError(LtlabError):
    pass


class AmbiguousOrderError(LtlabError):
    """Group order not pinned down; internal to the BSGS path, never surfaced."""


class QuadratureError(LtlabError):
    """Adaptive integration failed to reach the requested tolerance."""


class CurveConfigError(LtlabError):
    exit_code = 2


class LevelTooLargeError(LtlabError):
    """Group enumeration would exceed the element budget."""
    exit_code = 4


class TableIOError(LtlabError):
    exit_code = 3


class MissingTableError(TableIOError):
    pass


class CorruptTableError(TableIOError):
    """Magic, version, or checksum mismatch in a trace-table file."""


class TruncatedTableError(TableIOError):
    """Trace-table file ends before the advertised record count."""
