"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes (see cli.py): configuration problems
exit 2, unroutable queries exit 3, malformed input data exits 4.
"""


class PathfinderError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(PathfinderError):
    """Invalid configuration, policy, or operation parameters."""


class DataError(PathfinderError):
    """Input data (snapshot or price files) is malformed."""


class SnapshotParseError(DataError):
    """A snapshot line failed to parse; names the offending line and field."""

    def __init__(self, path, line_no, field, message):
        self.path = str(path)
        self.line_no = line_no
        self.field = field
        super().__init__(f"{path}:{line_no}: field {field!r}: {message}")


class PriceTableError(DataError):
    """Price file is malformed or contains non-positive prices."""


class NoRouteError(PathfinderError):
    """No trading path exists for the requested query."""


class UnknownTokenError(NoRouteError):
    """A query references a token absent from the graph."""


class SplitNoRouteError(NoRouteError):
    """A split part found no route; carries the parts completed so far."""

    def __init__(self, message, parts):
        self.parts = list(parts)
        super().__init__(message)


class InsolvencyError(PathfinderError):
    """A reserve update would drain a pool."""


class InternalConsistencyError(PathfinderError):
    """A replay cross-check diverged from the computed result."""


class OracleScopeError(PathfinderError):
    """A brute-force oracle was called outside its tractable size bounds."""
