"""Exception taxonomy shared across the package.

The CLI maps these onto its exit codes: ConfigError -> 2, NetworkError and
DigestError -> 3, DataError -> 4, anything else -> 1.
"""


class FairscopeError(Exception):
    """Base class for all errors raised by fairscope."""


class ConfigError(FairscopeError):
    """Invalid configuration value; message names the offending field."""


class DataError(FairscopeError):
    """Problem with an input data file (missing, malformed, empty result)."""


class SchemaError(FairscopeError):
    """Schema document violates its invariants."""


class NetworkError(FairscopeError):
    """Download failed."""


class DigestError(FairscopeError):
    """Downloaded or cached file does not match the expected sha256."""
