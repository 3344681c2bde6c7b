"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
NumericalConsistencyError -> 3, SnapshotFormatError (and other I/O
failures) -> 4.
"""


class ConfigError(Exception):
    """Invalid configuration value, file, or incompatible run setup."""


class NumericalConsistencyError(Exception):
    """A quantity that must be real/conserved failed its runtime gate."""


class SnapshotFormatError(Exception):
    """Snapshot file is malformed, truncated, or has the wrong version."""
