"""Exception types shared across the package.

The split into usage / file-format / data-invariant errors mirrors the CLI
exit-code table (1 / 2 / 3).
"""


class MemBankError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(MemBankError):
    """Invalid parameters or flag combinations, detected before any I/O."""


class FileFormatError(MemBankError):
    """Unreadable, corrupt, or wrong-version file content."""


class DataInvariantError(MemBankError):
    """Data violates a documented contract (dimensions, modes, emptiness)."""
