"""Exception hierarchy.

InputError covers anything a user can cause (bad files, bad flags,
unavailable codecs); the CLI maps it to exit code 1. InternalError marks
broken internal invariants (e.g. a window k-mer missing from the dictionary
it was built from) and maps to exit code 2.
"""


class GdcError(Exception):
    """Base class for user-facing errors."""


class InputError(GdcError):
    """Malformed or invalid user input."""


class CodecUnavailableError(GdcError):
    """Requested codec is not registered or its external tool is missing."""


class ArchiveError(GdcError):
    """Archive on disk is malformed or fails verification."""


class InternalError(Exception):
    """A 'cannot happen' condition; signals a bug, not bad input."""
