"""Common error base class.

Every domain error raised by this package derives from QuditforgeError so
callers (notably the CLI) can distinguish domain failures from bugs.
"""


class QuditforgeError(Exception):
    """Base class for all quditforge domain errors."""
