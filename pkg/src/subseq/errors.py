"""Exception types and the shared resource budget."""

import os

DEFAULT_RESOURCE_CAP = 2_000_000


class SubseqError(Exception):
    """Base class for all errors raised by this package."""


class AlphabetMismatchError(SubseqError, ValueError):
    pass


class ParseError(SubseqError, ValueError):
    pass


class ResourceError(SubseqError, RuntimeError):
    """A construction or search exceeded its configured budget."""


class UnsupportedModelError(SubseqError, ValueError):
    pass


def resource_cap() -> int:
    """Budget for states/words, overridable through SUBSEQ_RESOURCE_CAP."""
    raw = os.environ.get("SUBSEQ_RESOURCE_CAP")
    if raw is None or raw.strip() == "":
        return DEFAULT_RESOURCE_CAP
    try:
        value = int(raw)
    except ValueError:
        raise SubseqError(f"SUBSEQ_RESOURCE_CAP must be a natural number, got {raw!r}")
    if value < 0:
        raise SubseqError(f"SUBSEQ_RESOURCE_CAP must be a natural number, got {raw!r}")
    return value
