"""Exception hierarchy shared by all xxcrit modules."""


class XXCritError(Exception):
    """Base class for all errors raised by xxcrit."""


class ValidationError(XXCritError):
    """Bad user input: malformed specs, out-of-range parameters, unknown names."""


class ResourceLimitError(ValidationError):
    """Request exceeds a hard resource guard (Hilbert-space dimension, r_max, ...).

    Subclass of ValidationError so callers that reject bad input wholesale
    catch these too; kept distinct so the CLI can word the message usefully.
    """


class NumericError(XXCritError):
    """A computation failed to converge or produced non-finite results."""
