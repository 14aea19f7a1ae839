"""Errors raised by the figure pipeline."""


class ParseError(ValueError):
    """A log file is missing or malformed; messages carry line context."""


class RequestError(ValueError):
    """A figure request is inconsistent with the log it points at."""
