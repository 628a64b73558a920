"""Errors raised by the report renderers.

The CLI maps ReportDataError (and unreadable input files) to exit code 2
and any other ReportError to exit code 1, mirroring the pipeline CLI.
"""


class ReportError(Exception):
    """Base class for all errors raised by this package."""


class ReportDataError(ReportError):
    """Missing or malformed input data; message says what and where."""
