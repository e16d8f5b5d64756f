class ReportError(Exception):
    """Base class for reporting failures."""


class SpecError(ReportError):
    """The spec file is malformed or references missing inputs."""


class SchemaError(ReportError):
    """An input CSV lacks a column the spec references."""
