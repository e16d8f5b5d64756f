"""Figures and summary tables from benchmark CSV records."""

from .errors import ReportError, SchemaError, SpecError
from .spec import ReportSpec, load_spec
from .render import render

__all__ = [
    "ReportError",
    "ReportSpec",
    "SchemaError",
    "SpecError",
    "load_spec",
    "render",
]
