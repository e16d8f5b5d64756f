"""Report specification: which CSVs to read and what to draw from them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SpecError

IMAGE_FORMATS = ("png", "svg", "pdf")


@dataclass(frozen=True)
class ReportSpec:
    """What to render.

    ``group_by`` must name at least two columns: the first supplies the
    x-axis of every plot, the rest identify a series (one line per distinct
    combination). Rows sharing the full group key are treated as repeated
    runs (seeds) and averaged.
    """

    inputs: tuple[str, ...]
    group_by: tuple[str, ...]
    metrics: tuple[str, ...]
    out_dir: str
    image_format: str = "png"

    def __post_init__(self):
        if not self.inputs:
            raise SpecError("spec needs at least one input CSV")
        if len(self.group_by) < 2:
            raise SpecError("spec needs an x-axis column and at least one series column")
        if not self.metrics:
            raise SpecError("spec needs at least one metric column")
        if self.image_format not in IMAGE_FORMATS:
            raise SpecError(
                f"image_format must be one of {IMAGE_FORMATS}, got {self.image_format!r}"
            )
        overlap = set(self.group_by) & set(self.metrics)
        if overlap:
            raise SpecError(f"columns cannot be both group-by and metric: {sorted(overlap)}")

    @property
    def x_column(self) -> str:
        return self.group_by[0]

    @property
    def series_columns(self) -> tuple[str, ...]:
        return self.group_by[1:]


_KEYS = {"inputs", "group_by", "metrics", "out_dir", "image_format"}


def load_spec(path: str | Path) -> ReportSpec:
    """Parse a spec JSON file; input paths are resolved relative to it."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise SpecError("spec must be a JSON object")
    unknown = set(raw) - _KEYS
    if unknown:
        raise SpecError(f"unknown spec keys: {sorted(unknown)}")
    missing = {"inputs", "group_by", "metrics", "out_dir"} - set(raw)
    if missing:
        raise SpecError(f"spec is missing keys: {sorted(missing)}")
    for key in ("inputs", "group_by", "metrics"):
        value = raw[key]
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise SpecError(f"spec key {key!r} must be a list of strings")
    base = path.parent
    return ReportSpec(
        inputs=tuple(str((base / p).resolve()) if not Path(p).is_absolute() else p
                     for p in raw["inputs"]),
        group_by=tuple(raw["group_by"]),
        metrics=tuple(raw["metrics"]),
        out_dir=str((base / raw["out_dir"]).resolve())
        if not Path(raw["out_dir"]).is_absolute()
        else raw["out_dir"],
        image_format=raw.get("image_format", "png"),
    )
