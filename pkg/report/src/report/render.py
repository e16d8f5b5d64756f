"""Rendering: line plots per metric and an aggregate summary table."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import pandas as pd

from .errors import SchemaError
from .spec import ReportSpec

# Columns of the aggregate table's row identity: every benchmark CSV carries
# the generating structure and the algorithm that produced the record.
STRUCTURE_COLUMN = "generator"
ALGORITHM_COLUMN = "algorithm"

# Format-specific save options that strip every volatile metadata field so
# identical inputs yield identical bytes.
_SAVE_METADATA = {
    "png": {"Software": None},
    "svg": {"Date": None},
    "pdf": {"CreationDate": None, "Producer": None, "Creator": None},
}


def _required_columns(spec: ReportSpec) -> list[str]:
    required = list(spec.group_by) + list(spec.metrics)
    for col in (STRUCTURE_COLUMN, ALGORITHM_COLUMN):
        if col not in required:
            required.append(col)
    return required


def load_inputs(spec: ReportSpec) -> pd.DataFrame:
    """Read and concatenate the input CSVs, validating the referenced columns."""
    required = _required_columns(spec)
    frames = []
    for path in spec.inputs:
        try:
            frame = pd.read_csv(path)
        except pd.errors.EmptyDataError:
            frame = pd.DataFrame()
        except OSError as exc:
            raise SchemaError(f"cannot read input {path}: {exc}") from exc
        for col in required:
            if col not in frame.columns:
                raise SchemaError(f"input {path} is missing column '{col}'")
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def _series_stats(frame: pd.DataFrame, x: str, metric: str) -> pd.DataFrame:
    stats = (
        frame.groupby(x, sort=True)[metric]
        .agg(["mean", "sem", "count"])
        .reset_index()
    )
    stats["sem"] = stats["sem"].fillna(0.0)  # single run: no spread to report
    return stats


def _plot_metric(
    frame: pd.DataFrame, spec: ReportSpec, metric: str, out_dir: Path
) -> Path:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    series_keys = sorted(
        frame[list(spec.series_columns)]
        .drop_duplicates()
        .itertuples(index=False, name=None)
    )
    for key in series_keys:
        mask = pd.Series(True, index=frame.index)
        for col, value in zip(spec.series_columns, key):
            mask &= frame[col] == value
        stats = _series_stats(frame[mask], spec.x_column, metric)
        counts = sorted(stats["count"].unique())
        runs = (
            f"n={counts[0]}" if len(counts) == 1 else f"n={counts[0]}-{counts[-1]}"
        )
        label = f"{', '.join(str(v) for v in key)} ({runs})"
        ax.errorbar(
            stats[spec.x_column],
            stats["mean"],
            yerr=stats["sem"],
            marker="o",
            capsize=3,
            label=label,
        )
    ax.set_xlabel(spec.x_column)
    ax.set_ylabel(metric)
    ax.set_title(f"{metric}: mean over runs, error bars ±1 standard error")
    ax.legend()
    fig.tight_layout()
    out = out_dir / f"{metric}.{spec.image_format}"
    fig.savefig(out, metadata=_SAVE_METADATA[spec.image_format])
    plt.close(fig)
    return out


def aggregate_table(frame: pd.DataFrame, spec: ReportSpec) -> pd.DataFrame:
    """Mean of every metric per structure x algorithm, plus the run count."""
    keys = [STRUCTURE_COLUMN, ALGORITHM_COLUMN]
    grouped = frame.groupby(keys, sort=True)
    table = grouped[list(spec.metrics)].mean().reset_index()
    table.insert(len(keys), "n_runs", grouped.size().values)
    return table


def render(spec: ReportSpec) -> dict:
    """Render all outputs; returns {"written": [paths], "notices": [str]}.

    Empty inputs produce the (empty) table files and a notice, no plots.
    """
    frame = load_inputs(spec)
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    notices: list[str] = []

    table = aggregate_table(frame, spec) if len(frame) else pd.DataFrame(
        columns=[STRUCTURE_COLUMN, ALGORITHM_COLUMN, "n_runs", *spec.metrics]
    )
    csv_path = out_dir / "summary.csv"
    table.to_csv(csv_path, index=False)
    written.append(csv_path)
    txt_path = out_dir / "summary.txt"
    body = table.to_string(index=False) if len(table) else "no records"
    txt_path.write_text(body + "\n")
    written.append(txt_path)

    if len(frame):
        plt.rcParams["svg.hashsalt"] = "report"
        for metric in spec.metrics:
            written.append(_plot_metric(frame, spec, metric, out_dir))
    else:
        notices.append("inputs contain no records: wrote empty table, skipped plots")
    return {"written": written, "notices": notices}
