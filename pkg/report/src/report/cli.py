"""Command line: render figures and tables from a spec JSON."""

from __future__ import annotations

import sys

import click

from .errors import ReportError
from .render import render
from .spec import load_spec


@click.command()
@click.option(
    "--spec",
    "spec_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="JSON file naming inputs, group-by columns, metrics, and outputs.",
)
def main(spec_path: str) -> None:
    """Render line plots and a summary table from benchmark CSVs."""
    try:
        result = render(load_spec(spec_path))
    except ReportError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    for notice in result["notices"]:
        click.echo(f"notice: {notice}")
    for path in result["written"]:
        click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
