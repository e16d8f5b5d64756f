"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data or graph error, 4 internal
invariant violation.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import bench as bench_mod
from .citest import FisherZTester, OracleTester, load_dataset, save_dataset
from .errors import InternalInvariantBroken, LmarvelError
from .graph import Dag, latent_project
from .io import format_graph, load_dag, load_mag, save_graph
from .learner import lmarvel_learn
from .orient import orient_pag
from .removability import is_removable_graphical
from .simulate import ScenarioConfig, instantiate, scenario_data

EXIT_DATA_ERROR = 3
EXIT_INTERNAL_ERROR = 4


def _handle_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except InternalInvariantBroken as exc:
            click.echo(f"internal invariant violation: {exc}", err=True)
            sys.exit(EXIT_INTERNAL_ERROR)
        except (LmarvelError, OSError, json.JSONDecodeError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_DATA_ERROR)

    return wrapper


def _name_list(raw: str) -> list[str]:
    return [part for part in (p.strip() for p in raw.split(",")) if part]


def _parse_tc_alpha(raw: str):
    if raw == "auto":
        return "auto"
    try:
        return float(raw)
    except ValueError:
        raise click.BadParameter("--tc-alpha must be a real number or 'auto'")


@click.group()
def main():
    """Causal structure learning under latent confounding and selection."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@_handle_errors
def simulate(config_path: str, out_dir: str):
    """Emit ground-truth graphs and datasets for a scenario config."""
    raw = json.loads(Path(config_path).read_text())
    scenarios = raw["scenarios"] if isinstance(raw, dict) and "scenarios" in raw else [raw]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for idx, raw_scenario in enumerate(scenarios):
        config = ScenarioConfig.from_dict(raw_scenario)
        tag = config.tag or f"{config.generator}{idx}"
        for rep in range(config.repetitions):
            scenario = instantiate(config, rep)
            stem = f"{tag}_rep{rep}"
            save_graph(scenario.dag, out / f"{stem}.dag.graph")
            save_graph(scenario.mag, out / f"{stem}.mag.graph")
            (out / f"{stem}.roles.json").write_text(
                json.dumps(
                    {
                        "observed": list(scenario.observed),
                        "latent": list(scenario.latent),
                        "selection": list(scenario.selection),
                    },
                    indent=2,
                )
                + "\n"
            )
            data, columns = scenario_data(scenario)
            save_dataset(data, columns, out / f"{stem}.csv")
            click.echo(f"wrote {stem} ({len(data)} rows)")


@main.command()
@click.option("--dag", "dag_path", required=True, type=click.Path(exists=True))
@click.option("--observed", required=True, help="comma-separated vertex names")
@click.option("--selection", default="", help="comma-separated vertex names")
@click.option("--out", "out_path", required=True, type=click.Path())
@_handle_errors
def project(dag_path: str, observed: str, selection: str, out_path: str):
    """Latent projection of a DAG onto observed variables given selection."""
    dag = load_dag(dag_path)
    mag = latent_project(dag, _name_list(observed), _name_list(selection))
    save_graph(mag, out_path)
    click.echo(f"wrote {out_path} ({mag.n_edges()} edges)")


@main.command()
@click.option("--data", "data_path", required=True, type=click.Path(exists=True))
@click.option("--alpha", default=0.01, type=float, show_default=True)
@click.option("--tc-alpha", default="auto", show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--trace", "trace_path", type=click.Path())
@_handle_errors
def learn(data_path: str, alpha: float, tc_alpha: str, out_path: str, trace_path: str | None):
    """Learn a PAG from a CSV dataset with the Fisher-Z test."""
    data, columns = load_dataset(data_path)
    tester = FisherZTester(data, columns, alpha=alpha)
    store, trace = lmarvel_learn(columns, tester, tc_alpha=_parse_tc_alpha(tc_alpha))
    pag = orient_pag(store, columns)
    save_graph(pag, out_path)
    stats = tester.stats()
    if trace_path:
        Path(trace_path).write_text(
            json.dumps(
                {
                    "removal_order": trace.removal_order,
                    "tc_tests": trace.tc_tests,
                    "total_tests": trace.total_tests,
                    "fallback_count": trace.fallback_count,
                    "mean_cond_size": stats.mean_cond_size,
                    "max_cond_size": stats.max_cond_size,
                    "iterations": [
                        {
                            "removed": it.removed,
                            "removed_mb_size": it.removed_mb_size,
                            "processed": it.processed,
                            "tests_after": it.tests_after,
                            "fallback": it.fallback,
                        }
                        for it in trace.iterations
                    ],
                },
                indent=2,
            )
            + "\n"
        )
    click.echo(f"wrote {out_path} ({stats.total_tests} CI tests)")


@main.command("oracle-learn")
@click.option("--dag", "dag_path", required=True, type=click.Path(exists=True))
@click.option("--latent", default="", help="comma-separated vertex names")
@click.option("--selection", default="", help="comma-separated vertex names")
@click.option("--out", "out_path", required=True, type=click.Path())
@_handle_errors
def oracle_learn(dag_path: str, latent: str, selection: str, out_path: str):
    """Learn a PAG with exact independence information from a DAG."""
    dag = load_dag(dag_path)
    latent_set = _name_list(latent)
    selection_set = _name_list(selection)
    observed = [
        v for v in dag.vertices if v not in set(latent_set) | set(selection_set)
    ]
    mag = latent_project(dag, observed, selection_set)
    tester = OracleTester(mag)
    store, _ = lmarvel_learn(observed, tester, strict=True)
    pag = orient_pag(store, observed)
    save_graph(pag, out_path)
    click.echo(f"wrote {out_path} ({tester.stats().total_tests} CI tests)")


@main.command("bench")
@click.option("--config", "config_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--workers", default=1, type=int, show_default=True)
@_handle_errors
def bench(config_path: str, out_path: str, workers: int):
    """Run an experiment grid and write one CSV record per cell."""
    config = json.loads(Path(config_path).read_text())
    records = bench_mod.run_grid(config, workers=workers)
    bench_mod.write_records(records, out_path)
    click.echo(f"wrote {out_path} ({len(records)} records)")


@main.command("removable")
@click.option("--mag", "mag_path", required=True, type=click.Path(exists=True))
@click.option("--vertex", required=True)
@_handle_errors
def removable(mag_path: str, vertex: str):
    """Report whether a vertex of a MAG is removable, with a witness."""
    mag = load_mag(mag_path)
    verdict = is_removable_graphical(mag, vertex)
    if verdict.removable:
        click.echo(f"{vertex}: removable")
    else:
        kind, *rest = verdict.witness
        click.echo(f"{vertex}: not removable ({kind} witness: {rest})")


if __name__ == "__main__":
    main()
