"""Rendering, determinism, schema errors, and edge-case inputs.

The benchmark CSVs come from the `lmarvel bench` command line — the only
interface this package consumes — using the same two scenario shapes the
acceptance suite exercises (random sparse graphs and the bundled benchmark
network), at reduced repetition counts to stay fast.
"""

import importlib.resources
import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from report import ReportSpec, SchemaError, SpecError, load_spec, render
from report.cli import main

HEADER = (
    "graph_id,generator,n_obs,n_latent,n_selection,algorithm,n_ci_tests,"
    "runtime_ms,mean_cond_size,max_cond_size,precision,recall,f1,seed,status"
)
ROW = "g-0,er,10,1,0,fisherz,120,5.5,1.5,4,0.9,0.8,0.847,7,ok"


def bench_csv(tmp_path: Path, name: str, config: dict) -> Path:
    from lmarvel.cli import main as lmarvel_main

    config_path = tmp_path / f"{name}.json"
    config_path.write_text(json.dumps(config))
    out = tmp_path / f"{name}.csv"
    result = CliRunner().invoke(
        lmarvel_main, ["bench", "--config", str(config_path), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    return out


@pytest.fixture(scope="session")
def bench_csvs(tmp_path_factory) -> list[Path]:
    tmp_path = tmp_path_factory.mktemp("bench")
    insurance = str(
        importlib.resources.files("lmarvel") / "data" / "insurance.graph"
    )
    random_csv = bench_csv(
        tmp_path,
        "random",
        {
            "scenarios": [
                {
                    "generator": "er",
                    "n": 20,
                    "p": 1 / 20**0.9,
                    "latent_rate": 0.1,
                    "selection_count": 0,
                    "alpha": 0.01,
                    "seed": 0,
                    "repetitions": 3,
                    "tag": "er20",
                }
            ],
            "algorithms": ["fisherz"],
        },
    )
    benchmark_csv = bench_csv(
        tmp_path,
        "benchmark",
        {
            "scenarios": [
                {
                    "generator": "benchmark",
                    "benchmark_path": insurance,
                    "latent_count": 3,
                    "selection_count": 2,
                    "preset": "benchmark",
                    "alpha": 0.01,
                    "seed": 3,
                    "repetitions": 2,
                    "tag": "insurance",
                }
            ],
            "algorithms": ["fisherz"],
        },
    )
    return [random_csv, benchmark_csv]


def make_spec(inputs, out_dir, **overrides) -> ReportSpec:
    defaults = dict(
        inputs=tuple(str(p) for p in inputs),
        group_by=("n_obs", "algorithm"),
        metrics=("f1", "n_ci_tests", "runtime_ms"),
        out_dir=str(out_dir),
        image_format="png",
    )
    defaults.update(overrides)
    return ReportSpec(**defaults)


class TestRender:
    def test_renders_plots_and_tables(self, bench_csvs, tmp_path):
        spec = make_spec(bench_csvs, tmp_path / "out")
        result = render(spec)
        assert result["notices"] == []
        names = sorted(p.name for p in result["written"])
        assert names == [
            "f1.png",
            "n_ci_tests.png",
            "runtime_ms.png",
            "summary.csv",
            "summary.txt",
        ]
        assert all(p.exists() and p.stat().st_size > 0 for p in result["written"])
        summary = (tmp_path / "out" / "summary.csv").read_text().splitlines()
        # one aggregate row per structure x algorithm
        assert summary[0] == "generator,algorithm,n_runs," + "f1,n_ci_tests,runtime_ms"
        assert len(summary) == 3

    def test_deterministic_across_invocations(self, bench_csvs, tmp_path):
        outputs = []
        for run in ("first", "second"):
            spec_path = tmp_path / f"{run}.json"
            spec_path.write_text(
                json.dumps(
                    {
                        "inputs": [str(p) for p in bench_csvs],
                        "group_by": ["n_obs", "algorithm"],
                        "metrics": ["f1", "n_ci_tests"],
                        "out_dir": str(tmp_path / run),
                        "image_format": "png",
                    }
                )
            )
            result = CliRunner().invoke(main, ["--spec", str(spec_path)])
            assert result.exit_code == 0, result.output
            outputs.append(
                {
                    p.name: p.read_bytes()
                    for p in sorted((tmp_path / run).iterdir())
                }
            )
        assert outputs[0].keys() == outputs[1].keys()
        for name in outputs[0]:
            assert outputs[0][name] == outputs[1][name], f"{name} differs"


class TestEdgeCases:
    def test_single_row_csv(self, tmp_path):
        csv = tmp_path / "one.csv"
        csv.write_text(HEADER + "\n" + ROW + "\n")
        result = render(make_spec([csv], tmp_path / "out", metrics=("f1",)))
        assert result["notices"] == []
        summary = (tmp_path / "out" / "summary.csv").read_text().splitlines()
        assert len(summary) == 2  # header + the single group
        assert (tmp_path / "out" / "f1.png").stat().st_size > 0

    def test_empty_csv_succeeds_with_notice(self, tmp_path):
        csv = tmp_path / "empty.csv"
        csv.write_text(HEADER + "\n")
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(
            json.dumps(
                {
                    "inputs": [str(csv)],
                    "group_by": ["n_obs", "algorithm"],
                    "metrics": ["f1"],
                    "out_dir": str(tmp_path / "out"),
                }
            )
        )
        result = CliRunner().invoke(main, ["--spec", str(spec_path)])
        assert result.exit_code == 0, result.output
        assert "notice:" in result.output
        assert (tmp_path / "out" / "summary.txt").read_text() == "no records\n"
        assert not list((tmp_path / "out").glob("*.png"))

    def test_two_algorithms_two_series(self, tmp_path):
        csv = tmp_path / "two.csv"
        rows = [
            ROW,
            ROW.replace("fisherz", "oracle"),
            ROW.replace("g-0,er,10", "g-1,er,12"),
        ]
        csv.write_text(HEADER + "\n" + "\n".join(rows) + "\n")
        result = render(make_spec([csv], tmp_path / "out", metrics=("f1",)))
        summary = (tmp_path / "out" / "summary.csv").read_text().splitlines()
        assert len(summary) == 3  # er/fisherz and er/oracle


class TestErrors:
    def test_missing_column_named(self, tmp_path):
        csv = tmp_path / "bad.csv"
        csv.write_text("graph_id,generator,n_obs,algorithm\n")
        with pytest.raises(SchemaError, match="missing column 'f1'"):
            render(make_spec([csv], tmp_path / "out", metrics=("f1",)))

    def test_headerless_file_is_schema_error(self, tmp_path):
        csv = tmp_path / "blank.csv"
        csv.write_text("")
        with pytest.raises(SchemaError, match="missing column"):
            render(make_spec([csv], tmp_path / "out"))

    def test_cli_exit_code_on_schema_error(self, tmp_path):
        csv = tmp_path / "bad.csv"
        csv.write_text(HEADER.replace(",f1,", ",f_one,") + "\n")
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(
            json.dumps(
                {
                    "inputs": [str(csv)],
                    "group_by": ["n_obs", "algorithm"],
                    "metrics": ["f1"],
                    "out_dir": str(tmp_path / "out"),
                }
            )
        )
        result = CliRunner().invoke(main, ["--spec", str(spec_path)])
        assert result.exit_code == 3
        assert "missing column 'f1'" in result.output

    def test_spec_validation(self, tmp_path):
        with pytest.raises(SpecError):
            make_spec([], tmp_path)
        with pytest.raises(SpecError):
            make_spec(["a.csv"], tmp_path, group_by=("algorithm",))
        with pytest.raises(SpecError):
            make_spec(["a.csv"], tmp_path, metrics=())
        with pytest.raises(SpecError):
            make_spec(["a.csv"], tmp_path, image_format="bmp")
        with pytest.raises(SpecError):
            make_spec(["a.csv"], tmp_path, metrics=("algorithm",))

    def test_load_spec_errors(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text("[]")
        with pytest.raises(SpecError, match="JSON object"):
            load_spec(path)
        path.write_text(json.dumps({"inputs": ["a.csv"]}))
        with pytest.raises(SpecError, match="missing keys"):
            load_spec(path)
        path.write_text(
            json.dumps(
                {
                    "inputs": ["a.csv"],
                    "group_by": ["n_obs", "algorithm"],
                    "metrics": ["f1"],
                    "out_dir": "out",
                    "bogus": 1,
                }
            )
        )
        with pytest.raises(SpecError, match="unknown spec keys"):
            load_spec(path)

    def test_load_spec_resolves_relative_paths(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(
            json.dumps(
                {
                    "inputs": ["records.csv"],
                    "group_by": ["n_obs", "algorithm"],
                    "metrics": ["f1"],
                    "out_dir": "out",
                }
            )
        )
        spec = load_spec(path)
        assert spec.inputs == (str(tmp_path / "records.csv"),)
        assert spec.out_dir == str(tmp_path / "out")
