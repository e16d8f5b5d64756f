"""Shared fixtures: the worked five-vertex example and random scenarios."""

import numpy as np
import pytest

from lmarvel.errors import ConstraintUnsatisfiable
from lmarvel.graph import ARROW, TAIL, Dag, Mag, latent_project
from lmarvel.simulate import assign_roles, gen_er_dag


def five_vertex_dag() -> Dag:
    """U -> Y, U -> W, W -> Z, W -> T, T -> Z; U will play the latent role."""
    return Dag(
        ["U", "T", "W", "Y", "Z"],
        [
            ("U", "Y", TAIL, ARROW),
            ("U", "W", TAIL, ARROW),
            ("W", "Z", TAIL, ARROW),
            ("W", "T", TAIL, ARROW),
            ("T", "Z", TAIL, ARROW),
        ],
    )


def five_vertex_mag() -> Mag:
    return latent_project(five_vertex_dag(), ["T", "W", "Y", "Z"], [])


@pytest.fixture
def example_dag() -> Dag:
    return five_vertex_dag()


@pytest.fixture
def example_mag() -> Mag:
    return five_vertex_mag()


def make_scenario(
    seed: int,
    n_range=(4, 12),
    max_latent=3,
    max_selection=2,
    require_chordal=True,
    min_observed=2,
):
    """A random (dag, observed, latent, selection) draw, deterministic in seed."""
    rng = np.random.default_rng(seed)
    for _ in range(100):
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        p = float(rng.uniform(0.15, 0.5))
        dag = gen_er_dag(n, p, int(rng.integers(0, 2**31)))
        lat_cap = min(max_latent, n - min_observed)
        lat = int(rng.integers(0, lat_cap + 1)) if lat_cap > 0 else 0
        sel_cap = min(max_selection, n - min_observed - lat)
        sel = int(rng.integers(0, sel_cap + 1)) if sel_cap > 0 else 0
        try:
            observed, latent, selection = assign_roles(
                dag, lat, sel, int(rng.integers(0, 2**31)), require_chordal
            )
        except ConstraintUnsatisfiable:
            continue
        if len(observed) >= min_observed:
            return dag, observed, latent, selection
    raise RuntimeError(f"no feasible scenario for seed {seed}")


def make_projected_mag(seed: int, **kwargs) -> Mag:
    dag, observed, _, selection = make_scenario(seed, **kwargs)
    return latent_project(dag, observed, selection)


def pytest_terminal_summary(terminalreporter):
    """Echo one criterion verdict line per acceptance check past capture."""
    try:
        from test_acceptance import REPORT_LINES
    except ImportError:  # acceptance module not collected in this run
        return
    if REPORT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in REPORT_LINES:
            terminalreporter.write_line(line)
