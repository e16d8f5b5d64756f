"""Recursive causal structure learning with latent confounders and
selection bias: maximal ancestral graphs, removability-driven recursion,
and complete PAG orientation."""

from .citest import CIStats, FisherZTester, OracleTester
from .graph import Dag, Mag, MixedGraph, Pag, latent_project
from .io import format_graph, load_dag, load_mag, load_pag, parse_graph, save_graph
from .learner import LMarvel, SepSetStore, lmarvel_learn
from .orient import orient_pag, pag_invariant_marks_consistent
from .removability import (
    find_removable,
    is_removable_by_definition,
    is_removable_graphical,
)
from .simulate import (
    LinearSem,
    ScenarioConfig,
    assign_roles,
    gen_bounded_parent_dag,
    gen_er_dag,
    load_benchmark,
    sample,
)

__all__ = [
    "CIStats",
    "Dag",
    "FisherZTester",
    "LMarvel",
    "LinearSem",
    "Mag",
    "MixedGraph",
    "OracleTester",
    "Pag",
    "ScenarioConfig",
    "SepSetStore",
    "assign_roles",
    "find_removable",
    "format_graph",
    "gen_bounded_parent_dag",
    "gen_er_dag",
    "is_removable_by_definition",
    "is_removable_graphical",
    "latent_project",
    "lmarvel_learn",
    "load_benchmark",
    "load_dag",
    "load_mag",
    "load_pag",
    "orient_pag",
    "pag_invariant_marks_consistent",
    "parse_graph",
    "sample",
    "save_graph",
]

__version__ = "0.1.0"
