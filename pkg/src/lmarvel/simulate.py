"""Ground-truth generation.

Random DAGs, latent/selection role assignment, linear-Gaussian structural
equation models, and selection conditioning by rejection sampling. Every
generator is a pure function of (parameters, seed).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConstraintUnsatisfiable, InvalidQuery, SelectionTooRestrictive
from .graph import ARROW, TAIL, Dag, Mag, latent_project
from .io import load_dag

_ROLE_RETRY_CAP = 500
_REJECTION_FLOOR = 2.0**-20


def child_seed(seed: int, index: int) -> np.random.SeedSequence:
    """Seed-splitting rule for independent per-scenario streams."""
    return np.random.SeedSequence((seed, index))


def _vertex_names(n: int) -> list[str]:
    width = max(2, len(str(max(n - 1, 0))))
    return [f"V{i:0{width}d}" for i in range(n)]


def gen_er_dag(n_tilde: int, p: float, seed) -> Dag:
    """Erdos-Renyi DAG: each pair kept with probability p, oriented along a
    random topological permutation."""
    if not 0.0 <= p <= 1.0:
        raise InvalidQuery("edge probability must lie in [0, 1]")
    names = _vertex_names(n_tilde)
    rng = np.random.default_rng(seed)
    position = {names[v]: k for k, v in enumerate(rng.permutation(n_tilde))}
    edges = []
    for u, v in itertools.combinations(names, 2):
        if rng.random() < p:
            a, b = (u, v) if position[u] < position[v] else (v, u)
            edges.append((a, b, TAIL, ARROW))
    return Dag(names, edges)


def gen_bounded_parent_dag(n: int, max_in: int, seed) -> Dag:
    """Random DAG where each vertex draws its parent count uniformly from
    {0..min(max_in, #predecessors)} along a random permutation."""
    if max_in < 0:
        raise InvalidQuery("max_in must be nonnegative")
    names = _vertex_names(n)
    rng = np.random.default_rng(seed)
    order = [names[v] for v in rng.permutation(n)]
    edges = []
    for k, v in enumerate(order):
        count = int(rng.integers(0, min(max_in, k) + 1))
        if count:
            parents = rng.choice(order[:k], size=count, replace=False)
            edges.extend((str(u), v, TAIL, ARROW) for u in parents)
    return Dag(names, edges)


def assign_roles(
    dag: Dag,
    latent_count: int,
    selection_count: int,
    seed,
    require_chordal: bool = True,
) -> tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]:
    """Uniform random disjoint (observed, latent, selection) roles.

    With ``require_chordal`` set, assignments whose projected MAG has a
    non-chordal undirected part are rejected and redrawn, up to a cap.
    """
    n = len(dag)
    hidden = latent_count + selection_count
    if latent_count < 0 or selection_count < 0 or hidden > n - 1:
        raise ConstraintUnsatisfiable(
            f"cannot hide {hidden} of {n} vertices and keep observations"
        )
    rng = np.random.default_rng(seed)
    names = list(dag.vertices)
    for _ in range(_ROLE_RETRY_CAP):
        drawn = [str(v) for v in rng.choice(names, size=hidden, replace=False)]
        latent = tuple(sorted(drawn[:latent_count]))
        selection = tuple(sorted(drawn[latent_count:]))
        observed = tuple(sorted(set(names) - set(drawn)))
        if require_chordal:
            mag = latent_project(dag, observed, selection)
            if not mag.undirected_part_chordal():
                continue
        return observed, latent, selection
    raise ConstraintUnsatisfiable(
        f"no chordal role assignment found in {_ROLE_RETRY_CAP} draws"
    )


@dataclass(frozen=True)
class Preset:
    """Coefficient magnitude range (sign drawn uniformly) and noise sd range."""

    coef_range: tuple[float, float]
    noise_sd_range: tuple[float, float]


PRESETS: dict[str, Preset] = {
    "random": Preset((0.5, 2.0), (1.0, math.sqrt(3.0))),
    "benchmark": Preset((0.5, 1.0), (math.sqrt(0.5), 1.0)),
    "appendix": Preset((1.0, 1.5), (1.0, math.sqrt(2.0))),
}


@dataclass(frozen=True)
class LinearSem:
    """Linear-Gaussian structural equation model over a DAG."""

    dag: Dag
    coefficients: dict[tuple[str, str], float]  # (parent, child) -> weight
    noise_sd: dict[str, float]

    def __post_init__(self):
        for (u, v), _ in self.coefficients.items():
            marks = self.dag.edge_marks(u, v)
            if marks != (TAIL, ARROW):
                raise InvalidQuery(f"coefficient on a non-edge ({u}, {v})")
        if set(self.noise_sd) != set(self.dag.vertices):
            raise InvalidQuery("noise scales must cover every vertex")
        if any(sd <= 0 for sd in self.noise_sd.values()):
            raise InvalidQuery("noise scales must be positive")

    @classmethod
    def random(cls, dag: Dag, preset: Preset | str, seed) -> "LinearSem":
        if isinstance(preset, str):
            preset = PRESETS[preset]
        rng = np.random.default_rng(seed)
        lo, hi = preset.coef_range
        coefficients = {}
        for u, v, _, _ in dag.edges():
            parent, child = (u, v) if v in dag.children(u) else (v, u)
            magnitude = rng.uniform(lo, hi)
            sign = 1.0 if rng.random() < 0.5 else -1.0
            coefficients[(parent, child)] = sign * magnitude
        slo, shi = preset.noise_sd_range
        noise_sd = {v: float(rng.uniform(slo, shi)) for v in dag.vertices}
        return cls(dag, coefficients, noise_sd)


def sample(
    sem: LinearSem,
    observed: Iterable[str],
    latent: Iterable[str],
    selection: Iterable[str],
    n_samples: int,
    seed,
    selection_policy: Callable[[np.ndarray], np.ndarray] | None = None,
) -> tuple[np.ndarray, list[str]]:
    """Draw n_samples rows of the observed columns conditioned on selection.

    Selection is rejection sampling: a joint sample is kept iff the policy
    accepts every selection column (default: value above its mean, zero).
    """
    if n_samples < 1:
        raise InvalidQuery("need at least one sample")
    observed = sorted(observed)
    selection = sorted(selection)
    roles = set(observed) | set(latent) | set(selection)
    if roles != set(sem.dag.vertices):
        raise InvalidQuery("roles must partition the model's vertices")
    if selection_policy is None:
        selection_policy = lambda col: col > 0.0

    order = sem.dag.topological_order()
    col = {v: i for i, v in enumerate(sem.dag.vertices)}
    rng = np.random.default_rng(seed)
    kept: list[np.ndarray] = []
    accepted = 0
    attempted = 0
    batch = max(n_samples, 1024)
    while accepted < n_samples:
        x = np.empty((batch, len(col)))
        for v in order:
            noise = rng.normal(0.0, sem.noise_sd[v], size=batch)
            total = noise
            for u in sem.dag.parents(v):
                total = total + sem.coefficients[(u, v)] * x[:, col[u]]
            x[:, col[v]] = total
        keep = np.ones(batch, dtype=bool)
        for s in selection:
            keep &= selection_policy(x[:, col[s]])
        accepted_rows = x[keep]
        kept.append(accepted_rows)
        accepted += len(accepted_rows)
        attempted += batch
        if attempted > (accepted + 1) / _REJECTION_FLOOR:
            raise SelectionTooRestrictive(
                f"accepted {accepted} of {attempted} joint samples"
            )
    data = np.concatenate(kept, axis=0)[:n_samples]
    return data[:, [col[v] for v in observed]], list(observed)


def load_benchmark(path: str | Path) -> Dag:
    """A benchmark structure in the graph text format, validated as a DAG."""
    return load_dag(path)


@dataclass(frozen=True)
class ScenarioConfig:
    """One cell of an experiment grid (before seeding repetitions)."""

    generator: str  # "er", "bounded", or "benchmark"
    n: int = 0
    p: float = 0.0
    max_in: int = 0
    benchmark_path: str | None = None
    latent_count: int | None = None
    selection_count: int | None = None
    latent_rate: float = 0.0
    selection_rate: float = 0.0
    preset: str = "random"
    samples_per_observed: int = 50
    alpha: float = 0.01
    tc_alpha: float | str = "auto"
    seed: int = 0
    repetitions: int = 1
    tag: str = ""

    def __post_init__(self):
        if self.generator not in ("er", "bounded", "benchmark"):
            raise InvalidQuery(f"unknown generator {self.generator!r}")
        if self.generator == "benchmark" and not self.benchmark_path:
            raise InvalidQuery("benchmark generator needs benchmark_path")
        for rate in (self.latent_rate, self.selection_rate):
            if not 0.0 <= rate <= 1.0:
                raise InvalidQuery("rates must lie in [0, 1]")
        if self.preset not in PRESETS:
            raise InvalidQuery(f"unknown preset {self.preset!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> "ScenarioConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise InvalidQuery(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def make_dag(self, seed) -> Dag:
        if self.generator == "er":
            return gen_er_dag(self.n, self.p, seed)
        if self.generator == "bounded":
            return gen_bounded_parent_dag(self.n, self.max_in, seed)
        return load_benchmark(self.benchmark_path)

    def role_counts(self, n: int) -> tuple[int, int]:
        latent = (
            self.latent_count
            if self.latent_count is not None
            else int(round(self.latent_rate * n))
        )
        sel = (
            self.selection_count
            if self.selection_count is not None
            else int(round(self.selection_rate * n))
        )
        return latent, sel


@dataclass(frozen=True)
class Scenario:
    """A fully instantiated draw: ground truth, roles, model, data seed."""

    config: ScenarioConfig
    repetition: int
    dag: Dag = field(compare=False)
    observed: tuple[str, ...]
    latent: tuple[str, ...]
    selection: tuple[str, ...]

    @property
    def mag(self) -> Mag:
        return latent_project(self.dag, self.observed, self.selection)


def instantiate(config: ScenarioConfig, repetition: int) -> Scenario:
    """Deterministically expand one repetition of a scenario config."""
    root = child_seed(config.seed, repetition)
    dag_seed, role_seed = root.spawn(2)
    dag = config.make_dag(dag_seed)
    latent_count, selection_count = config.role_counts(len(dag))
    observed, latent, selection = assign_roles(
        dag, latent_count, selection_count, role_seed
    )
    return Scenario(config, repetition, dag, observed, latent, selection)


def scenario_data(scenario: Scenario) -> tuple[np.ndarray, list[str]]:
    """Sample the scenario's dataset (size 50 per observed variable by
    default, per samples_per_observed)."""
    root = child_seed(scenario.config.seed, scenario.repetition)
    _, _, sem_seed, data_seed = root.spawn(4)
    sem = LinearSem.random(scenario.dag, scenario.config.preset, sem_seed)
    n_samples = scenario.config.samples_per_observed * len(scenario.observed)
    return sample(
        sem,
        scenario.observed,
        scenario.latent,
        scenario.selection,
        n_samples,
        data_seed,
    )
