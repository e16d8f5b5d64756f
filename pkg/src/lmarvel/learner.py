"""Recursive skeleton learner.

Pipeline: total-conditioning boundaries, a store of adjacency / separation
verdicts seeded from those boundaries, then repeated rounds of: sort the
live vertices by boundary size, find the first vertex whose removal
provably preserves all remaining (in)dependences, resolve its adjacencies,
remove it, and patch the boundaries of what is left.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .citest import CITester, FisherZTester
from .errors import InternalInvariantBroken, InvalidQuery
from .mbound import MbTable, compute_mb_tc, tc_alpha_auto, update_mb

logger = logging.getLogger(__name__)

ADJACENT = "adjacent"
SEPARATED = "separated"
UNKNOWN = "unknown"


class SepSetStore:
    """Per-pair verdicts: adjacent, separated (with witnesses), or unknown.

    Separated pairs keep every distinct separating set in the order found;
    the first one recorded is the one orientation consults. A pair is never
    both adjacent and separated: the first verdict wins and later
    contradictions are logged and dropped (they can only arise from
    finite-sample test errors).
    """

    def __init__(self, vars: Iterable[str]):
        self.vars = sorted(set(vars))
        self._adjacent: set[frozenset[str]] = set()
        self._sepsets: dict[frozenset[str], list[frozenset[str]]] = {}

    @staticmethod
    def _key(x: str, y: str) -> frozenset[str]:
        if x == y:
            raise InvalidQuery("pair endpoints must differ")
        return frozenset((x, y))

    def verdict(self, x: str, y: str) -> str:
        key = self._key(x, y)
        if key in self._adjacent:
            return ADJACENT
        if key in self._sepsets:
            return SEPARATED
        return UNKNOWN

    def mark_adjacent(self, x: str, y: str) -> None:
        key = self._key(x, y)
        if key in self._sepsets:
            logger.warning("pair %s already separated; keeping that verdict", set(key))
            return
        self._adjacent.add(key)

    def record_separated(self, x: str, y: str, sepset: Iterable[str]) -> None:
        key = self._key(x, y)
        witness = frozenset(sepset)
        if witness & key:
            raise InvalidQuery("separating set must be disjoint from the pair")
        if key in self._adjacent:
            logger.warning("pair %s already adjacent; keeping that verdict", set(key))
            return
        sets = self._sepsets.setdefault(key, [])
        if witness not in sets:
            sets.append(witness)

    def sepsets(self, x: str, y: str) -> list[frozenset[str]]:
        return list(self._sepsets.get(self._key(x, y), []))

    def first_sepset(self, x: str, y: str) -> frozenset[str]:
        sets = self._sepsets.get(self._key(x, y))
        if not sets:
            raise InvalidQuery(f"pair ({x}, {y}) has no recorded separating set")
        return sets[0]

    def adjacent_pairs(self) -> list[tuple[str, str]]:
        return sorted(tuple(sorted(key)) for key in self._adjacent)

    def unknown_pairs(self) -> list[tuple[str, str]]:
        out = []
        for x, y in itertools.combinations(self.vars, 2):
            if self.verdict(x, y) == UNKNOWN:
                out.append((x, y))
        return out


@dataclass
class IterationRecord:
    live: tuple[str, ...]
    processed: list[tuple[str, int]]  # (vertex, |Mb| at processing time)
    removed: str
    removed_mb_size: int
    tests_after: int
    fallback: bool = False


@dataclass
class LearnTrace:
    """Removal order plus per-iteration counters for auditing the run."""

    vars: tuple[str, ...]
    removal_order: list[str] = field(default_factory=list)
    iterations: list[IterationRecord] = field(default_factory=list)
    tc_tests: int = 0
    total_tests: int = 0
    fallback_count: int = 0


def initialize_store(vars: Iterable[str], mb: MbTable) -> SepSetStore:
    """Seed the store: pairs outside each other's boundary are separated.

    The recorded witness is the smaller boundary minus the other vertex
    (tie: the boundary of the lower-id vertex).
    """
    store = SepSetStore(vars)
    for x, y in itertools.combinations(store.vars, 2):
        if y in mb[x]:
            continue
        if len(mb[x]) <= len(mb[y]):
            store.record_separated(x, y, mb[x] - {y})
        else:
            store.record_separated(x, y, mb[y] - {x})
    return store


def _subsets_ascending(pool: Sequence[str]):
    pool = sorted(pool)
    for size in range(len(pool) + 1):
        yield from itertools.combinations(pool, size)


def find_adjacent(
    x: str, mb_x: set[str], tester: CITester, store: SepSetStore
) -> set[str]:
    """Resolve x against each boundary member; return the adjacent ones.

    Unresolved pairs search every subset of mb_x minus the candidate,
    ascending in size then lexicographic; the first independence settles
    the pair as separated, exhaustion settles it as adjacent.
    """
    adjacent: set[str] = set()
    for y in sorted(mb_x):
        verdict = store.verdict(x, y)
        if verdict == ADJACENT:
            adjacent.add(y)
            continue
        if verdict == SEPARATED:
            continue
        for w in _subsets_ascending(mb_x - {y}):
            if tester.ci(x, y, w):
                store.record_separated(x, y, w)
                break
        else:
            store.mark_adjacent(x, y)
            adjacent.add(y)
    return adjacent


def is_removable_ci(
    x: str,
    mb_x: set[str],
    adj_x: set[str],
    tester: CITester,
    store: SepSetStore,
) -> bool:
    """CI-based removability of x given its boundary and adjacency set.

    For every pair (y, z) with y adjacent to x and z in the boundary, one
    of two conditions must hold: some subset of mb_x minus the pair
    separates y from z (checked first, consulting the store), or no such
    subset augmented with x does. Any independence found along the way is
    recorded in the store. Pairs the store already resolves are settled
    without tests: a recorded separating set inside the candidate pool
    witnesses the first condition, and an adjacency verdict settles the
    pair outright, since adjacent vertices can never be separated.
    """
    if not adj_x <= mb_x:
        raise InvalidQuery("adjacency set must lie within the Markov boundary")
    seen: set[frozenset[str]] = set()
    for y in sorted(adj_x):
        for z in sorted(mb_x - {y}):
            pair = frozenset((y, z))
            if pair in seen:
                continue
            seen.add(pair)
            rest = mb_x - {y, z}

            verdict = store.verdict(y, z)
            if verdict == ADJACENT:
                continue  # no set can separate the pair: condition 2 holds
            if verdict == SEPARATED and any(
                s <= rest for s in store.sepsets(y, z)
            ):
                continue  # condition 1 holds from the store
            cond1 = False
            for w in _subsets_ascending(rest):
                if tester.ci(y, z, w):
                    store.record_separated(y, z, w)
                    cond1 = True
                    break
            if cond1:
                continue

            cond2 = True
            for w in _subsets_ascending(rest):
                if tester.ci(y, z, set(w) | {x}):
                    store.record_separated(y, z, set(w) | {x})
                    cond2 = False
                    break
            if not cond2:
                return False
    return True


def lmarvel_learn(
    vars: Iterable[str],
    tester: CITester,
    tc_alpha: float | str | None = "auto",
    strict: bool = False,
) -> tuple[SepSetStore, LearnTrace]:
    """Full skeleton learning run; returns the verdict store and its trace.

    ``tc_alpha`` applies only to the total-conditioning phase ("auto" means
    2/n^2; None keeps the tester default). With ``strict`` set, a round in
    which no vertex tests removable raises InternalInvariantBroken; the
    default instead removes the smallest-boundary vertex with a warning
    (possible only under finite-sample errors or a non-chordal case).
    """
    names = sorted(set(vars))
    if not names:
        raise InvalidQuery("need at least one variable")
    if tc_alpha == "auto":
        tc_alpha = tc_alpha_auto(len(names))

    mb = compute_mb_tc(names, tester, tc_alpha)
    store = initialize_store(names, mb)
    trace = LearnTrace(vars=tuple(names))
    trace.tc_tests = tester.stats().total_tests

    live = list(names)
    while len(live) > 1:
        order = sorted(live, key=lambda v: (len(mb[v]), v))
        processed: list[tuple[str, int]] = []
        removed = None
        for x in order:
            processed.append((x, len(mb[x])))
            adj_x = find_adjacent(x, mb[x], tester, store)
            if is_removable_ci(x, mb[x], adj_x, tester, store):
                removed = x
                break
        fallback = removed is None
        if fallback:
            if strict:
                raise InternalInvariantBroken(
                    "no removable vertex found in a full scan"
                )
            removed = order[0]
            trace.fallback_count += 1
            logger.warning(
                "no vertex tested removable; falling back to %s", removed
            )
        adj_removed = find_adjacent(removed, mb[removed], tester, store)
        mb_size = len(mb[removed])
        mb = update_mb(removed, adj_removed, mb, tester, store)
        live.remove(removed)
        trace.removal_order.append(removed)
        trace.iterations.append(
            IterationRecord(
                live=tuple(sorted(live + [removed])),
                processed=processed,
                removed=removed,
                removed_mb_size=mb_size,
                tests_after=tester.stats().total_tests,
                fallback=fallback,
            )
        )

    last = live[0]
    find_adjacent(last, mb[last], tester, store)
    trace.removal_order.append(last)
    trace.total_tests = tester.stats().total_tests
    for x, y in store.unknown_pairs():  # pragma: no cover - defensive
        raise InternalInvariantBroken(f"pair ({x}, {y}) left unresolved")
    return store, trace


class LMarvel(BaseEstimator):
    """Causal-structure estimator over observational data.

    fit(X) runs the Fisher-Z learning pipeline and exposes:

    - ``pag_``: the oriented partial ancestral graph;
    - ``sepsets_``: the adjacency / separating-set store;
    - ``trace_``: removal order and counters;
    - ``ci_stats_``: CI test counters.
    """

    def __init__(
        self,
        alpha: float = 0.01,
        tc_alpha: float | str = "auto",
        strict: bool = False,
    ):
        self.alpha = alpha
        self.tc_alpha = tc_alpha
        self.strict = strict

    def fit(self, X, y=None, columns: Sequence[str] | None = None):
        if columns is None and hasattr(X, "columns"):
            columns = [str(c) for c in X.columns]
        X = check_array(X, dtype=float, ensure_min_samples=5)
        if columns is None:
            columns = [f"X{i}" for i in range(X.shape[1])]
        if len(columns) != X.shape[1]:
            raise InvalidQuery("column labels do not match the data width")
        self.n_features_in_ = X.shape[1]
        self.feature_names_in_ = np.asarray(columns, dtype=object)
        tester = FisherZTester(X, columns, alpha=self.alpha)
        self.sepsets_, self.trace_ = lmarvel_learn(
            columns, tester, tc_alpha=self.tc_alpha, strict=self.strict
        )
        from .orient import orient_pag

        self.pag_ = orient_pag(self.sepsets_, columns)
        self.ci_stats_ = tester.stats()
        return self

    def predict(self, X=None):
        """The learned PAG (structure estimation has no per-sample output)."""
        check_is_fitted(self, "pag_")
        return self.pag_
