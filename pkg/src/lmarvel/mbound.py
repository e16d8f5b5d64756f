"""Markov boundary discovery and maintenance.

Boundaries start from total conditioning: each pair is tested once given
everything else. After a vertex removal the affected pairs are re-tested
with one CI test each instead of recomputing from scratch.
"""

from __future__ import annotations

import itertools
from typing import Iterable, TYPE_CHECKING

from .citest import CITester

if TYPE_CHECKING:
    from .learner import SepSetStore

MbTable = dict[str, set[str]]


def tc_alpha_auto(n_vars: int) -> float:
    return 2.0 / (n_vars * n_vars)


def compute_mb_tc(
    vars: Iterable[str], tester: CITester, tc_alpha: float | None = None
) -> MbTable:
    """Total conditioning: one test per pair given all remaining variables.

    ``tc_alpha`` overrides the tester's significance level for this phase
    (None keeps the tester default; oracles ignore it).
    """
    names = sorted(set(vars))
    mb: MbTable = {v: set() for v in names}
    all_set = set(names)
    for x, y in itertools.combinations(names, 2):
        if not tester.ci(x, y, all_set - {x, y}, alpha=tc_alpha):
            mb[x].add(y)
            mb[y].add(x)
    return mb


def update_mb(
    x: str,
    adj_x: set[str],
    mb: MbTable,
    tester: CITester,
    store: "SepSetStore",
) -> MbTable:
    """Delete x from the table and re-test the pairs inside Mb(x).

    Each unordered pair (y, z) within the old Mb(x) gets a single test
    conditioned on the smaller current boundary (ties go to the lower-id
    vertex) minus {x, y, z}. Independence removes the pair from each
    other's boundaries and records the separating set. Deletions apply
    immediately, so later pairs condition on the partially updated table.
    """
    mb_x = sorted(mb.pop(x))
    for v in mb:
        mb[v].discard(x)
    for y, z in itertools.combinations(mb_x, 2):
        if z not in mb[y]:
            continue
        if len(mb[y]) < len(mb[z]) or (len(mb[y]) == len(mb[z]) and y < z):
            base = mb[y]
        else:
            base = mb[z]
        w = base - {x, y, z}
        if tester.ci(y, z, w):
            mb[y].discard(z)
            mb[z].discard(y)
            store.record_separated(y, z, w)
    return mb
