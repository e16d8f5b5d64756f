"""Removable vertices of a MAG.

A vertex is removable when deleting it changes no m-separation statement
among the remaining vertices. Three equivalent characterizations live here:
the definitional brute force (small graphs only), the graphical two-condition
check, and — in :mod:`lmarvel.learner` — the CI-based test used during
learning. The first two serve as oracles for each other and for the learner.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import ChordalityViolated, InternalInvariantBroken, OracleSizeExceeded
from .graph import ARROW, BRUTE_FORCE_MAX_VERTICES, Mag


@dataclass(frozen=True)
class RemovabilityVerdict:
    """Outcome of the graphical removability check, with a counterexample."""

    removable: bool
    # condition 1: ("adjacency", y, z) — y in Adj(x), z in Ch(x)|N(x), y-z missing
    # condition 2: ("collider_path", path, z) — path colliders are parents of z,
    #   endpoint not adjacent to z
    witness: tuple | None = None

    def __post_init__(self):
        if self.removable == (self.witness is not None):
            raise ValueError("witness must be present exactly when not removable")


def is_removable_by_definition(g: Mag, x: str) -> bool:
    """Brute-force removability: compare all m-separations with and without x."""
    if len(g) > BRUTE_FORCE_MAX_VERTICES:
        raise OracleSizeExceeded(
            f"definitional check limited to {BRUTE_FORCE_MAX_VERTICES} vertices"
        )
    g.index(x)
    rest = [v for v in g.vertices if v != x]
    h = g.induced_subgraph(rest)
    for r in range(len(rest)):
        for z in itertools.combinations(rest, r):
            z_set = set(z)
            free = [v for v in rest if v not in z_set]
            for y in free:
                conn_g = g.m_connected_from(y, z_set)
                conn_h = h.m_connected_from(y, z_set)
                if (conn_g & set(free)) != (conn_h & set(free)):
                    return False
    return True


def is_removable_graphical(g: Mag, x: str) -> RemovabilityVerdict:
    """Two-condition graphical removability check.

    Condition 1: every y in Adj(x) is adjacent to every z in Ch(x) | N(x).
    Condition 2: for every collider path from x to some y, and every z whose
    parents include x and all the path's colliders, y and z are adjacent.
    A single edge counts as a collider path, so condition 2 covers the case
    of zero intermediate colliders as well.
    """
    adj_x = g.adjacent(x)
    ch_n = g.children(x) | g.neighbors(x)
    for y in sorted(adj_x, key=g.index):
        for z in sorted(ch_n - {y}, key=g.index):
            if not g.is_adjacent(y, z):
                return RemovabilityVerdict(False, ("adjacency", y, z))

    # Collider paths stay within Mb(x) | {x}: any vertex on one has a collider
    # path to x itself, so the restriction loses nothing.
    allowed = g.markov_boundary(x) | {x}
    verdict = _collider_path_violation(g, x, allowed)
    if verdict is not None:
        return verdict
    return RemovabilityVerdict(True)


def _collider_path_violation(g: Mag, x: str, allowed: set[str]) -> RemovabilityVerdict | None:
    parent_sets = {v: g.parents(v) for v in g.vertices}

    def check_terminal(path: list[str]) -> RemovabilityVerdict | None:
        # path = (x, V1..Vm, y); colliders = path[:-1]
        y = path[-1]
        colliders = path[:-1]
        on_path = set(path)
        for z in g.vertices:
            if z in on_path:
                continue
            if all(c in parent_sets[z] for c in colliders):
                if not g.is_adjacent(y, z):
                    return RemovabilityVerdict(False, ("collider_path", tuple(path), z))
        return None

    def extend(path: list[str], on_path: set[str]) -> RemovabilityVerdict | None:
        v = path[-1]
        for w in sorted(g.adjacent(v) - on_path, key=g.index):
            mv, mw = g.edge_marks(v, w)  # type: ignore[misc]
            if len(path) > 1:
                # v is interior: it must be a collider on the extended path
                prev_mark_at_v = g.edge_marks(v, path[-2])[0]  # type: ignore[index]
                if not (prev_mark_at_v is ARROW and mv is ARROW):
                    continue
            bad = check_terminal(path + [w])
            if bad is not None:
                return bad
            if w in allowed:
                path.append(w)
                on_path.add(w)
                bad = extend(path, on_path)
                if bad is not None:
                    return bad
                path.pop()
                on_path.remove(w)
        return None

    return extend([x], {x})


def find_removable(g: Mag) -> str:
    """Some removable vertex, searched in ascending Markov boundary size.

    Requires the undirected part of g to be chordal; under that hypothesis a
    removable vertex always exists.
    """
    if len(g) == 0:
        raise InternalInvariantBroken("empty graph has no vertices to remove")
    if not g.undirected_part_chordal():
        raise ChordalityViolated("undirected part of the MAG is not chordal")
    order = sorted(g.vertices, key=lambda v: (len(g.markov_boundary(v)), g.index(v)))
    for x in order:
        if is_removable_graphical(g, x).removable:
            return x
    raise InternalInvariantBroken(
        "no removable vertex despite a chordal undirected part"
    )
