"""Endpoint orientation of a learned skeleton.

Starting from an all-circle skeleton and the recorded separating sets, R0
orients unshielded colliders, then rules R1 through R10 run in a cycle until
a fixpoint: arrowhead propagation (R1 to R4, including the discriminating
path rule), undirected-edge rules (R5 to R7), and tail rules (R8 to R10).
Marks only ever specialize from circle; a contradicting demand is logged and
the first mark kept.
"""

from __future__ import annotations

import itertools
import logging
from typing import Iterable, Iterator, Sequence

from .errors import InvalidComparison, InvalidQuery
from .graph import ARROW, CIRCLE, TAIL, Mag, Mark, Pag
from .learner import SepSetStore

logger = logging.getLogger(__name__)


class OrientationState:
    """Mutable endpoint marks over a fixed skeleton, with an application log."""

    def __init__(self, vertices: Sequence[str], edges: Iterable[tuple[str, str]]):
        self.vertices = list(vertices)
        self.adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        self._mark: dict[tuple[str, str], Mark] = {}
        self.log: list[tuple[str, str, str, Mark]] = []
        self.conflicts: list[tuple[str, str, str, Mark]] = []
        for u, v in edges:
            if u not in self.adj or v not in self.adj:
                raise InvalidQuery(f"edge ({u}, {v}) references unknown vertex")
            self.adj[u].add(v)
            self.adj[v].add(u)
            self._mark[(u, v)] = CIRCLE
            self._mark[(v, u)] = CIRCLE

    def is_adjacent(self, u: str, v: str) -> bool:
        return v in self.adj[u]

    def mark_at(self, u: str, v: str) -> Mark | None:
        """The mark at the u end of the edge between u and v."""
        return self._mark.get((u, v))

    def set_mark(self, u: str, v: str, mark: Mark, rule: str) -> bool:
        """Place ``mark`` at the u end; True iff the state changed."""
        current = self._mark[(u, v)]
        if current is mark:
            return False
        if current is not CIRCLE:
            self.conflicts.append((rule, u, v, mark))
            logger.warning(
                "%s wants %s at %s on edge (%s, %s); keeping %s",
                rule, mark.name, u, u, v, current.name,
            )
            return False
        self._mark[(u, v)] = mark
        self.log.append((rule, u, v, mark))
        return True

    def to_pag(self) -> Pag:
        edges = []
        index = {v: i for i, v in enumerate(self.vertices)}
        for u in self.vertices:
            for v in self.adj[u]:
                if index[u] < index[v]:
                    edges.append((u, v, self._mark[(u, v)], self._mark[(v, u)]))
        return Pag(self.vertices, edges)


def _pd_step(state: OrientationState, u: str, v: str) -> bool:
    """True iff the edge can be traversed from u to v on a potentially
    directed path: no arrowhead at u, no tail at v."""
    return (
        state.mark_at(u, v) is not ARROW and state.mark_at(v, u) is not TAIL
    )


def _uncovered_pd_paths(
    state: OrientationState, start: str, goal: str, min_edges: int = 1
) -> Iterator[list[str]]:
    """Uncovered potentially directed paths from start to goal.

    Uncovered: every interior vertex has non-adjacent path-neighbors."""

    def walk(path: list[str], on_path: set[str]) -> Iterator[list[str]]:
        u = path[-1]
        for w in sorted(state.adj[u] - on_path):
            if not _pd_step(state, u, w):
                continue
            if len(path) >= 2 and state.is_adjacent(path[-2], w):
                continue  # triple (path[-2], u, w) is shielded
            if w == goal:
                if len(path) >= min_edges:
                    yield path + [w]
                continue
            yield from walk(path + [w], on_path | {w})

    yield from walk([start], {start})


def _apply_r0(state: OrientationState, store: SepSetStore) -> None:
    for a, b in itertools.combinations(state.vertices, 2):
        if state.is_adjacent(a, b):
            continue
        if store.verdict(a, b) != "separated":
            continue
        sepset = store.first_sepset(a, b)
        for c in sorted(state.adj[a] & state.adj[b]):
            if c not in sepset:
                state.set_mark(c, a, ARROW, "R0")
                state.set_mark(c, b, ARROW, "R0")


def _apply_r1(state: OrientationState) -> bool:
    # a *-> b o-* c, a and c non-adjacent  =>  b -> c
    changed = False
    for b in state.vertices:
        for a in sorted(state.adj[b]):
            if state.mark_at(b, a) is not ARROW:
                continue
            for c in sorted(state.adj[b] - {a}):
                if state.mark_at(b, c) is CIRCLE and not state.is_adjacent(a, c):
                    changed |= state.set_mark(b, c, TAIL, "R1")
                    changed |= state.set_mark(c, b, ARROW, "R1")
    return changed


def _apply_r2(state: OrientationState) -> bool:
    # a -> b *-> c  or  a *-> b -> c, with a *-o c  =>  a *-> c
    changed = False
    for b in state.vertices:
        for a in sorted(state.adj[b]):
            if state.mark_at(b, a) is not ARROW:
                continue
            for c in sorted(state.adj[b] - {a}):
                if state.mark_at(c, b) is not ARROW:
                    continue
                if not state.is_adjacent(a, c) or state.mark_at(c, a) is not CIRCLE:
                    continue
                first_directed = state.mark_at(a, b) is TAIL
                second_directed = state.mark_at(b, c) is TAIL
                if first_directed or second_directed:
                    changed |= state.set_mark(c, a, ARROW, "R2")
    return changed


def _apply_r3(state: OrientationState) -> bool:
    # a *-> b <-* c, a *-o d o-* c, a and c non-adjacent, d *-o b  =>  d *-> b
    changed = False
    for a, c in itertools.combinations(state.vertices, 2):
        if state.is_adjacent(a, c):
            continue
        shared = state.adj[a] & state.adj[c]
        for b in sorted(shared):
            if state.mark_at(b, a) is not ARROW or state.mark_at(b, c) is not ARROW:
                continue
            for d in sorted(shared - {b}):
                if state.mark_at(d, a) is CIRCLE and state.mark_at(d, c) is CIRCLE:
                    if state.is_adjacent(d, b) and state.mark_at(b, d) is CIRCLE:
                        changed |= state.set_mark(b, d, ARROW, "R3")
    return changed


def _discriminating_paths(
    state: OrientationState, t: str, b: str, c: str
) -> Iterator[list[str]]:
    """Paths (t, ..., a, b, c): t and c non-adjacent, every vertex strictly
    between t and b a collider on the path and a parent of c."""
    into_c = {
        v
        for v in state.adj[c]
        if state.mark_at(v, c) is TAIL and state.mark_at(c, v) is ARROW
    }

    def walk(path: list[str], on_path: set[str]) -> Iterator[list[str]]:
        # path runs backwards from b toward t
        u = path[-1]
        for w in sorted(state.adj[u] - on_path - {c}):
            if state.mark_at(u, w) is not ARROW:
                continue  # u must collide between w and the previous vertex
            if w == t:
                yield [t] + path[::-1] + [c]
                continue
            if w in into_c and state.mark_at(w, u) is ARROW:
                yield from walk(path + [w], on_path | {w})

    for a in sorted(state.adj[b] - {c}):
        if a == t:
            continue  # need at least one collider between t and b
        if a in into_c and state.mark_at(a, b) is ARROW:
            yield from walk([b, a], {b, a})


def _apply_r4(state: OrientationState, store: SepSetStore) -> bool:
    # discriminating path (t, ..., a, b, c) with b o-* c:
    # b in sepset(t, c)  =>  b -> c; otherwise a <-> b <-> c
    changed = False
    for t, c in itertools.permutations(state.vertices, 2):
        if state.is_adjacent(t, c):
            continue
        for b in sorted(state.adj[c]):
            if b == t or state.mark_at(b, c) is not CIRCLE:
                continue
            for path in _discriminating_paths(state, t, b, c):
                a = path[-3]
                if store.verdict(t, c) == "separated" and b in store.first_sepset(t, c):
                    changed |= state.set_mark(b, c, TAIL, "R4")
                    changed |= state.set_mark(c, b, ARROW, "R4")
                else:
                    changed |= state.set_mark(a, b, ARROW, "R4")
                    changed |= state.set_mark(b, a, ARROW, "R4")
                    changed |= state.set_mark(b, c, ARROW, "R4")
                    changed |= state.set_mark(c, b, ARROW, "R4")
                break
    return changed


def _uncovered_circle_paths(
    state: OrientationState, a: str, b: str
) -> Iterator[list[str]]:
    """Uncovered paths (a, p1, ..., pk, b), k >= 2, all edges o-o,
    p1 non-adjacent to b and pk non-adjacent to a."""

    def circle_edge(u: str, v: str) -> bool:
        return state.mark_at(u, v) is CIRCLE and state.mark_at(v, u) is CIRCLE

    def walk(path: list[str], on_path: set[str]) -> Iterator[list[str]]:
        u = path[-1]
        for w in sorted(state.adj[u] - on_path):
            if not circle_edge(u, w):
                continue
            if len(path) >= 2 and state.is_adjacent(path[-2], w):
                continue
            if w == b:
                if len(path) >= 3 and not state.is_adjacent(path[-1], a):
                    yield path + [w]
                continue
            yield from walk(path + [w], on_path | {w})

    for p1 in sorted(state.adj[a] - {b}):
        if circle_edge(a, p1) and not state.is_adjacent(p1, b):
            yield from walk([a, p1], {a, p1})


def _apply_r5(state: OrientationState) -> bool:
    # a o-o b with an uncovered circle path (a, p1, ..., pk, b), endpoints'
    # path-neighbors non-adjacent to the far endpoint  =>  the whole cycle
    # becomes undirected
    changed = False
    for a, b in itertools.combinations(state.vertices, 2):
        if not state.is_adjacent(a, b):
            continue
        if state.mark_at(a, b) is not CIRCLE or state.mark_at(b, a) is not CIRCLE:
            continue
        for path in _uncovered_circle_paths(state, a, b):
            for u, v in zip(path, path[1:]):
                changed |= state.set_mark(u, v, TAIL, "R5")
                changed |= state.set_mark(v, u, TAIL, "R5")
            changed |= state.set_mark(a, b, TAIL, "R5")
            changed |= state.set_mark(b, a, TAIL, "R5")
            break
    return changed


def _apply_r6(state: OrientationState) -> bool:
    # a -- b o-* c  =>  b --* c
    changed = False
    for b in state.vertices:
        if not any(
            state.mark_at(b, a) is TAIL and state.mark_at(a, b) is TAIL
            for a in state.adj[b]
        ):
            continue
        for c in sorted(state.adj[b]):
            if state.mark_at(b, c) is CIRCLE and any(
                a != c
                and state.mark_at(b, a) is TAIL
                and state.mark_at(a, b) is TAIL
                for a in state.adj[b]
            ):
                changed |= state.set_mark(b, c, TAIL, "R6")
    return changed


def _apply_r7(state: OrientationState) -> bool:
    # a --o b o-* c, a and c non-adjacent  =>  b --* c
    changed = False
    for b in state.vertices:
        for a in sorted(state.adj[b]):
            if not (state.mark_at(a, b) is TAIL and state.mark_at(b, a) is CIRCLE):
                continue
            for c in sorted(state.adj[b] - {a}):
                if state.mark_at(b, c) is CIRCLE and not state.is_adjacent(a, c):
                    changed |= state.set_mark(b, c, TAIL, "R7")
    return changed


def _apply_r8(state: OrientationState) -> bool:
    # a -> b -> c  or  a --o b -> c, with a o-> c  =>  a -> c
    changed = False
    for a in state.vertices:
        for c in sorted(state.adj[a]):
            if not (
                state.mark_at(a, c) is CIRCLE and state.mark_at(c, a) is ARROW
            ):
                continue
            for b in sorted(state.adj[a] & state.adj[c]):
                b_to_c = state.mark_at(b, c) is TAIL and state.mark_at(c, b) is ARROW
                if not b_to_c:
                    continue
                a_to_b = state.mark_at(a, b) is TAIL and state.mark_at(b, a) is ARROW
                a_tail_circle = (
                    state.mark_at(a, b) is TAIL and state.mark_at(b, a) is CIRCLE
                )
                if a_to_b or a_tail_circle:
                    changed |= state.set_mark(a, c, TAIL, "R8")
                    break
    return changed


def _apply_r9(state: OrientationState) -> bool:
    # a o-> c with an uncovered potentially directed path (a, b, ..., c),
    # b and c non-adjacent  =>  a -> c
    changed = False
    for a in state.vertices:
        for c in sorted(state.adj[a]):
            if not (
                state.mark_at(a, c) is CIRCLE and state.mark_at(c, a) is ARROW
            ):
                continue
            for path in _uncovered_pd_paths(state, a, c, min_edges=2):
                if not state.is_adjacent(path[1], c):
                    changed |= state.set_mark(a, c, TAIL, "R9")
                    break
    return changed


def _apply_r10(state: OrientationState) -> bool:
    # a o-> c, b -> c <- d, uncovered potentially directed paths from a to b
    # and from a to d whose first steps are distinct and non-adjacent
    # =>  a -> c
    changed = False
    for a in state.vertices:
        for c in sorted(state.adj[a]):
            if not (
                state.mark_at(a, c) is CIRCLE and state.mark_at(c, a) is ARROW
            ):
                continue
            into_c = sorted(
                v
                for v in state.adj[c]
                if v != a
                and state.mark_at(v, c) is TAIL
                and state.mark_at(c, v) is ARROW
            )
            done = False
            for b, d in itertools.permutations(into_c, 2):
                if done:
                    break
                mus = {
                    p[1] for p in _uncovered_pd_paths(state, a, b) if p[1] != c
                }
                if not mus:
                    continue
                for p2 in _uncovered_pd_paths(state, a, d):
                    omega = p2[1]
                    if omega == c:
                        continue
                    if any(
                        mu != omega and not state.is_adjacent(mu, omega)
                        for mu in mus
                    ):
                        changed |= state.set_mark(a, c, TAIL, "R10")
                        done = True
                        break
    return changed


_RULES = [
    _apply_r1,
    _apply_r2,
    _apply_r3,
    None,  # R4 needs the store
    _apply_r5,
    _apply_r6,
    _apply_r7,
    _apply_r8,
    _apply_r9,
    _apply_r10,
]


def orient_pag(store: SepSetStore, vars: Iterable[str]) -> Pag:
    """Build the maximally oriented PAG from resolved pair verdicts.

    Precondition: no pair in the store is unknown. R0 runs once on the
    all-circle skeleton; R1 through R10 then cycle until no rule changes a
    mark.
    """
    names = sorted(set(vars))
    unknown = [p for p in store.unknown_pairs() if set(p) <= set(names)]
    if unknown:
        raise InvalidQuery(f"unresolved pairs remain: {unknown[:3]}")
    edges = [
        (x, y) for x, y in store.adjacent_pairs() if x in set(names) and y in set(names)
    ]
    state = OrientationState(names, edges)
    _apply_r0(state, store)
    while True:
        changed = False
        for rule in _RULES:
            if rule is None:
                changed |= _apply_r4(state, store)
            else:
                changed |= rule(state)
        if not changed:
            break
    return state.to_pag()


def mark_differences(pag: Pag, truth: Mag) -> list[tuple]:
    """Disagreements between a PAG and a ground-truth MAG.

    Skeleton differences are reported as ("edge", u, v, in_pag, in_truth);
    non-circle marks in the PAG that contradict the truth as
    ("mark", at, other, pag_mark, truth_mark).
    """
    if set(pag.vertices) != set(truth.vertices):
        raise InvalidComparison("graphs are over different vertex sets")
    diffs: list[tuple] = []
    def ordered(pairs):
        return sorted(tuple(sorted(p)) for p in pairs)

    pag_skel = pag.skeleton()
    truth_skel = truth.skeleton()
    for u, v in ordered(pag_skel - truth_skel):
        diffs.append(("edge", u, v, True, False))
    for u, v in ordered(truth_skel - pag_skel):
        diffs.append(("edge", u, v, False, True))
    for u, v in ordered(pag_skel & truth_skel):
        learned = pag.edge_marks(u, v)
        real = truth.edge_marks(u, v)
        for at, other, lm, rm in ((u, v, learned[0], real[0]), (v, u, learned[1], real[1])):
            if lm is not CIRCLE and lm is not rm:
                diffs.append(("mark", at, other, lm, rm))
    return diffs


def pag_invariant_marks_consistent(pag: Pag, truth: Mag) -> bool:
    """True iff skeletons match and every non-circle mark agrees with truth."""
    diffs = mark_differences(pag, truth)
    if diffs:
        logger.info("PAG/MAG differences: %s", diffs)
    return not diffs
