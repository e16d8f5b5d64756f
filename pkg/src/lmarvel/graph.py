"""Mixed graphs (DAG / MAG / PAG) and the graph-theoretic primitives built on them.

Edges carry a mark at each endpoint (tail, arrowhead, or circle), so a single
representation covers directed, bidirected, undirected, and partially oriented
edges. Graphs are immutable after construction; every query is read-only.
"""

from __future__ import annotations

import itertools
from collections import deque
from enum import Enum
from typing import Iterable, Iterator

from .errors import (
    InvalidDag,
    InvalidPartition,
    InvalidQuery,
    OracleSizeExceeded,
    UnknownVertex,
)

BRUTE_FORCE_MAX_VERTICES = 10


class Mark(Enum):
    """Endpoint mark of a mixed-graph edge."""

    TAIL = "-"
    ARROW = ">"
    CIRCLE = "o"


TAIL = Mark.TAIL
ARROW = Mark.ARROW
CIRCLE = Mark.CIRCLE

Edge = tuple[str, str, Mark, Mark]


class MixedGraph:
    """A graph whose edges carry a mark at each endpoint.

    At most one edge per unordered pair, no self-loops. Vertex labels keep
    their construction order; ties throughout the package are broken by that
    order, which makes every algorithm deterministic.
    """

    _allowed_marks = frozenset(Mark)

    def __init__(self, vertices: Iterable[str], edges: Iterable[Edge] = ()):
        self._vertices: tuple[str, ...] = tuple(vertices)
        self._index: dict[str, int] = {v: i for i, v in enumerate(self._vertices)}
        if len(self._index) != len(self._vertices):
            raise InvalidQuery("duplicate vertex labels")
        # _marks[u][v] is the mark at u on the edge between u and v
        self._marks: dict[str, dict[str, Mark]] = {v: {} for v in self._vertices}
        for u, v, mu, mv in edges:
            self._add_edge(u, v, mu, mv)
        self._validate()

    def _add_edge(self, u: str, v: str, mu: Mark, mv: Mark) -> None:
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise InvalidQuery(f"self-loop at {u!r}")
        if v in self._marks[u]:
            raise InvalidQuery(f"duplicate edge between {u!r} and {v!r}")
        if mu not in self._allowed_marks or mv not in self._allowed_marks:
            raise InvalidQuery(f"mark not allowed in {type(self).__name__}: {u} {v}")
        self._marks[u][v] = mu
        self._marks[v][u] = mv

    def _validate(self) -> None:
        """Subclass hook; called once after all edges are inserted."""

    def _check_vertex(self, x: str) -> None:
        if x not in self._index:
            raise UnknownVertex(f"unknown vertex {x!r}")

    # -- basic structure ---------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, x: str) -> bool:
        return x in self._index

    def index(self, x: str) -> int:
        self._check_vertex(x)
        return self._index[x]

    def edges(self) -> Iterator[Edge]:
        """Yield each edge once, as (u, v, mark_at_u, mark_at_v), u before v."""
        for u in self._vertices:
            for v, mu in self._marks[u].items():
                if self._index[u] < self._index[v]:
                    yield u, v, mu, self._marks[v][u]

    def n_edges(self) -> int:
        return sum(1 for _ in self.edges())

    def edge_marks(self, u: str, v: str) -> tuple[Mark, Mark] | None:
        """Marks (at u, at v) of the edge between u and v, or None."""
        self._check_vertex(u)
        self._check_vertex(v)
        mu = self._marks[u].get(v)
        if mu is None:
            return None
        return mu, self._marks[v][u]

    def skeleton(self) -> frozenset[frozenset[str]]:
        return frozenset(frozenset((u, v)) for u, v, _, _ in self.edges())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return set(self._vertices) == set(other._vertices) and {
            (frozenset((u, v)), frozenset(((u, mu), (v, mv))))
            for u, v, mu, mv in self.edges()
        } == {
            (frozenset((u, v)), frozenset(((u, mu), (v, mv))))
            for u, v, mu, mv in other.edges()
        }

    def __hash__(self) -> int:
        return hash((frozenset(self._vertices), self.skeleton()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self)} vertices, {self.n_edges()} edges)"

    # -- local neighbourhoods ----------------------------------------------

    def adjacent(self, x: str) -> set[str]:
        self._check_vertex(x)
        return set(self._marks[x])

    def is_adjacent(self, u: str, v: str) -> bool:
        self._check_vertex(u)
        self._check_vertex(v)
        return v in self._marks[u]

    def parents(self, x: str) -> set[str]:
        """Vertices u with u -> x."""
        self._check_vertex(x)
        return {
            u
            for u, mx in self._marks[x].items()
            if mx is ARROW and self._marks[u][x] is TAIL
        }

    def children(self, x: str) -> set[str]:
        """Vertices u with x -> u."""
        self._check_vertex(x)
        return {
            u
            for u, mx in self._marks[x].items()
            if mx is TAIL and self._marks[u][x] is ARROW
        }

    def spouses(self, x: str) -> set[str]:
        """Vertices u with u <-> x."""
        self._check_vertex(x)
        return {
            u
            for u, mx in self._marks[x].items()
            if mx is ARROW and self._marks[u][x] is ARROW
        }

    def neighbors(self, x: str) -> set[str]:
        """Vertices u with u -- x."""
        self._check_vertex(x)
        return {
            u
            for u, mx in self._marks[x].items()
            if mx is TAIL and self._marks[u][x] is TAIL
        }

    # -- ancestry ------------------------------------------------------------

    def ancestors(self, xs: Iterable[str]) -> set[str]:
        """Reflexive-transitive closure of the parent relation over xs."""
        out: set[str] = set()
        stack = []
        for x in xs:
            self._check_vertex(x)
            stack.append(x)
        while stack:
            v = stack.pop()
            if v in out:
                continue
            out.add(v)
            stack.extend(self.parents(v) - out)
        return out

    def descendants(self, xs: Iterable[str]) -> set[str]:
        out: set[str] = set()
        stack = []
        for x in xs:
            self._check_vertex(x)
            stack.append(x)
        while stack:
            v = stack.pop()
            if v in out:
                continue
            out.add(v)
            stack.extend(self.children(v) - out)
        return out

    # -- induced structure ---------------------------------------------------

    def induced_subgraph(self, keep: Iterable[str]) -> "MixedGraph":
        keep_set = set(keep)
        for x in keep_set:
            self._check_vertex(x)
        vertices = tuple(v for v in self._vertices if v in keep_set)
        edges = [
            (u, v, mu, mv)
            for u, v, mu, mv in self.edges()
            if u in keep_set and v in keep_set
        ]
        return type(self)(vertices, edges)

    # -- m-separation ----------------------------------------------------------

    def m_connected_from(self, x: str, z: Iterable[str]) -> set[str]:
        """All vertices m-connected to x given z (reachability over walk states)."""
        self._check_vertex(x)
        z_set = set(z)
        for v in z_set:
            self._check_vertex(v)
        if x in z_set:
            raise InvalidQuery("source of an m-connection query must not be conditioned on")
        anc_z = self.ancestors(z_set)
        reached: set[str] = set()
        seen: set[tuple[str, bool]] = set()
        queue: deque[tuple[str, bool]] = deque()
        for w in self._marks[x]:
            state = (w, self._marks[w][x] is ARROW)
            if state not in seen:
                seen.add(state)
                queue.append(state)
                reached.add(w)
        while queue:
            v, arrow_in = queue.popleft()
            for w, mv in self._marks[v].items():
                collider = arrow_in and mv is ARROW
                passes = (v in anc_z) if collider else (v not in z_set)
                if not passes:
                    continue
                state = (w, self._marks[w][v] is ARROW)
                if state not in seen:
                    seen.add(state)
                    queue.append(state)
                    reached.add(w)
        reached.discard(x)
        return reached

    def m_separated(self, x: str, y: str, z: Iterable[str]) -> bool:
        """True iff every path between x and y is blocked given z."""
        z_set = set(z)
        self._check_vertex(x)
        self._check_vertex(y)
        if x == y:
            raise InvalidQuery("m-separation endpoints must differ")
        if x in z_set or y in z_set:
            raise InvalidQuery("endpoints must not appear in the conditioning set")
        return y not in self.m_connected_from(x, z_set)

    def m_separated_bruteforce(self, x: str, y: str, z: Iterable[str]) -> bool:
        """Path-enumeration oracle for m-separation; small graphs only."""
        if len(self) > BRUTE_FORCE_MAX_VERTICES:
            raise OracleSizeExceeded(
                f"brute-force m-separation limited to {BRUTE_FORCE_MAX_VERTICES} vertices"
            )
        z_set = set(z)
        self._check_vertex(x)
        self._check_vertex(y)
        if x == y:
            raise InvalidQuery("m-separation endpoints must differ")
        if x in z_set or y in z_set:
            raise InvalidQuery("endpoints must not appear in the conditioning set")
        anc = self.ancestors(z_set | {x, y})
        for path in self._simple_paths(x, y):
            if self._path_m_connecting(path, z_set, anc):
                return False
        return True

    def _simple_paths(self, x: str, y: str) -> Iterator[list[str]]:
        path = [x]
        on_path = {x}

        def rec(v: str) -> Iterator[list[str]]:
            for w in self._marks[v]:
                if w == y:
                    yield path + [y]
                elif w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    yield from rec(w)
                    path.pop()
                    on_path.remove(w)

        yield from rec(x)

    def _path_m_connecting(self, path: list[str], z: set[str], anc: set[str]) -> bool:
        for i in range(1, len(path) - 1):
            v = path[i]
            collider = (
                self._marks[v][path[i - 1]] is ARROW
                and self._marks[v][path[i + 1]] is ARROW
            )
            if collider:
                if v not in anc:
                    return False
            elif v in z:
                return False
        return True

    # -- districts and the PaP set --------------------------------------------

    def district(self, x: str) -> set[str]:
        """Vertices reachable from x through bidirected edges only, excluding x."""
        self._check_vertex(x)
        out: set[str] = set()
        stack = [x]
        while stack:
            v = stack.pop()
            for w in self.spouses(v):
                if w != x and w not in out:
                    out.add(w)
                    stack.append(w)
        return out

    def pa_plus(self, x: str) -> set[str]:
        """Parents, district, parents of the district, and neighbors of x."""
        dis = self.district(x)
        out = self.parents(x) | dis | self.neighbors(x)
        for d in dis:
            out |= self.parents(d)
        out.discard(x)
        return out

    def delta_plus(self) -> int:
        """Maximum pa_plus size over all vertices; 0 for an edgeless graph."""
        return max((len(self.pa_plus(x)) for x in self._vertices), default=0)

    # -- Markov boundary --------------------------------------------------------

    def markov_boundary(self, x: str) -> set[str]:
        """All vertices with a collider path to x (a single edge counts)."""
        self._check_vertex(x)
        out: set[str] = set()
        seen: set[tuple[str, bool]] = set()
        stack: list[tuple[str, bool]] = []
        for w, mw in self._marks[x].items():
            state = (w, self._marks[w][x] is ARROW)
            seen.add(state)
            stack.append(state)
            out.add(w)
        while stack:
            v, arrow_in = stack.pop()
            if not arrow_in:
                continue
            for w, mv in self._marks[v].items():
                if mv is not ARROW:
                    continue  # v must be a collider to extend the path
                state = (w, self._marks[w][v] is ARROW)
                if state not in seen:
                    seen.add(state)
                    stack.append(state)
                    out.add(w)
        out.discard(x)
        return out

    # -- chordality of the undirected part ---------------------------------------

    def undirected_part_chordal(self) -> bool:
        """Chordality of the edge-induced subgraph over undirected edges.

        Lexicographic BFS produces a candidate perfect elimination ordering,
        which is then verified by the usual fill-in check.
        """
        und: dict[str, set[str]] = {}
        for u, v, mu, mv in self.edges():
            if mu is TAIL and mv is TAIL:
                und.setdefault(u, set()).add(v)
                und.setdefault(v, set()).add(u)
        if not und:
            return True
        order = _lex_bfs(und)
        return _is_perfect_elimination_ordering(und, list(reversed(order)))


def _lex_bfs(adj: dict[str, set[str]]) -> list[str]:
    """Lexicographic BFS visit order via partition refinement."""
    sequence: list[set[str]] = [set(adj)]
    order: list[str] = []
    while sequence:
        front = sequence[0]
        v = sorted(front)[0]
        front.discard(v)
        if not front:
            sequence.pop(0)
        order.append(v)
        nbrs = adj[v]
        new_sequence: list[set[str]] = []
        for cell in sequence:
            inside = cell & nbrs
            outside = cell - nbrs
            if inside:
                new_sequence.append(inside)
            if outside:
                new_sequence.append(outside)
        sequence = new_sequence
    return order


def _is_perfect_elimination_ordering(adj: dict[str, set[str]], elim: list[str]) -> bool:
    pos = {v: i for i, v in enumerate(elim)}
    for v in elim:
        later = [u for u in adj[v] if pos[u] > pos[v]]
        if not later:
            continue
        pivot = min(later, key=pos.__getitem__)
        for u in later:
            if u != pivot and u not in adj[pivot]:
                return False
    return True


class Dag(MixedGraph):
    """A mixed graph whose every edge is tail -> arrowhead, with no directed cycle."""

    _allowed_marks = frozenset((TAIL, ARROW))

    def _add_edge(self, u: str, v: str, mu: Mark, mv: Mark) -> None:
        if v in self._marks.get(u, {}):
            # a repeated pair in a DAG edge list is a 2-cycle or parallel edge
            raise InvalidDag(f"two edges between {u!r} and {v!r}")
        super()._add_edge(u, v, mu, mv)

    def _validate(self) -> None:
        for u, v, mu, mv in self.edges():
            if {mu, mv} != {TAIL, ARROW}:
                raise InvalidDag(f"non-directed edge between {u!r} and {v!r}")
        if self._has_directed_cycle():
            raise InvalidDag("directed cycle")

    def _has_directed_cycle(self) -> bool:
        color: dict[str, int] = {}

        def visit(v: str) -> bool:
            color[v] = 1
            for w in self.children(v):
                c = color.get(w, 0)
                if c == 1 or (c == 0 and visit(w)):
                    return True
            color[v] = 2
            return False

        return any(color.get(v, 0) == 0 and visit(v) for v in self._vertices)

    def topological_order(self) -> list[str]:
        in_deg = {v: len(self.parents(v)) for v in self._vertices}
        ready = deque(v for v in self._vertices if in_deg[v] == 0)
        order: list[str] = []
        while ready:
            v = ready.popleft()
            order.append(v)
            for w in sorted(self.children(v), key=self._index.__getitem__):
                in_deg[w] -= 1
                if in_deg[w] == 0:
                    ready.append(w)
        return order


class Mag(MixedGraph):
    """Ancestral mixed graph over directed, bidirected, and undirected edges.

    Ancestrality is enforced at construction. Maximality (every non-adjacent
    pair m-separable) is expensive, so it is checked only on demand via
    :meth:`check_maximal`.
    """

    _allowed_marks = frozenset((TAIL, ARROW))

    def _validate(self) -> None:
        for x in self._vertices:
            parents = self.parents(x)
            if parents and x in self.ancestors(parents):
                raise InvalidQuery(f"directed cycle through {x!r}")
            spouses = self.spouses(x)
            if spouses and x in self.ancestors(spouses):
                raise InvalidQuery(f"almost-directed cycle through {x!r}")
            if self.neighbors(x) and (parents or spouses):
                raise InvalidQuery(
                    f"undirected-edge endpoint {x!r} has a parent or spouse"
                )

    def check_maximal(self) -> bool:
        """Exhaustively verify maximality; small graphs only."""
        if len(self) > BRUTE_FORCE_MAX_VERTICES:
            raise OracleSizeExceeded("maximality check limited to small graphs")
        for x, y in itertools.combinations(self._vertices, 2):
            if self.is_adjacent(x, y):
                continue
            rest = [v for v in self._vertices if v not in (x, y)]
            if not any(
                self.m_separated(x, y, sub)
                for r in range(len(rest) + 1)
                for sub in itertools.combinations(rest, r)
            ):
                return False
        return True


class Pag(MixedGraph):
    """Partially oriented ancestral graph; circle marks are permitted."""

    _allowed_marks = frozenset(Mark)


def latent_project(dag: Dag, observed: Iterable[str], selection: Iterable[str]) -> Mag:
    """Project a DAG onto its observed vertices, conditioned on selection.

    Two observed vertices are adjacent iff an inducing path relative to the
    latent/selection split exists; adjacency is decided by testing
    d-separation given the canonical separator (the observed ancestors of the
    pair and the selection set), which fails exactly when an inducing path
    exists. Marks follow the ancestry of each endpoint.
    """
    obs = list(dict.fromkeys(observed))
    sel = list(dict.fromkeys(selection))
    for v in obs + sel:
        if v not in dag:
            raise InvalidPartition(f"unknown vertex {v!r}")
    if set(obs) & set(sel):
        raise InvalidPartition("observed and selection sets overlap")

    anc_of = {v: dag.ancestors([v]) for v in dag.vertices}
    anc_sel: set[str] = set()
    for s in sel:
        anc_sel |= anc_of[s]

    def is_anc(a: str, b: str) -> bool:
        # a in Anc({b} | S)
        return a in anc_of[b] or a in anc_sel

    obs_set = set(obs)
    edges: list[Edge] = []
    for x, y in itertools.combinations(obs, 2):
        sep = (anc_of[x] | anc_of[y] | anc_sel) & obs_set - {x, y}
        if dag.m_separated(x, y, sep | set(sel)):
            continue
        x_anc = is_anc(x, y)
        y_anc = is_anc(y, x)
        if x_anc and not y_anc:
            edges.append((x, y, TAIL, ARROW))
        elif y_anc and not x_anc:
            edges.append((x, y, ARROW, TAIL))
        elif not x_anc and not y_anc:
            edges.append((x, y, ARROW, ARROW))
        else:
            edges.append((x, y, TAIL, TAIL))
    return Mag(obs, edges)


def has_inducing_path_bruteforce(
    dag: Dag, x: str, y: str, latent: Iterable[str], selection: Iterable[str]
) -> bool:
    """Path-enumeration oracle for inducing-path existence; small graphs only."""
    if len(dag) > BRUTE_FORCE_MAX_VERTICES:
        raise OracleSizeExceeded(
            f"brute-force inducing-path search limited to {BRUTE_FORCE_MAX_VERTICES} vertices"
        )
    lat = set(latent)
    anc = dag.ancestors(set(selection) | {x, y})
    for path in dag._simple_paths(x, y):
        ok = True
        for i in range(1, len(path) - 1):
            v = path[i]
            collider = (
                dag._marks[v][path[i - 1]] is ARROW
                and dag._marks[v][path[i + 1]] is ARROW
            )
            if collider:
                if v not in anc:
                    ok = False
                    break
            elif v not in lat:
                ok = False
                break
        if ok:
            return True
    return False
