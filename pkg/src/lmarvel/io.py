"""Plain-text graph format.

First line ``vertices: <name> <name> ...``; each following non-blank line is
one edge: ``u -> v``, ``u <-> v``, ``u -- v``, and for PAGs additionally
``u o-> v``, ``u o-o v``, ``u o-- v``. Lines starting with ``#`` and blank
lines are ignored. Names match ``[A-Za-z0-9_]+``.
"""

from __future__ import annotations

import re
from pathlib import Path

from .errors import InvalidFormat
from .graph import ARROW, CIRCLE, TAIL, Dag, Mag, Mark, MixedGraph, Pag

_NAME = re.compile(r"[A-Za-z0-9_]+\Z")

_TOKEN_TO_MARKS: dict[str, tuple[Mark, Mark]] = {
    "->": (TAIL, ARROW),
    "<->": (ARROW, ARROW),
    "--": (TAIL, TAIL),
    "o->": (CIRCLE, ARROW),
    "o-o": (CIRCLE, CIRCLE),
    "o--": (CIRCLE, TAIL),
}

_MARKS_TO_TOKEN = {marks: tok for tok, marks in _TOKEN_TO_MARKS.items()}


def parse_graph(text: str, cls: type[MixedGraph] = MixedGraph) -> MixedGraph:
    """Parse the text format into an instance of ``cls``."""
    vertices: list[str] | None = None
    edges = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if vertices is None:
            if not line.startswith("vertices:"):
                raise InvalidFormat("expected a 'vertices:' header line", line_no)
            vertices = line[len("vertices:") :].split()
            for name in vertices:
                if not _NAME.match(name):
                    raise InvalidFormat(f"bad vertex name {name!r}", line_no)
            if len(set(vertices)) != len(vertices):
                raise InvalidFormat("duplicate vertex names", line_no)
            continue
        parts = line.split()
        if len(parts) != 3:
            raise InvalidFormat(f"expected '<u> <edge> <v>', got {line!r}", line_no)
        u, token, v = parts
        if token not in _TOKEN_TO_MARKS:
            raise InvalidFormat(f"unknown edge token {token!r}", line_no)
        for name in (u, v):
            if name not in vertices:
                raise InvalidFormat(f"edge references unknown vertex {name!r}", line_no)
        mu, mv = _TOKEN_TO_MARKS[token]
        edges.append((u, v, mu, mv))
    if vertices is None:
        raise InvalidFormat("empty graph file: missing 'vertices:' line")
    try:
        return cls(vertices, edges)
    except Exception as exc:
        if isinstance(exc, InvalidFormat):
            raise
        raise type(exc)(str(exc)) from exc


def format_graph(g: MixedGraph) -> str:
    """Serialize a graph in the text format (deterministic, bit-exact)."""
    lines = ["vertices: " + " ".join(g.vertices)]
    for u, v, mu, mv in g.edges():
        if (mu, mv) in _MARKS_TO_TOKEN:
            lines.append(f"{u} {_MARKS_TO_TOKEN[(mu, mv)]} {v}")
        elif (mv, mu) in _MARKS_TO_TOKEN:
            lines.append(f"{v} {_MARKS_TO_TOKEN[(mv, mu)]} {u}")
        else:  # pragma: no cover - all mark pairs are covered up to reversal
            raise InvalidFormat(f"unserializable marks on edge {u!r}-{v!r}")
    return "\n".join(lines) + "\n"


def load_graph(path: str | Path, cls: type[MixedGraph] = MixedGraph) -> MixedGraph:
    return parse_graph(Path(path).read_text(), cls)


def save_graph(g: MixedGraph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


def load_dag(path: str | Path) -> Dag:
    return load_graph(path, Dag)  # type: ignore[return-value]


def load_mag(path: str | Path) -> Mag:
    return load_graph(path, Mag)  # type: ignore[return-value]


def load_pag(path: str | Path) -> Pag:
    return load_graph(path, Pag)  # type: ignore[return-value]
