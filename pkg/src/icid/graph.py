"""Mixed causal graphs: directed edges plus bidirected (latent confounding) edges.

The graph is immutable after construction and keeps its vertices in a fixed
order (first mention wins when parsing).  Every set-valued query downstream
sorts its result by that order, which keeps all derived artifacts, including
identification certificates, byte-deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable

__all__ = [
    "GraphError",
    "MixedGraph",
    "KnownEdges",
    "parse_graph",
    "serialize_graph",
]

_NAME_OK = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


class GraphError(ValueError):
    """Invalid graph text or an operation on a vertex that does not exist."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MixedGraph:
    """A mixed graph ``(V, D, B)`` whose directed part is a DAG.

    ``directed`` holds ordered pairs ``(parent, child)``; ``bidirected`` holds
    unordered pairs stored as sorted-by-index tuples.  A directed and a
    bidirected edge may coexist between the same pair of vertices.
    """

    __slots__ = (
        "vertices",
        "directed",
        "bidirected",
        "index",
        "_parents",
        "_children",
        "_siblings",
    )

    def __init__(
        self,
        vertices: Iterable[str],
        directed: Iterable[tuple[str, str]] = (),
        bidirected: Iterable[tuple[str, str]] = (),
    ):
        self.vertices: tuple[str, ...] = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex name")
        self.index: dict[str, int] = {v: i for i, v in enumerate(self.vertices)}

        parents: dict[str, list[str]] = {v: [] for v in self.vertices}
        children: dict[str, list[str]] = {v: [] for v in self.vertices}
        siblings: dict[str, list[str]] = {v: [] for v in self.vertices}

        dir_edges: list[tuple[str, str]] = []
        seen_d: set[tuple[str, str]] = set()
        for u, v in directed:
            self._check_vertex(u)
            self._check_vertex(v)
            if u == v:
                raise GraphError(f"self-loop on {u}")
            if (u, v) in seen_d:
                raise GraphError(f"duplicate edge {u} -> {v}")
            seen_d.add((u, v))
            dir_edges.append((u, v))
            parents[v].append(u)
            children[u].append(v)

        bi_edges: list[tuple[str, str]] = []
        seen_b: set[tuple[str, str]] = set()
        for a, b in bidirected:
            self._check_vertex(a)
            self._check_vertex(b)
            if a == b:
                raise GraphError(f"self-loop on {a}")
            key = self._bikey(a, b)
            if key in seen_b:
                raise GraphError(f"duplicate edge {a} <-> {b}")
            seen_b.add(key)
            bi_edges.append(key)
            siblings[a].append(b)
            siblings[b].append(a)

        self.directed: frozenset[tuple[str, str]] = frozenset(dir_edges)
        self.bidirected: frozenset[tuple[str, str]] = frozenset(bi_edges)
        self._parents = {v: tuple(sorted(ps, key=self.index.get)) for v, ps in parents.items()}
        self._children = {v: tuple(sorted(cs, key=self.index.get)) for v, cs in children.items()}
        self._siblings = {v: tuple(sorted(ss, key=self.index.get)) for v, ss in siblings.items()}

        if self.topological_order() is None:
            raise GraphError("directed edges contain a cycle")

    def _bikey(self, a: str, b: str) -> tuple[str, str]:
        return (a, b) if self.index[a] < self.index[b] else (b, a)

    def _check_vertex(self, v: str) -> None:
        if v not in self.index:
            raise GraphError(f"unknown vertex {v!r}")

    # -- basic queries -------------------------------------------------

    def __contains__(self, v: str) -> bool:
        return v in self.index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.directed == other.directed
            and self.bidirected == other.bidirected
        )

    def __hash__(self) -> int:
        return hash((self.vertices, self.directed, self.bidirected))

    def __repr__(self) -> str:
        return (
            f"MixedGraph({len(self.vertices)} vertices, "
            f"{len(self.directed)} directed, {len(self.bidirected)} bidirected)"
        )

    def sort_vertices(self, vs: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(vs, key=self.index.get))

    def parents(self, v: str) -> tuple[str, ...]:
        self._check_vertex(v)
        return self._parents[v]

    def children(self, v: str) -> tuple[str, ...]:
        self._check_vertex(v)
        return self._children[v]

    def siblings(self, v: str) -> tuple[str, ...]:
        self._check_vertex(v)
        return self._siblings[v]

    def has_bidirected(self, a: str, b: str) -> bool:
        return self._bikey(a, b) in self.bidirected

    def _closure(self, start: Iterable[str], step) -> tuple[str, ...]:
        seen = set(start)
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for w in step(v):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return self.sort_vertices(seen)

    def ancestors(self, v: str | Iterable[str]) -> tuple[str, ...]:
        """Reflexive transitive closure over reversed directed edges."""
        start = [v] if isinstance(v, str) else list(v)
        for s in start:
            self._check_vertex(s)
        return self._closure(start, lambda u: self._parents[u])

    def descendants(self, v: str | Iterable[str]) -> tuple[str, ...]:
        """Reflexive transitive closure over directed edges."""
        start = [v] if isinstance(v, str) else list(v)
        for s in start:
            self._check_vertex(s)
        return self._closure(start, lambda u: self._children[u])

    def relatives(self, v: str, kind: str) -> tuple[str, ...]:
        """Relatives of a single vertex; ``kind`` is one of ``parents``,
        ``ancestors``, ``descendants``, ``siblings``."""
        if kind == "parents":
            return self.parents(v)
        if kind == "ancestors":
            return self.ancestors(v)
        if kind == "descendants":
            return self.descendants(v)
        if kind == "siblings":
            return self.siblings(v)
        raise ValueError(f"unknown relative kind {kind!r}")

    def topological_order(self) -> tuple[str, ...] | None:
        """A topological order of the directed part, or None if cyclic."""
        indeg = {v: len(self._parents[v]) for v in self.vertices}
        queue = deque(v for v in self.vertices if indeg[v] == 0)
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for c in self._children[v]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        if len(order) != len(self.vertices):
            return None
        return tuple(order)

    def rename(self, mapping: dict[str, str]) -> "MixedGraph":
        """Copy of the graph with vertices renamed (order preserved)."""
        return MixedGraph(
            [mapping[v] for v in self.vertices],
            [(mapping[u], mapping[v]) for u, v in sorted(self.directed, key=self._dkey)],
            [(mapping[a], mapping[b]) for a, b in sorted(self.bidirected, key=self._dkey)],
        )

    def reorder(self, vertices: Iterable[str]) -> "MixedGraph":
        """Copy of the graph with a different vertex order, same edges."""
        return MixedGraph(vertices, sorted(self.directed), sorted(self.bidirected))

    def _dkey(self, e: tuple[str, str]) -> tuple[int, int]:
        return (self.index[e[0]], self.index[e[1]])

    def directed_sorted(self) -> list[tuple[str, str]]:
        return sorted(self.directed, key=self._dkey)

    def bidirected_sorted(self) -> list[tuple[str, str]]:
        return sorted(self.bidirected, key=self._dkey)


@dataclass(frozen=True)
class KnownEdges:
    """The set of directed coefficients whose values are already identified."""

    edges: frozenset[tuple[str, str]] = field(default_factory=frozenset)

    @staticmethod
    def of(*edges: tuple[str, str]) -> "KnownEdges":
        return KnownEdges(frozenset(edges))

    def validate(self, g: MixedGraph) -> None:
        bad = self.edges - g.directed
        if bad:
            raise GraphError(f"known edges not in graph: {sorted(bad)}")

    def __contains__(self, edge: tuple[str, str]) -> bool:
        return edge in self.edges

    def __iter__(self):
        return iter(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    def union(self, edges: Iterable[tuple[str, str]]) -> "KnownEdges":
        return KnownEdges(self.edges | frozenset(edges))

    def known_parents(self, g: MixedGraph, v: str) -> tuple[str, ...]:
        return g.sort_vertices(p for p in g.parents(v) if (p, v) in self.edges)

    def unknown_parents(self, g: MixedGraph, v: str) -> tuple[str, ...]:
        return g.sort_vertices(p for p in g.parents(v) if (p, v) not in self.edges)


def _valid_name(tok: str) -> bool:
    return bool(tok) and all(c in _NAME_OK for c in tok)


def parse_graph(text: str) -> MixedGraph:
    """Parse the line-oriented graph format.

    ``a -> b`` adds a directed edge, ``a <-> b`` a bidirected edge, ``# ...``
    is a comment and blank lines are skipped.  An optional ``node a b c`` line
    pre-declares vertex order; otherwise vertices are ordered by first
    mention.  Errors carry the offending line number.
    """
    vertices: list[str] = []
    vset: set[str] = set()
    directed: list[tuple[str, str]] = []
    dset: set[tuple[str, str]] = set()
    bidirected: list[tuple[str, str]] = []
    bset: set[frozenset[str]] = set()
    children: dict[str, set[str]] = {}

    def add_vertex(v: str, ln: int) -> None:
        if not _valid_name(v):
            raise GraphError(f"unknown token {v!r}", ln)
        if v not in vset:
            vset.add(v)
            vertices.append(v)
            children[v] = set()

    def reaches(src: str, dst: str) -> bool:
        # DFS over directed edges added so far.
        stack, seen = [src], {src}
        while stack:
            u = stack.pop()
            if u == dst:
                return True
            for w in children[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return False

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "node":
            if len(toks) < 2:
                raise GraphError("empty node declaration", ln)
            for v in toks[1:]:
                add_vertex(v, ln)
            continue
        if len(toks) != 3 or toks[1] not in ("->", "<->"):
            raise GraphError(f"unknown token in {line!r}", ln)
        u, op, v = toks
        add_vertex(u, ln)
        add_vertex(v, ln)
        if u == v:
            raise GraphError(f"self-loop on {u}", ln)
        if op == "->":
            if (u, v) in dset:
                raise GraphError(f"duplicate edge {u} -> {v}", ln)
            if reaches(v, u):
                raise GraphError(f"edge {u} -> {v} creates a cycle", ln)
            dset.add((u, v))
            directed.append((u, v))
            children[u].add(v)
        else:
            key = frozenset((u, v))
            if key in bset:
                raise GraphError(f"duplicate edge {u} <-> {v}", ln)
            bset.add(key)
            bidirected.append((u, v))

    return MixedGraph(vertices, directed, bidirected)


def serialize_graph(g: MixedGraph) -> str:
    """Canonical text form; ``parse_graph`` round-trips it exactly."""
    lines = []
    if g.vertices:
        lines.append("node " + " ".join(g.vertices))
    for u, v in g.directed_sorted():
        lines.append(f"{u} -> {v}")
    for a, b in g.bidirected_sorted():
        lines.append(f"{a} <-> {b}")
    return "\n".join(lines) + ("\n" if lines else "")
