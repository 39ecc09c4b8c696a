"""Trek-encoding flow graphs over a mixed causal graph.

Two constructions are provided.  The plain flow graph has a top (source) and
a bottom (sink) copy of every vertex; directed paths from a top copy ``s`` to
a bottom copy ``t'`` correspond one-to-one to treks from ``s`` to ``t``, so
path-weight sums encode covariances.  The auxiliary flow graph adds starred
copies ``v*`` and ``v'*``: paths starting at ``v*`` encode the covariances of
the auxiliary variable obtained from ``v`` by subtracting out its known
incoming effects, and bottom edges of known coefficients bypass the starred
sink copy.

Edge labels are symbolic (coefficient identity, error covariance identity, or
unit); the numeric module resolves them against a concrete parameterization.
Graphs are immutable after construction.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

from .graph import GraphError, KnownEdges, MixedGraph

__all__ = ["FlowNode", "WeightedFlowGraph", "build_flow_graph", "build_aux_flow_graph"]

TOP = "top"
TOP_STAR = "top_star"
BOT = "bot"
BOT_STAR = "bot_star"

_SUFFIX = {TOP: "", TOP_STAR: "*", BOT: "'", BOT_STAR: "'*"}

Label = tuple
UNIT: Label = ("unit",)


class FlowNode(NamedTuple):
    base: str
    role: str

    def __str__(self) -> str:
        return self.base + _SUFFIX[self.role]


def lam(parent: str, child: str) -> Label:
    """Label of the structural coefficient on the edge parent -> child."""
    return ("lam", parent, child)


def eps(a: str, b: str, g: MixedGraph) -> Label:
    """Label of an error covariance; unordered, canonicalized by vertex index."""
    if g.index[a] > g.index[b]:
        a, b = b, a
    return ("eps", a, b)


class WeightedFlowGraph:
    """A DAG over role-tagged copies of the original vertices, with labels."""

    def __init__(
        self,
        graph: MixedGraph,
        nodes: list[FlowNode],
        edges: list[tuple[int, int, Label]],
        kind: str,
        known: KnownEdges | None = None,
    ):
        self.graph = graph
        self.kind = kind
        self.known = known if known is not None else KnownEdges()
        self.nodes: tuple[FlowNode, ...] = tuple(nodes)
        self.node_index: dict[FlowNode, int] = {nd: i for i, nd in enumerate(self.nodes)}
        adj: list[list[int]] = [[] for _ in self.nodes]
        labels: dict[tuple[int, int], Label] = {}
        for u, v, w in edges:
            adj[u].append(v)
            labels[(u, v)] = w
        self.adj: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(a)) for a in adj)
        self.labels = labels

    # -- node lookup ----------------------------------------------------

    def idx(self, base: str, role: str = TOP) -> int:
        node = FlowNode(base, role)
        if node not in self.node_index:
            raise GraphError(f"no node {node} in {self.kind} graph")
        return self.node_index[node]

    def top_nodes(self) -> tuple[int, ...]:
        return tuple(
            i for i, nd in enumerate(self.nodes) if nd.role in (TOP, TOP_STAR)
        )

    def num_edges(self) -> int:
        return sum(len(a) for a in self.adj)

    # -- derived adjacencies ---------------------------------------------

    def adjacency(self) -> list[list[int]]:
        return [list(a) for a in self.adj]

    def adjacency_without_edges(self, drop: Iterable[tuple[int, int]]) -> list[list[int]]:
        dropset = set(drop)
        return [
            [v for v in outs if (u, v) not in dropset] for u, outs in enumerate(self.adj)
        ]

    def adjacency_without_in_edges(self, blocked: Iterable[int]) -> list[list[int]]:
        """Adjacency with every edge entering a blocked node removed."""
        bset = set(blocked)
        return [[v for v in outs if v not in bset] for outs in self.adj]

    def ancestors_of(self, target: int, adj: list[list[int]] | None = None) -> set[int]:
        """Nodes with a directed path to ``target`` (reflexive)."""
        if adj is None:
            adj = self.adj  # type: ignore[assignment]
        into: list[list[int]] = [[] for _ in self.nodes]
        for u, outs in enumerate(adj):
            for v in outs:
                into[v].append(u)
        seen = {target}
        stack = [target]
        while stack:
            v = stack.pop()
            for u in into[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return seen

    def label_str(self, u: int, v: int) -> str:
        w = self.labels[(u, v)]
        if w == UNIT:
            return "1"
        if w[0] == "lam":
            return f"l[{w[1]}->{w[2]}]"
        return f"e[{w[1]},{w[2]}]"

    def to_dot(self) -> str:
        lines = [f"digraph {self.kind} {{", "  rankdir=TB;"]
        for nd in self.nodes:
            shape = "circle" if nd.role in (TOP, BOT) else "doublecircle"
            lines.append(f'  "{nd}" [shape={shape}];')
        for u, outs in enumerate(self.adj):
            for v in outs:
                lines.append(
                    f'  "{self.nodes[u]}" -> "{self.nodes[v]}" '
                    f'[label="{self.label_str(u, v)}"];'
                )
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_flow_graph(g: MixedGraph) -> WeightedFlowGraph:
    """The two-layer trek-encoding flow graph.

    Top edges run child to parent (climbing the source side of a trek),
    bottom edges run parent to child, ``v -> v'`` carries the error variance
    and each bidirected pair contributes the two crossing edges.
    """
    n = len(g.vertices)
    nodes = [FlowNode(v, TOP) for v in g.vertices] + [FlowNode(v, BOT) for v in g.vertices]
    ix = {nd: i for i, nd in enumerate(nodes)}
    edges: list[tuple[int, int, Label]] = []
    for i, j in g.directed_sorted():
        w = lam(i, j)
        edges.append((ix[FlowNode(j, TOP)], ix[FlowNode(i, TOP)], w))
        edges.append((ix[FlowNode(i, BOT)], ix[FlowNode(j, BOT)], w))
    for v in g.vertices:
        edges.append((ix[FlowNode(v, TOP)], ix[FlowNode(v, BOT)], eps(v, v, g)))
    for a, b in g.bidirected_sorted():
        w = eps(a, b, g)
        edges.append((ix[FlowNode(a, TOP)], ix[FlowNode(b, BOT)], w))
        edges.append((ix[FlowNode(b, TOP)], ix[FlowNode(a, BOT)], w))
    assert len(edges) == 2 * len(g.directed) + n + 2 * len(g.bidirected)
    return WeightedFlowGraph(g, nodes, edges, kind="flow")


def build_aux_flow_graph(g: MixedGraph, known: KnownEdges | None = None) -> WeightedFlowGraph:
    """The auxiliary flow graph for a set of already-identified coefficients.

    Construction rules, applied to every vertex and edge:

    1. known edge i -> j:   top ``j -> i`` and bottom ``i' -> j'``
    2. unknown edge i -> j: top ``j* -> i`` and bottom ``i' -> j'*``
    3. every vertex i: unit edges ``i -> i*`` and ``i'* -> i'``, plus
       ``i* -> i'`` carrying the error variance
    4. bidirected pair i <-> j: ``i* -> j'*`` and ``j* -> i'*``

    Every vertex receives starred copies whether or not it has known incoming
    edges; with nothing known the construction is path-sum equivalent to the
    plain flow graph once unit edges are collapsed.
    """
    if known is None:
        known = KnownEdges()
    known.validate(g)
    nodes = (
        [FlowNode(v, TOP) for v in g.vertices]
        + [FlowNode(v, TOP_STAR) for v in g.vertices]
        + [FlowNode(v, BOT) for v in g.vertices]
        + [FlowNode(v, BOT_STAR) for v in g.vertices]
    )
    ix = {nd: i for i, nd in enumerate(nodes)}
    edges: list[tuple[int, int, Label]] = []
    for i, j in g.directed_sorted():
        w = lam(i, j)
        if (i, j) in known:
            edges.append((ix[FlowNode(j, TOP)], ix[FlowNode(i, TOP)], w))
            edges.append((ix[FlowNode(i, BOT)], ix[FlowNode(j, BOT)], w))
        else:
            edges.append((ix[FlowNode(j, TOP_STAR)], ix[FlowNode(i, TOP)], w))
            edges.append((ix[FlowNode(i, BOT)], ix[FlowNode(j, BOT_STAR)], w))
    for v in g.vertices:
        edges.append((ix[FlowNode(v, TOP)], ix[FlowNode(v, TOP_STAR)], UNIT))
        edges.append((ix[FlowNode(v, BOT_STAR)], ix[FlowNode(v, BOT)], UNIT))
        edges.append((ix[FlowNode(v, TOP_STAR)], ix[FlowNode(v, BOT)], eps(v, v, g)))
    for a, b in g.bidirected_sorted():
        w = eps(a, b, g)
        edges.append((ix[FlowNode(a, TOP_STAR)], ix[FlowNode(b, BOT_STAR)], w))
        edges.append((ix[FlowNode(b, TOP_STAR)], ix[FlowNode(a, BOT_STAR)], w))
    assert len(edges) == 2 * len(g.directed) + 3 * len(g.vertices) + 2 * len(g.bidirected)
    return WeightedFlowGraph(g, nodes, edges, kind="aux", known=known)
