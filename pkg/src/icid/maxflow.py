"""Vertex-capacity max flow and closest-to-sink minimum vertex cuts on DAGs.

Every vertex (sources and sinks included) has capacity one, realized by the
standard in/out splitting transform; real edges and the virtual super
source/sink arcs get effectively infinite capacity so that minimum cuts
consist of split arcs only, i.e. of vertices.  Augmenting paths are found by
BFS with neighbors explored in index order, which makes flow decompositions,
saturated sets and cuts deterministic functions of the input ordering.

Vertices are integers ``0..n-1``; the graph is an adjacency list (out
neighbors).  Callers working with named graphs translate at the boundary.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "FlowResult",
    "VertexCut",
    "max_vertex_flow",
    "closest_min_vertex_cut",
    "flow_and_closest_cut",
]


@dataclass(frozen=True)
class FlowResult:
    """A max flow together with its vertex-disjoint path decomposition.

    ``paths`` are original-vertex sequences from a source to a sink; a vertex
    that is both source and sink yields the single-vertex path ``(v,)``.
    """

    value: int
    paths: tuple[tuple[int, ...], ...]
    saturated_sources: tuple[int, ...]
    saturated_sinks: tuple[int, ...]


@dataclass(frozen=True)
class VertexCut:
    """A minimum vertex cut; removing ``cut`` disconnects sources from sinks."""

    cut: tuple[int, ...]


class _SplitNetwork:
    """Arc-based residual network over the split graph.

    Arc storage is the usual paired layout: arc ``2i`` and its reverse
    ``2i + 1``.  Internal arcs (v_in -> v_out) have capacity 1, everything
    else capacity n + 2 which no unit flow can saturate.
    """

    def __init__(self, adj: Sequence[Sequence[int]], sources: Sequence[int], sinks: Sequence[int]):
        n = len(adj)
        self.n = n
        self.super_source = 2 * n
        self.super_sink = 2 * n + 1
        head: list[int] = []
        cap: list[int] = []
        out: list[list[int]] = [[] for _ in range(2 * n + 2)]
        big = n + 2
        # arc pairs: forward at even index, reverse at odd
        self.internal = []
        for v in range(n):
            i = len(head)
            self.internal.append(i)
            head += [2 * v + 1, 2 * v]
            cap += [1, 0]
            out[2 * v].append(i)
            out[2 * v + 1].append(i + 1)
        for u in range(n):
            for v in adj[u]:
                i = len(head)
                head += [2 * v, 2 * u + 1]
                cap += [big, 0]
                out[2 * u + 1].append(i)
                out[2 * v].append(i + 1)
        for s in sorted(sources):
            i = len(head)
            head += [2 * s, self.super_source]
            cap += [big, 0]
            out[self.super_source].append(i)
            out[2 * s].append(i + 1)
        for t in sorted(sinks):
            i = len(head)
            head += [self.super_sink, 2 * t + 1]
            cap += [big, 0]
            out[2 * t + 1].append(i)
            out[self.super_sink].append(i + 1)
        self.head = head
        self.cap = cap
        self.out = out

    def bfs_augment(self) -> bool:
        """One shortest augmenting path; neighbor order follows arc insertion
        order, which follows vertex index order."""
        prev_arc = [-1] * (2 * self.n + 2)
        prev_arc[self.super_source] = -2
        queue = deque([self.super_source])
        while queue:
            u = queue.popleft()
            if u == self.super_sink:
                break
            for i in self.out[u]:
                v = self.head[i]
                if self.cap[i] > 0 and prev_arc[v] == -1:
                    prev_arc[v] = i
                    queue.append(v)
        if prev_arc[self.super_sink] == -1:
            return False
        v = self.super_sink
        while v != self.super_source:
            i = prev_arc[v]
            self.cap[i] -= 1
            self.cap[i ^ 1] += 1
            v = self.head[i ^ 1]
        return True

    def run(self) -> int:
        value = 0
        while self.bfs_augment():
            value += 1
        return value

    def flow_on(self, arc: int) -> int:
        return self.cap[arc ^ 1]

    def decompose(self) -> list[tuple[int, ...]]:
        """Walk unit flows from the super source; vertex capacities make the
        resulting paths vertex-disjoint."""
        used = [False] * len(self.head)
        paths = []
        for i in self.out[self.super_source]:
            if i % 2 == 0 and self.flow_on(i) > 0:
                path = []
                u = self.head[i]
                while u != self.super_sink:
                    if u % 2 == 0:
                        path.append(u // 2)
                    nxt = None
                    for j in self.out[u]:
                        if j % 2 == 0 and not used[j] and self.flow_on(j) > 0:
                            nxt = j
                            break
                    assert nxt is not None, "flow conservation violated"
                    used[nxt] = True
                    u = self.head[nxt]
                paths.append(tuple(path))
        return paths


def max_vertex_flow(
    adj: Sequence[Sequence[int]], sources: Sequence[int], sinks: Sequence[int]
) -> FlowResult:
    """Max flow with unit vertex capacities from ``sources`` to ``sinks``.

    Equals the maximum number of vertex-disjoint source-to-sink paths; a
    vertex lying in both sets contributes the zero-length path ``(v,)``.
    """
    net = _SplitNetwork(adj, sources, sinks)
    value = net.run()
    paths = net.decompose()
    assert len(paths) == value
    return FlowResult(
        value=value,
        paths=tuple(paths),
        saturated_sources=tuple(sorted(p[0] for p in paths)),
        saturated_sinks=tuple(sorted(p[-1] for p in paths)),
    )


def closest_min_vertex_cut(
    adj: Sequence[Sequence[int]], sources: Sequence[int], sinks: Sequence[int]
) -> VertexCut:
    """The unique minimum vertex cut closest to the sinks.

    Computed from the final residual network: take the set of nodes that can
    still reach the super sink, and collect the saturated split arcs crossing
    into it.  That set is the sink-side extreme element of the min-cut
    lattice, so for every min cut C' the result satisfies
    ``C subseteq C' union De(C')``.
    """
    net = _SplitNetwork(adj, sources, sinks)
    value = net.run()
    return _cut_from_residual(net, value)


def flow_and_closest_cut(
    adj: Sequence[Sequence[int]], sources: Sequence[int], sinks: Sequence[int]
) -> tuple[FlowResult, VertexCut]:
    """One network run serving both queries; identical to calling
    ``max_vertex_flow`` and ``closest_min_vertex_cut`` separately."""
    net = _SplitNetwork(adj, sources, sinks)
    value = net.run()
    cut = _cut_from_residual(net, value)
    paths = net.decompose()
    assert len(paths) == value
    flow = FlowResult(
        value=value,
        paths=tuple(paths),
        saturated_sources=tuple(sorted(p[0] for p in paths)),
        saturated_sinks=tuple(sorted(p[-1] for p in paths)),
    )
    return flow, cut


def _cut_from_residual(net: _SplitNetwork, value: int) -> VertexCut:
    # Nodes that reach the super sink in the residual graph, found by walking
    # residual arcs backwards from the sink.
    into: list[list[int]] = [[] for _ in range(2 * net.n + 2)]
    for i, v in enumerate(net.head):
        if net.cap[i] > 0:
            into[v].append(i ^ 1)  # arc i: head[i^1] -> v with residual room
    co_reach = [False] * (2 * net.n + 2)
    co_reach[net.super_sink] = True
    queue = deque([net.super_sink])
    while queue:
        v = queue.popleft()
        for j in into[v]:
            u = net.head[j]
            if not co_reach[u]:
                co_reach[u] = True
                queue.append(u)
    cut = []
    for v in range(net.n):
        arc = net.internal[v]
        if net.flow_on(arc) == 1 and co_reach[2 * v + 1] and not co_reach[2 * v]:
            cut.append(v)
    assert len(cut) == value, "cut size must equal max-flow value"
    return VertexCut(cut=tuple(cut))
