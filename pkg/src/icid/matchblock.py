"""Maximal match-blocks between source and sink sets of a DAG.

A pair ``(S_m, T_m)`` with ``|S_m| == |T_m| == k`` is a match-block when a
full vertex-disjoint flow of size k runs from ``S_m`` onto ``T_m`` and every
sink-set vertex reachable from a member of ``S_m`` already lies in ``T_m``.
A sink with zero flow in any max flow can belong to no match-block, and
neither can its source-side ancestors; iterating that removal to a fixpoint
keeps every match-block intact, so the surviving sink set contains the sink
set of every match-block of the instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .maxflow import FlowResult, max_vertex_flow

__all__ = ["MatchBlock", "max_match_block"]


@dataclass(frozen=True)
class MatchBlock:
    """Result of the fixpoint.  ``sources``/``sinks`` are index tuples of
    equal size, paired by ``witness_flow``; both are themselves a match-block
    and ``sinks`` is the union of the sink sets of all match-blocks."""

    sources: tuple[int, ...]
    sinks: tuple[int, ...]
    witness_flow: FlowResult


def _ancestors(adj: Sequence[Sequence[int]], of: set[int]) -> set[int]:
    """Reflexive ancestors within the supplied DAG."""
    into: list[list[int]] = [[] for _ in adj]
    for u, outs in enumerate(adj):
        for v in outs:
            into[v].append(u)
    seen = set(of)
    stack = list(of)
    while stack:
        v = stack.pop()
        for u in into[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def max_match_block(
    adj: Sequence[Sequence[int]], sources: Sequence[int], sinks: Sequence[int]
) -> MatchBlock:
    """Fixpoint of: run a max flow, drop zero-flow sinks and all their
    source-side ancestors.  Ancestry is taken in ``adj`` itself, not in any
    originating causal graph.

    The returned sources are the saturated sources of the final witness flow,
    a deterministic choice among the maximal match-block pairings.
    """
    s = list(dict.fromkeys(sources))
    t = list(dict.fromkeys(sinks))
    flow = max_vertex_flow(adj, s, t)
    while True:
        saturated = set(flow.saturated_sinks)
        dropped = [v for v in t if v not in saturated]
        if not dropped:
            break
        anc = _ancestors(adj, set(dropped))
        t = [v for v in t if v in saturated]
        s = [v for v in s if v not in anc]
        flow = max_vertex_flow(adj, s, t)
    return MatchBlock(
        sources=flow.saturated_sources,
        sinks=tuple(sorted(t)),
        witness_flow=flow,
    )
