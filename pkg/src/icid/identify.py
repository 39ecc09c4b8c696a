"""Identification criteria for directed coefficients and their drivers.

Three single-target-node criteria are implemented on top of the flow-graph
machinery:

* ``instrumental_subsets``: the largest parent subset of a node that admits a
  full instrumental set, found as a match-block on the plain flow graph.
* ``avs``: the same search on the auxiliary flow graph, so previously
  identified coefficients can clean candidate instruments.
* ``ic``: the instrumental-cutset criterion.  Instead of requiring the
  instruments to match the parents directly, it routes them through the
  minimum vertex cut closest to the parents; parents match-blocked behind
  the cut become identifiable even when no instrumental set exists.

``icid`` and ``avsid`` iterate their criterion over all vertices until no new
coefficient is identified.  Every identified coefficient is certified by a
determinant-ratio witness over covariance minors, checkable numerically and
re-checkable combinatorially via two max-flow queries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .flowgraph import (
    BOT,
    BOT_STAR,
    TOP,
    TOP_STAR,
    WeightedFlowGraph,
    build_aux_flow_graph,
    build_flow_graph,
)
from .graph import KnownEdges, MixedGraph
from .matchblock import max_match_block
from .maxflow import flow_and_closest_cut, max_vertex_flow

__all__ = [
    "Certificate",
    "IdentificationResult",
    "SubsumptionRecord",
    "InternalInvariantError",
    "instrumental_subsets",
    "avs",
    "ic",
    "icid",
    "avsid",
    "subsumption_check",
    "certificate_flow_conditions",
]

PLAIN = "plain"
STAR = "star"

_ROLE_TO_TOP = {PLAIN: TOP, STAR: TOP_STAR}


class InternalInvariantError(AssertionError):
    """A structural guarantee of the algorithms failed; indicates a bug."""


@dataclass(frozen=True)
class Certificate:
    """Witness that ``target`` is identifiable from the covariance matrix.

    The recovered value is a ratio of covariance-minor determinants with
    rows ``sources`` (starred rows are auxiliary rows, i.e. the plain row
    minus the known incoming contributions of that vertex) and columns
    ``sinks`` plus a final column.  ``corrections`` lists the already-known
    parent coefficients of the target's head whose minors are subtracted
    from the numerator.  ``known`` snapshots the identified set at emission
    time; starred source rows subtract exactly those edges.
    """

    target: tuple[str, str]
    method: str
    sources: tuple[tuple[str, str], ...]
    sinks: tuple[str, ...]
    corrections: tuple[tuple[str, str], ...]
    known: frozenset[tuple[str, str]]
    formula: str

    def __post_init__(self):
        if len(self.sources) != len(self.sinks) + 1:
            raise InternalInvariantError(
                f"certificate for {self.target} needs one more source than sinks"
            )
        if self.target[0] in self.sinks:
            raise InternalInvariantError("certificate target cannot be its own sink")


@dataclass(frozen=True)
class IdentificationResult:
    certificates: tuple[Certificate, ...]
    known_after: KnownEdges
    iterations: int

    @property
    def identified(self) -> tuple[tuple[str, str], ...]:
        return tuple(c.target for c in self.certificates)


@dataclass(frozen=True)
class CriterionResult:
    """Output of one criterion applied to one target node."""

    sources: tuple[tuple[str, str], ...]
    sinks: tuple[str, ...]
    identified: tuple[str, ...]
    certificates: tuple[Certificate, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class SubsumptionRecord:
    avs_identified: frozenset[tuple[str, str]]
    ic_identified: frozenset[tuple[str, str]]

    @property
    def strict(self) -> bool:
        return self.avs_identified < self.ic_identified


def _role_name(node_role: str) -> str:
    return STAR if node_role == TOP_STAR else PLAIN

def _source_tuple(fg: WeightedFlowGraph, idxs: Sequence[int]) -> tuple[tuple[str, str], ...]:
    pairs = [(fg.nodes[i].base, _role_name(fg.nodes[i].role)) for i in idxs]
    order = fg.graph.index
    return tuple(sorted(pairs, key=lambda p: (order[p[0]], p[1] == STAR)))


def _render_formula(
    target: tuple[str, str],
    sources: tuple[tuple[str, str], ...],
    sinks: tuple[str, ...],
    corrections: tuple[tuple[str, str], ...],
) -> str:
    x, y = target
    rows = ",".join(v + ("*" if role == STAR else "") for v, role in sources)

    def minor(last: str) -> str:
        cols = ",".join(list(sinks) + [last])
        return f"det Sigma[{rows} ; {cols}]"

    num = minor(y)
    for w, _ in corrections:
        num += f" - lam[{w}->{y}]*{minor(w)}"
    if corrections:
        num = f"({num})"
    return f"lam[{x}->{y}] = {num} / {minor(x)}"


def _make_certificate(
    g: MixedGraph,
    method: str,
    target: tuple[str, str],
    sources: tuple[tuple[str, str], ...],
    sink_bases: Sequence[str],
    known: KnownEdges,
) -> Certificate:
    x, y = target
    sinks = g.sort_vertices(t for t in sink_bases if t != x)
    corrections = tuple(
        (w, y) for w in g.sort_vertices(p for p in g.parents(y) if (p, y) in known)
    )
    return Certificate(
        target=target,
        method=method,
        sources=sources,
        sinks=sinks,
        corrections=corrections,
        known=frozenset(known.edges),
        formula=_render_formula(target, sources, sinks, corrections),
    )


def _aux_sources_and_sinks(
    ga: WeightedFlowGraph, y: str
) -> tuple[list[int], list[int]]:
    """Admissible source nodes and unknown-parent sink nodes for target ``y``.

    Sources are top nodes (plain or starred) that cannot reach the starred
    sink copy of ``y`` once the parent edges into it are cut, which excludes
    everything with a confounding back-channel to ``y``.  On top of that,
    nothing that ``y`` itself can influence is allowed: no source may reach
    the plain top copy of ``y``, and ``y``'s own starred copy is banned.  The
    reachability runs in the auxiliary graph, so a vertex whose only paths
    from ``y`` or its siblings enter through already-known edges remains
    admissible in starred form.
    """
    g = ga.graph
    y_bs = ga.idx(y, BOT_STAR)
    t_idx = [ga.idx(p, BOT) for p in ga.known.unknown_parents(g, y)]
    if not t_idx:
        return [], []
    adj_y = ga.adjacency_without_edges((t, y_bs) for t in t_idx)
    excluded = ga.ancestors_of(y_bs, adj_y)
    excluded |= ga.ancestors_of(ga.idx(y, TOP))
    excluded.add(ga.idx(y, TOP_STAR))
    return [i for i in ga.top_nodes() if i not in excluded], t_idx


def instrumental_subsets(g: MixedGraph, y: str) -> CriterionResult:
    """Maximal match-block between candidate instruments and parents of ``y``
    on the plain flow graph.

    Candidates are the source nodes with a trek to ``y`` that are not
    descendants of ``y`` or of any of its siblings.  Matched parents have
    their coefficients into ``y`` identifiable by a plain instrumental set.
    """
    g._check_vertex(y)
    fg = build_flow_graph(g)
    t_idx = [fg.idx(p, BOT) for p in g.parents(y)]
    if not t_idx:
        return CriterionResult((), (), ())
    reach_y = fg.ancestors_of(fg.idx(y, BOT))
    banned = set(g.descendants([y, *g.siblings(y)]))
    s_idx = [
        i for i in fg.top_nodes() if i in reach_y and fg.nodes[i].base not in banned
    ]
    mb = max_match_block(fg.adj, s_idx, t_idx)
    sources = _source_tuple(fg, mb.sources)
    matched = g.sort_vertices(fg.nodes[i].base for i in mb.sinks)
    none = KnownEdges()
    certs = tuple(
        _make_certificate(g, "IS", (x, y), sources, matched, none) for x in matched
    )
    return CriterionResult(sources, matched, matched, certs)


def _avs_on(ga: WeightedFlowGraph, y: str) -> CriterionResult:
    g, known = ga.graph, ga.known
    s_idx, t_idx = _aux_sources_and_sinks(ga, y)
    if not s_idx or not t_idx:
        return CriterionResult((), (), ())
    mb = max_match_block(ga.adj, s_idx, t_idx)
    sources = _source_tuple(ga, mb.sources)
    matched = g.sort_vertices(ga.nodes[i].base for i in mb.sinks)
    certs = tuple(
        _make_certificate(g, "AVS", (x, y), sources, matched, known) for x in matched
    )
    return CriterionResult(sources, matched, matched, certs)


def avs(g: MixedGraph, y: str, known: KnownEdges | None = None) -> CriterionResult:
    """Instrumental subsets over the auxiliary flow graph.

    Identical to ``instrumental_subsets`` except that auxiliary source
    copies may serve as instruments and the sinks are only the still-unknown
    parents of ``y``."""
    g._check_vertex(y)
    return _avs_on(build_aux_flow_graph(g, known), y)


def _ic_on(ga: WeightedFlowGraph, y: str) -> CriterionResult:
    g, known = ga.graph, ga.known
    s_idx, t_idx = _aux_sources_and_sinks(ga, y)
    if not s_idx or not t_idx:
        return CriterionResult((), (), ())
    flow, cut_res = flow_and_closest_cut(ga.adj, s_idx, t_idx)
    cut = cut_res.cut
    if not cut:
        return CriterionResult((), (), ())
    if flow.value != len(cut):
        raise InternalInvariantError("max flow must equal min cut size")
    adj_nocut = ga.adjacency_without_in_edges(cut)
    mb = max_match_block(adj_nocut, cut, t_idx)
    sources = _source_tuple(ga, flow.saturated_sources)
    sat_bases = g.sort_vertices(ga.nodes[i].base for i in flow.saturated_sinks)
    matched = g.sort_vertices(ga.nodes[i].base for i in mb.sinks)
    if not set(mb.sinks) <= set(flow.saturated_sinks):
        raise InternalInvariantError("match-blocked parents must carry flow")
    certs = tuple(
        _make_certificate(g, "IC", (x, y), sources, sat_bases, known) for x in matched
    )
    return CriterionResult(sources, sat_bases, matched, certs)


def ic(g: MixedGraph, y: str, known: KnownEdges | None = None) -> CriterionResult:
    """Instrumental-cutset identification of coefficients into ``y``.

    Routes admissible sources through the minimum vertex cut closest to the
    unknown-parent sinks, then match-blocks from the cut to the sinks in the
    graph with all edges entering the cut removed.  Match-blocked parents
    are identifiable: the full flow pins the denominator minor while the cut
    guarantees that, with the target edge removed, no rerouted full flow to
    ``y`` exists.  Certificate sources and sink completions are read off one
    deterministic max flow from the sources to the sinks.
    """
    g._check_vertex(y)
    return _ic_on(build_aux_flow_graph(g, known), y)


def _fixpoint(g: MixedGraph, criterion_on, seed_known: KnownEdges | None) -> IdentificationResult:
    known = seed_known if seed_known is not None else KnownEdges()
    known.validate(g)
    certificates: list[Certificate] = []
    iterations = 0
    ga = build_aux_flow_graph(g, known)
    while True:
        iterations += 1
        progressed = False
        for y in g.vertices:
            if not known.unknown_parents(g, y):
                continue
            res = criterion_on(ga, y)
            if res.identified:
                certificates.extend(res.certificates)
                known = known.union((x, y) for x in res.identified)
                ga = build_aux_flow_graph(g, known)
                progressed = True
        if not progressed:
            break
    return IdentificationResult(tuple(certificates), known, iterations)


def icid(g: MixedGraph, seed_known: KnownEdges | None = None) -> IdentificationResult:
    """Fixpoint of ``ic`` over all vertices in input order.

    Newly identified coefficients feed later targets within the same sweep;
    sweeps repeat until one identifies nothing.  Deterministic for a fixed
    vertex order."""
    return _fixpoint(g, _ic_on, seed_known)


def avsid(g: MixedGraph, seed_known: KnownEdges | None = None) -> IdentificationResult:
    """Fixpoint of ``avs`` over all vertices in input order."""
    return _fixpoint(g, _avs_on, seed_known)


def subsumption_check(
    g: MixedGraph, seed_known: KnownEdges | None = None
) -> SubsumptionRecord:
    """Run both fixpoints and check that everything AVS identifies is also
    identified by the cutset criterion.  A violation is a bug, not a property
    of the input."""
    seed = seed_known.edges if seed_known is not None else frozenset()
    rec = SubsumptionRecord(
        avs_identified=frozenset(avsid(g, seed_known).known_after.edges) - seed,
        ic_identified=frozenset(icid(g, seed_known).known_after.edges) - seed,
    )
    if not rec.avs_identified <= rec.ic_identified:
        raise InternalInvariantError(
            f"AVS identified {sorted(rec.avs_identified - rec.ic_identified)} "
            "which the cutset criterion missed"
        )
    return rec


def certificate_flow_conditions(g: MixedGraph, cert: Certificate) -> bool:
    """Direct combinatorial re-check of a certificate.

    Condition 1: a full flow from the sources onto sinks plus the target's
    tail exists in the auxiliary graph.  Condition 2: with the tail's edge to
    the target head's starred sink removed, no full flow onto sinks plus that
    starred sink exists."""
    x, y = cert.target
    ga = build_aux_flow_graph(g, KnownEdges(cert.known))
    s_idx = [ga.idx(v, _ROLE_TO_TOP[role]) for v, role in cert.sources]
    t_idx = [ga.idx(t, BOT) for t in cert.sinks]
    k = len(s_idx)
    cond1 = max_vertex_flow(ga.adj, s_idx, t_idx + [ga.idx(x, BOT)]).value == k
    y_bs = ga.idx(y, BOT_STAR)
    adj2 = ga.adjacency_without_edges([(ga.idx(x, BOT), y_bs)])
    cond2 = max_vertex_flow(adj2, s_idx, t_idx + [y_bs]).value < k
    return cond1 and cond2
