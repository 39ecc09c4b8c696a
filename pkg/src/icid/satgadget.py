"""Exactly-one-true 3SAT gadget graphs and bounded brute-force searchers.

``build_sat_graph`` encodes a CNF formula as a mixed graph in which a
trek-separation instrumental witness (tsIV) for the first clause coefficient
exists exactly when the formula has an assignment with one true literal per
clause.  ``brute_force_tsiv`` searches for such witnesses by bounded subset
enumeration and ``brute_force_1in3sat`` decides the formula directly, so the
two sides of the reduction can be compared at desk scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .flowgraph import BOT, TOP, build_flow_graph
from .graph import GraphError, KnownEdges, MixedGraph
from .maxflow import max_vertex_flow

__all__ = [
    "CnfError",
    "CnfFormula",
    "TsivWitness",
    "TsivBudgetExceeded",
    "parse_cnf",
    "build_sat_graph",
    "brute_force_1in3sat",
    "brute_force_tsiv",
]

Literal = tuple[str, bool]


class CnfError(ValueError):
    """Malformed CNF input or a formula the gadget cannot encode."""


class TsivBudgetExceeded(RuntimeError):
    """Subset enumeration hit the configured budget before completing."""

    def __init__(self, examined: int):
        self.examined = examined
        super().__init__(f"budget exceeded after examining {examined} candidate pairs")


@dataclass(frozen=True)
class CnfFormula:
    """Clauses of literals ``(variable, positive)``.

    The gadget construction requires preprocessed clauses: no variable may
    appear twice within one clause (neither repeated nor with both signs).
    """

    clauses: tuple[tuple[Literal, ...], ...]

    def variables(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for clause in self.clauses:
            for var, _ in clause:
                seen.setdefault(var)
        return tuple(sorted(seen))

    def is_preprocessed(self) -> bool:
        return all(
            len({var for var, _ in clause}) == len(clause) for clause in self.clauses
        )

    def preprocess(self) -> "CnfFormula":
        """Simplify repeated literals and complementary pairs within clauses.

        A literal repeated inside a clause can never be the single true one,
        so its variable is forced false everywhere.  A clause holding both a
        literal and its negation always contains exactly one true among the
        pair, so the clause drops and its remaining literals are forced
        false.  Forcing propagates: a clause containing the negation of a
        false literal is satisfied by it, dropping the clause and forcing
        its other literals false in turn."""
        clauses = [list(c) for c in self.clauses]
        false_lits: set[Literal] = set()

        def force_false(lit: Literal) -> None:
            if lit not in false_lits:
                false_lits.add(lit)

        changed = True
        while changed:
            changed = False
            next_clauses: list[list[Literal]] = []
            for clause in clauses:
                lits = [l for l in clause if l not in false_lits]
                if any((var, not pos) in false_lits for var, pos in lits):
                    # one literal is known true; the rest must be false
                    for var, pos in lits:
                        if ((var, not pos)) not in false_lits:
                            force_false((var, pos))
                    changed = True
                    continue
                counts: dict[Literal, int] = {}
                for l in lits:
                    counts[l] = counts.get(l, 0) + 1
                repeated = [l for l, c in counts.items() if c > 1]
                if repeated:
                    for l in repeated:
                        force_false(l)
                    changed = True
                    lits = [l for l in lits if l not in false_lits]
                comp = {
                    (var, pos)
                    for var, pos in lits
                    if (var, not pos) in {(v, p) for v, p in lits}
                }
                if comp:
                    for l in lits:
                        if l not in comp:
                            force_false(l)
                    changed = True
                    continue  # clause always satisfied by the pair
                if len(lits) != len(clause):
                    changed = True
                if not lits:
                    raise CnfError("a clause emptied during preprocessing; no assignment exists")
                next_clauses.append(lits)
            clauses = next_clauses
        return CnfFormula(tuple(tuple(c) for c in clauses))


def parse_cnf(text: str) -> CnfFormula:
    """One clause per line; literals are names or ``!name``, whitespace
    separated; ``#`` starts a comment."""
    clauses: list[tuple[Literal, ...]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lits: list[Literal] = []
        for tok in line.split():
            positive = not tok.startswith("!")
            name = tok[1:] if not positive else tok
            if not name or not name.isidentifier():
                raise CnfError(f"line {ln}: bad literal {tok!r}")
            lits.append((name, positive))
        clauses.append(tuple(lits))
    return CnfFormula(tuple(clauses))


def _interacts(li: Literal, lj: Literal) -> bool:
    return li[0] == lj[0]


def build_sat_graph(f: CnfFormula) -> MixedGraph:
    """Gadget graph for a preprocessed formula.

    Starting from target node ``y``: every clause ``i`` contributes ``xi``
    with ``xi -> y`` and ``xi <-> y``; every literal slot ``(i, j)``
    contributes ``zij``/``wij`` with ``wij -> zij``, ``wij <-> y`` and
    ``zij -> xk`` for every clause node; two slots of one clause are linked
    ``zij <-> wik``; slots of different clauses are linked ``zij <-> wmn``
    when the slot literals are complementary, when the first slot's literal
    recurs elsewhere in the second clause, or when any other slots of the
    two clauses carry complementary literals."""
    if not f.clauses:
        raise CnfError("empty formula")
    if not f.is_preprocessed():
        raise CnfError("formula must be preprocessed (repeated variable in a clause)")
    k = len(f.clauses)
    xs = [f"x{i + 1}" for i in range(k)]
    vertices = ["y"] + xs
    zs: dict[tuple[int, int], str] = {}
    ws: dict[tuple[int, int], str] = {}
    for i, clause in enumerate(f.clauses):
        for j in range(len(clause)):
            zs[(i, j)] = f"z{i + 1}{j + 1}"
            ws[(i, j)] = f"w{i + 1}{j + 1}"
            vertices += [zs[(i, j)], ws[(i, j)]]
    directed: list[tuple[str, str]] = [(x, "y") for x in xs]
    bidirected: list[tuple[str, str]] = [(x, "y") for x in xs]
    for i, clause in enumerate(f.clauses):
        for j in range(len(clause)):
            directed.append((ws[(i, j)], zs[(i, j)]))
            bidirected.append((ws[(i, j)], "y"))
            directed += [(zs[(i, j)], x) for x in xs]
    for i, clause in enumerate(f.clauses):
        for j in range(len(clause)):
            for jj in range(len(clause)):
                if j != jj:
                    bidirected.append((zs[(i, j)], ws[(i, jj)]))
    for i, ci in enumerate(f.clauses):
        for m, cm in enumerate(f.clauses):
            if i == m:
                continue
            for j, lj in enumerate(ci):
                for n, ln_ in enumerate(cm):
                    var_j, pos_j = lj
                    var_n, pos_n = ln_
                    rule_a = var_j == var_n and pos_j != pos_n
                    rule_b = any(
                        q != n and cm[q] == lj for q in range(len(cm))
                    )
                    rule_c = any(
                        p != j
                        and q != n
                        and ci[p][0] == cm[q][0]
                        and ci[p][1] != cm[q][1]
                        for p in range(len(ci))
                        for q in range(len(cm))
                    )
                    if rule_a or rule_b or rule_c:
                        key = (zs[(i, j)], ws[(m, n)])
                        if key not in bidirected:
                            bidirected.append(key)
    return MixedGraph(vertices, directed, bidirected)


def brute_force_1in3sat(f: CnfFormula, max_vars: int = 20) -> dict[str, bool] | None:
    """First assignment (in lexicographic variable order, False before True)
    with exactly one true literal per clause, or None."""
    variables = f.variables()
    if len(variables) > max_vars:
        raise CnfError(f"formula has more than {max_vars} variables")
    if not f.clauses:
        return {}
    for bits in range(2 ** len(variables)):
        assignment = {
            v: bool((bits >> (len(variables) - 1 - i)) & 1)
            for i, v in enumerate(variables)
        }
        if all(
            sum(assignment[var] == pos for var, pos in clause) == 1
            for clause in f.clauses
        ):
            return assignment
    return None


@dataclass(frozen=True)
class TsivWitness:
    """Sets certifying a trek-separation instrumental witness for an edge."""

    sources: tuple[str, ...]
    sinks: tuple[str, ...]
    k: int


def _path_matrix(fg, adj: Sequence[Sequence[int]], rng: np.random.Generator) -> np.ndarray:
    """Path-sum matrix of a flow graph under one random edge weighting.

    Entry (i, j) sums, over all directed paths from the top copy of vertex i
    to the bottom copy of vertex j, the product of the weights drawn for the
    path's edges.  For generic weights the rank of any (rows, columns) minor
    equals the max vertex-capacity flow between those top and bottom copies,
    so minors of this matrix decide flow conditions in bulk.
    """
    g = fg.graph
    n = len(g.vertices)
    m = len(fg.nodes)
    # signed weights keep the minors well-conditioned (all-positive path sums
    # make columns nearly collinear and their determinants hard to classify)
    weights = {
        (u, v): rng.uniform(0.5, 1.5) * (1.0 if rng.random() < 0.5 else -1.0)
        for u, outs in enumerate(adj)
        for v in outs
    }
    mat = np.zeros((n, n))
    order = _topo(adj)
    for i, s in enumerate(g.vertices):
        acc = np.zeros(m)
        acc[fg.idx(s, TOP)] = 1.0
        for u in order:
            if acc[u] != 0.0:
                for v in adj[u]:
                    acc[v] += acc[u] * weights[(u, v)]
        for j, t in enumerate(g.vertices):
            mat[i, j] = acc[fg.idx(t, BOT)]
    return mat


def _batched_nonsingular(mat: np.ndarray, combos: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Boolean mask over row combinations: square minor numerically nonsingular.

    Columns are normalized first, then |det| is compared against the
    Hadamard bound of the minor; rank-deficient minors are exact zeros up to
    roundoff while generic full-rank ones sit many orders above ``rtol``.
    """
    mat = mat / np.maximum(np.linalg.norm(mat, axis=0, keepdims=True), 1e-300)
    minors = mat[combos]  # (n_combos, k, k)
    dets = np.abs(np.linalg.det(minors))
    norms = np.linalg.norm(minors, axis=2)
    hadamard = np.prod(norms, axis=1)
    return dets > rtol * np.maximum(hadamard, 1e-300)


def brute_force_tsiv(
    g: MixedGraph,
    target: tuple[str, str],
    known: KnownEdges | None = None,
    max_k: int = 4,
    budget: int = 200_000_000,
) -> TsivWitness | None:
    """Bounded exhaustive search for a tsIV witness for ``target``.

    A witness is a pair ``(S, T)`` with ``|S| == |T| + 1 == k`` such that the
    sink set avoids descendants of the target head, a full flow runs from
    ``S`` onto the sink copies of ``T`` plus the target tail, and no full
    flow onto ``T`` plus the target head survives once the target's and the
    already-known parents' sink edges into the head are removed.

    Pairs are enumerated by size, then lexicographically by vertex index
    (sink set major, source set minor), and the first witness found is
    returned.  Candidate pairs are screened in bulk through the rank/flow
    duality: minors of randomly weighted path matrices decide both flow
    conditions, vectorized over all source sets of one sink set.  Survivors
    are confirmed by exact max-flow computations before being returned, so a
    reported witness always satisfies the flow conditions exactly.  (A
    screening false negative would require a generic minor to cancel to
    below one part in 10^9 under a fixed random weighting.)

    Raises ``TsivBudgetExceeded`` once more than ``budget`` candidate pairs
    have been examined.
    """
    x, y = target
    if (x, y) not in g.directed:
        raise GraphError(f"target edge {x} -> {y} not in graph")
    known = known if known is not None else KnownEdges()
    known.validate(g)
    fg = build_flow_graph(g)
    n = len(g.vertices)
    bot = {v: fg.idx(v, BOT) for v in g.vertices}
    tops_all = [fg.idx(v, TOP) for v in g.vertices]

    y_bot = bot[y]
    removed = {(bot[x], y_bot)}
    removed |= {(bot[w], y_bot) for w in known.known_parents(g, y) if w != x}
    adj_full = fg.adjacency()
    adj_mod = fg.adjacency_without_edges(removed)

    rng = np.random.default_rng(0x5EED)
    mat_full = _path_matrix(fg, adj_full, rng)
    mat_mod = _path_matrix(fg, adj_mod, rng)

    def confirm(s_set: tuple[str, ...], t_set: tuple[str, ...], k: int) -> bool:
        s_tops = [fg.idx(s, TOP) for s in s_set]
        a_sinks = [bot[t] for t in t_set] + [bot[x]]
        if max_vertex_flow(adj_full, s_tops, a_sinks).value < k:
            return False
        b_sinks = [bot[t] for t in t_set] + [y_bot]
        return max_vertex_flow(adj_mod, s_tops, b_sinks).value < k

    de_y = set(g.descendants(y))
    t_cand = [v for v in g.vertices if v not in (x, y) and v not in de_y]
    names = list(g.vertices)
    examined = 0
    for k in range(1, max_k + 1):
        if len(t_cand) < k - 1 or n < k:
            break
        s_combos = np.array(list(combinations(range(n), k)), dtype=np.intp)
        for t_set in combinations(t_cand, k - 1):
            t_cols = [g.index[t] for t in t_set]
            a_cols = t_cols + [g.index[x]]
            if np.linalg.matrix_rank(mat_full[:, a_cols]) < k:
                continue  # no source set can fully cover these sinks
            examined += len(s_combos)
            if examined > budget:
                raise TsivBudgetExceeded(examined)
            b_cols = t_cols + [g.index[y]]
            cond1 = _batched_nonsingular(mat_full[:, a_cols], s_combos)
            if np.linalg.matrix_rank(mat_mod[:, b_cols]) < k:
                candidates = np.nonzero(cond1)[0]
            else:
                cond2 = ~_batched_nonsingular(mat_mod[:, b_cols], s_combos)
                candidates = np.nonzero(cond1 & cond2)[0]
            for idx in candidates:
                s_set = tuple(names[i] for i in s_combos[idx])
                if confirm(s_set, t_set, k):
                    return TsivWitness(sources=s_set, sinks=tuple(t_set), k=k)
    return None


def _topo(adj: Sequence[Sequence[int]]) -> list[int]:
    n = len(adj)
    indeg = [0] * n
    for outs in adj:
        for v in outs:
            indeg[v] += 1
    stack = [u for u in range(n) if indeg[u] == 0]
    order = []
    while stack:
        u = stack.pop()
        order.append(u)
        for v in adj[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    return order
