"""Numeric side: simulated parameterizations, implied covariances, brute-force
path oracles, and certificate verification.

Identification claims are checked against simulation: draw random generic
coefficients, compute the implied covariance exactly, and confirm that the
certificate's determinant-ratio formula recovers the true coefficient to
relative tolerance on several independent draws.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .flowgraph import BOT, TOP, UNIT, FlowNode, WeightedFlowGraph
from .graph import KnownEdges, MixedGraph
from .identify import Certificate, IdentificationResult

__all__ = [
    "Parameterization",
    "CovarianceMatrix",
    "CertificateCheck",
    "DegenerateDenominator",
    "OracleBudgetExceeded",
    "random_parameterization",
    "covariance",
    "trek_sum_oracle",
    "gvl_det_oracle",
    "numeric_rank",
    "verify_certificate",
    "verify_chained",
]


class DegenerateDenominator(RuntimeError):
    """The denominator minor vanished; non-generic draw or invalid witness."""


class OracleBudgetExceeded(RuntimeError):
    """Path enumeration would exceed the configured combinatorial budget."""


@dataclass(frozen=True)
class Parameterization:
    """Concrete coefficient matrices for a mixed graph.

    ``lam[i, j]`` is the coefficient on the directed edge ``vertices[i] ->
    vertices[j]`` and is zero off the edge set; ``omega`` is symmetric with
    nonzeros exactly on bidirected pairs and the diagonal, and is positive
    definite by construction."""

    graph: MixedGraph
    lam: np.ndarray
    omega: np.ndarray

    def edge_value(self, u: str, v: str) -> float:
        return float(self.lam[self.graph.index[u], self.graph.index[v]])


@dataclass(frozen=True)
class CovarianceMatrix:
    """Implied covariance plus one auxiliary row per vertex.

    ``aux_rows[v]`` is the covariance of ``v`` minus the known incoming
    contributions, i.e. ``sigma[v] - sum lam[j, v] * sigma[j]`` over known
    edges ``j -> v``."""

    sigma: np.ndarray
    aux_rows: dict[str, np.ndarray]


@dataclass(frozen=True)
class CertificateCheck:
    passed: bool
    worst_rel_err: float
    trials: int


def random_parameterization(g: MixedGraph, seed: int) -> Parameterization:
    """Generic coefficients drawn reproducibly from ``seed``.

    Directed coefficients and confounding covariances are uniform on
    +-[0.1, 1.0]; each error variance exceeds its row's absolute off-diagonal
    sum by uniform [1, 2], which forces positive definiteness."""
    rng = np.random.default_rng(seed)
    n = len(g.vertices)
    lam = np.zeros((n, n))
    omega = np.zeros((n, n))
    nd, nb = len(g.directed), len(g.bidirected)
    d_vals = rng.uniform(0.1, 1.0, size=nd) * np.where(rng.random(nd) < 0.5, 1.0, -1.0)
    b_vals = rng.uniform(0.1, 1.0, size=nb) * np.where(rng.random(nb) < 0.5, 1.0, -1.0)
    for (u, v), val in zip(g.directed_sorted(), d_vals):
        lam[g.index[u], g.index[v]] = val
    for (a, b), val in zip(g.bidirected_sorted(), b_vals):
        omega[g.index[a], g.index[b]] = val
        omega[g.index[b], g.index[a]] = val
    np.fill_diagonal(omega, np.abs(omega).sum(axis=1) + rng.uniform(1.0, 2.0, size=n))
    return Parameterization(g, lam, omega)


def covariance(p: Parameterization, known: KnownEdges | None = None) -> CovarianceMatrix:
    """Implied covariance of the linear model, via two triangular solves.

    In topological order ``I - Lam^T`` is unit lower triangular, hence never
    singular for a DAG.  Auxiliary rows are built for every vertex when a
    known set is supplied (they reduce to plain rows otherwise)."""
    g = p.graph
    n = len(g.vertices)
    if n == 0:
        return CovarianceMatrix(np.zeros((0, 0)), {})
    topo = g.topological_order()
    assert topo is not None
    perm = np.array([g.index[v] for v in topo])
    m = np.eye(n) - p.lam[np.ix_(perm, perm)].T
    omega_p = p.omega[np.ix_(perm, perm)]
    y = solve_triangular(m, omega_p, lower=True)
    sigma_p = solve_triangular(m, y.T, lower=True).T
    sigma = np.empty((n, n))
    sigma[np.ix_(perm, perm)] = sigma_p
    sigma = (sigma + sigma.T) / 2.0
    aux_rows = {}
    if known is not None:
        aux_rows = {v: _aux_row(g, sigma, v, known, p.edge_value) for v in g.vertices}
    return CovarianceMatrix(sigma, aux_rows)


def _aux_row(
    g: MixedGraph,
    sigma: np.ndarray,
    v: str,
    known: KnownEdges,
    value_of: Callable[[str, str], float],
) -> np.ndarray:
    row = sigma[g.index[v]].copy()
    for j in known.known_parents(g, v):
        row -= value_of(j, v) * sigma[g.index[j]]
    return row


def _resolve(label: tuple, p: Parameterization) -> float:
    if label == UNIT:
        return 1.0
    kind, a, b = label
    ia, ib = p.graph.index[a], p.graph.index[b]
    return float(p.lam[ia, ib]) if kind == "lam" else float(p.omega[ia, ib])


def _count_paths(fg: WeightedFlowGraph, src: int, dst: int) -> int:
    counts = [0] * len(fg.nodes)
    counts[dst] = 1
    # reverse topological order of a DAG laid out in arbitrary index order
    order = _topo_order(fg.adj)
    for u in reversed(order):
        if u != dst:
            counts[u] = sum(counts[v] for v in fg.adj[u])
    return counts[src]


def _topo_order(adj: Sequence[Sequence[int]]) -> list[int]:
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
    assert len(order) == n, "flow graph must be acyclic"
    return order


def trek_sum_oracle(
    fg: WeightedFlowGraph,
    p: Parameterization,
    src: FlowNode,
    dst: FlowNode,
    max_paths: int = 10**6,
) -> float:
    """Sum over all directed ``src -> dst`` paths of the product of resolved
    edge weights.  Refuses instances with more than ``max_paths`` paths."""
    s, t = fg.node_index[src], fg.node_index[dst]
    if _count_paths(fg, s, t) > max_paths:
        raise OracleBudgetExceeded(f"more than {max_paths} paths from {src} to {dst}")
    total = 0.0
    stack: list[tuple[int, float]] = [(s, 1.0)]
    while stack:
        u, prod = stack.pop()
        if u == t:
            total += prod
            continue
        for v in fg.adj[u]:
            stack.append((v, prod * _resolve(fg.labels[(u, v)], p)))
    return total


def gvl_det_oracle(
    fg: WeightedFlowGraph,
    p: Parameterization,
    rows: Sequence[FlowNode],
    cols: Sequence[FlowNode],
    max_steps: int = 10**6,
) -> float:
    """Signed sum over systems of vertex-disjoint paths from ``rows`` onto
    ``cols``; equals the determinant of the corresponding covariance minor.

    The sign of a system is the parity of the induced permutation of
    ``cols``.  Small instances only; guarded by ``max_steps``."""
    if len(rows) != len(cols):
        raise ValueError("row and column sets must have equal size")
    src = [fg.node_index[a] for a in rows]
    dst = [fg.node_index[b] for b in cols]
    dst_pos = {d: i for i, d in enumerate(dst)}
    steps = 0
    total = 0.0

    def parity(assignment: list[int]) -> int:
        inv = sum(
            1
            for i in range(len(assignment))
            for j in range(i + 1, len(assignment))
            if assignment[i] > assignment[j]
        )
        return -1 if inv % 2 else 1

    def extend(i: int, used: set[int], assignment: list[int], prod: float) -> None:
        nonlocal steps, total
        if i == len(src):
            total += parity(assignment) * prod
            return
        # walk all paths from src[i] avoiding used vertices
        def walk(u: int, acc: float, used: set[int]) -> None:
            nonlocal steps, total
            steps += 1
            if steps > max_steps:
                raise OracleBudgetExceeded("disjoint path system budget exceeded")
            if u in dst_pos and dst_pos[u] not in assignment:
                extend(i + 1, used, assignment + [dst_pos[u]], acc)
            for v in fg.adj[u]:
                if v not in used:
                    used.add(v)
                    walk(v, acc * _resolve(fg.labels[(u, v)], p), used)
                    used.remove(v)

        u0 = src[i]
        if u0 not in used:
            used.add(u0)
            walk(u0, prod, used)
            used.remove(u0)

    extend(0, set(), [], 1.0)
    return total


def numeric_rank(m: np.ndarray, rtol: float = 1e-9) -> int:
    """Rank by singular values above ``rtol`` times the largest."""
    if m.size == 0:
        return 0
    svals = np.linalg.svd(m, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0
    return int(np.sum(svals > rtol * svals[0]))


def _certificate_value(
    g: MixedGraph,
    sigma: np.ndarray,
    cert: Certificate,
    value_of: Callable[[str, str], float],
) -> float:
    """Evaluate the determinant-ratio formula against one covariance."""
    known = KnownEdges(cert.known)
    rows = []
    for v, role in cert.sources:
        if role == "star":
            rows.append(_aux_row(g, sigma, v, known, value_of))
        else:
            rows.append(sigma[g.index[v]])
    rmat = np.array(rows)
    x, y = cert.target
    sink_cols = [g.index[t] for t in cert.sinks]

    def minor_det(last: str) -> float:
        return float(np.linalg.det(rmat[:, sink_cols + [g.index[last]]]))

    den_mat = rmat[:, sink_cols + [g.index[x]]]
    den = float(np.linalg.det(den_mat))
    hadamard = float(np.prod(np.linalg.norm(den_mat, axis=1))) if den_mat.size else 1.0
    if abs(den) < 1e-12 * max(1.0, hadamard):
        raise DegenerateDenominator(
            f"denominator minor of {cert.target} is numerically singular"
        )
    num = minor_det(y)
    for w, _ in cert.corrections:
        num -= value_of(w, y) * minor_det(w)
    return num / den


def verify_certificate(
    g: MixedGraph,
    cert: Certificate,
    trials: int = 3,
    tol: float = 1e-6,
    seed: int = 0,
) -> CertificateCheck:
    """Check a certificate against ``trials`` independent simulated models.

    Known coefficients (corrections and starred-row subtractions) take their
    true simulated values, emulating exact knowledge from earlier stages.
    Passes when the relative error stays within ``tol`` on every trial;
    raises ``DegenerateDenominator`` on a vanishing denominator minor."""
    return verify_certificates(g, [cert], trials=trials, tol=tol, seed=seed)[0]


def verify_certificates(
    g: MixedGraph,
    certs: Sequence[Certificate],
    trials: int = 3,
    tol: float = 1e-6,
    seed: int = 0,
) -> list[CertificateCheck]:
    """Batch form of ``verify_certificate``: the simulated models are shared
    across certificates, trial seeds and verdicts are identical."""
    worst = [0.0] * len(certs)
    for t in range(trials):
        p = random_parameterization(g, seed + t)
        sigma = covariance(p).sigma
        for i, cert in enumerate(certs):
            got = _certificate_value(g, sigma, cert, p.edge_value)
            true = p.edge_value(*cert.target)
            worst[i] = max(worst[i], abs(got - true) / max(abs(true), 1e-12))
    return [
        CertificateCheck(passed=w <= tol, worst_rel_err=w, trials=trials) for w in worst
    ]


def verify_chained(
    g: MixedGraph,
    result: IdentificationResult,
    trials: int = 3,
    tol: float = 1e-4,
    seed: int = 0,
) -> CertificateCheck:
    """End-to-end verification that chains recovered values.

    Certificates are replayed in discovery order; corrections and starred
    rows consume previously *recovered* values instead of true ones, so
    recovery error may compound, hence the looser default tolerance.  Edges
    known before the first certificate (the seed set) take true values."""
    seeded = frozenset(result.known_after.edges) - {c.target for c in result.certificates}
    worst = 0.0
    for t in range(trials):
        p = random_parameterization(g, seed + t)
        sigma = covariance(p).sigma
        recovered = {e: p.edge_value(*e) for e in seeded}

        def value_of(u: str, v: str) -> float:
            return recovered[(u, v)]

        for cert in result.certificates:
            got = _certificate_value(g, sigma, cert, value_of)
            recovered[cert.target] = got
            true = p.edge_value(*cert.target)
            worst = max(worst, abs(got - true) / max(abs(true), 1e-12))
    return CertificateCheck(passed=worst <= tol, worst_rel_err=worst, trials=trials)
