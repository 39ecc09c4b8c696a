import numpy as np
import pytest

from icid import (
    Certificate,
    DegenerateDenominator,
    FlowNode,
    KnownEdges,
    OracleBudgetExceeded,
    build_aux_flow_graph,
    build_flow_graph,
    covariance,
    gvl_det_oracle,
    icid,
    max_vertex_flow,
    numeric_rank,
    parse_graph,
    random_parameterization,
    trek_sum_oracle,
    verify_certificate,
    verify_chained,
)
from icid.flowgraph import BOT, TOP, TOP_STAR
from icid.randgen import random_mixed_graph


def test_parameterization_deterministic():
    g = random_mixed_graph(8, 0.3, 0.2, seed=1)
    p1 = random_parameterization(g, 42)
    p2 = random_parameterization(g, 42)
    assert np.array_equal(p1.lam, p2.lam) and np.array_equal(p1.omega, p2.omega)
    p3 = random_parameterization(g, 43)
    assert not np.array_equal(p1.lam, p3.lam)


def test_parameterization_supports():
    g = random_mixed_graph(8, 0.3, 0.2, seed=5)
    p = random_parameterization(g, 0)
    for i, u in enumerate(g.vertices):
        for j, v in enumerate(g.vertices):
            if (u, v) in g.directed:
                assert 0.1 <= abs(p.lam[i, j]) <= 1.0
            else:
                assert p.lam[i, j] == 0.0
            if i != j:
                if g.has_bidirected(u, v):
                    assert 0.1 <= abs(p.omega[i, j]) <= 1.0
                else:
                    assert p.omega[i, j] == 0.0


def test_omega_diagonal_without_confounders():
    g = random_mixed_graph(6, 0.4, 0.0, seed=2)
    p = random_parameterization(g, 9)
    assert np.array_equal(p.omega, np.diag(np.diag(p.omega)))
    assert np.all(np.diag(p.omega) >= 1.0) and np.all(np.diag(p.omega) <= 2.0)


def test_omega_positive_definite():
    for seed in range(20):
        g = random_mixed_graph(7, 0.3, 0.4, seed=seed)
        p = random_parameterization(g, seed)
        np.linalg.cholesky(p.omega)  # raises if not PD


def test_covariance_of_chain_with_confounding(load_graph):
    g = load_graph("iv_chain")
    p = random_parameterization(g, 3)
    cov = covariance(p)
    i = g.index
    lab, lbc = p.edge_value("a", "b"), p.edge_value("b", "c")
    eaa, ebb = p.omega[i["a"], i["a"]], p.omega[i["b"], i["b"]]
    ebc = p.omega[i["b"], i["c"]]
    assert np.isclose(cov.sigma[i["b"], i["c"]], lab * eaa * lab * lbc + ebb * lbc + ebc)


def test_covariance_without_directed_edges_is_omega():
    g = parse_graph("a <-> b\nnode a b c")
    p = random_parameterization(g, 1)
    cov = covariance(p)
    assert np.allclose(cov.sigma, p.omega)


def test_covariance_symmetric_and_pd():
    for seed in range(10):
        g = random_mixed_graph(5, 0.4, 0.3, seed=seed)
        p = random_parameterization(g, seed + 100)
        s = covariance(p).sigma
        assert np.max(np.abs(s - s.T)) < 1e-12
        np.linalg.cholesky(s)


def test_aux_row_identity():
    g = parse_graph("a -> b\nb -> c\na <-> b")
    known = KnownEdges.of(("a", "b"))
    p = random_parameterization(g, 7)
    cov = covariance(p, known)
    i = g.index
    expect = cov.sigma[i["b"]] - p.edge_value("a", "b") * cov.sigma[i["a"]]
    assert np.allclose(cov.aux_rows["b"], expect)
    assert np.allclose(cov.aux_rows["a"], cov.sigma[i["a"]])


def test_trek_sum_matches_covariance_entries():
    for seed in range(6):
        g = random_mixed_graph(5, 0.4, 0.3, seed=seed)
        p = random_parameterization(g, seed)
        sig = covariance(p).sigma
        fg = build_flow_graph(g)
        for s in g.vertices:
            for t in g.vertices:
                got = trek_sum_oracle(fg, p, FlowNode(s, TOP), FlowNode(t, BOT))
                assert np.isclose(got, sig[g.index[s], g.index[t]], rtol=1e-9), (s, t)


def test_trek_sum_single_vertex():
    g = parse_graph("node a")
    p = random_parameterization(g, 0)
    fg = build_flow_graph(g)
    got = trek_sum_oracle(fg, p, FlowNode("a", TOP), FlowNode("a", BOT))
    assert np.isclose(got, p.omega[0, 0])


def test_trek_sum_on_aux_graph_and_star_rows():
    for seed in range(6):
        g = random_mixed_graph(5, 0.4, 0.3, seed=seed)
        edges = sorted(g.directed)
        known = KnownEdges(frozenset(edges[: len(edges) // 2]))
        p = random_parameterization(g, seed + 50)
        cov = covariance(p, known)
        ga = build_aux_flow_graph(g, known)
        for s in g.vertices:
            for t in g.vertices:
                plain = trek_sum_oracle(ga, p, FlowNode(s, TOP), FlowNode(t, BOT))
                assert np.isclose(plain, cov.sigma[g.index[s], g.index[t]], rtol=1e-9)
                star = trek_sum_oracle(ga, p, FlowNode(s, TOP_STAR), FlowNode(t, BOT))
                assert np.isclose(star, cov.aux_rows[s][g.index[t]], rtol=1e-9)


def test_aux_star_row_on_known_chain(load_graph):
    # with the first edge known, the starred source drops exactly that trek
    g = parse_graph("a -> b\nb -> c\na <-> b")
    known = KnownEdges.of(("a", "b"))
    p = random_parameterization(g, 21)
    sig = covariance(p).sigma
    ga = build_aux_flow_graph(g, known)
    got = trek_sum_oracle(ga, p, FlowNode("b", TOP_STAR), FlowNode("c", BOT))
    i = g.index
    expect = sig[i["b"], i["c"]] - p.edge_value("a", "b") * sig[i["a"], i["c"]]
    assert np.isclose(got, expect, rtol=1e-9)


def test_trek_sum_budget():
    # a dense chain has exponentially many paths if every pair is connected
    g = random_mixed_graph(12, 1.0, 1.0, seed=0)
    p = random_parameterization(g, 0)
    fg = build_flow_graph(g)
    with pytest.raises(OracleBudgetExceeded):
        trek_sum_oracle(fg, p, FlowNode("v0", TOP), FlowNode("v11", BOT), max_paths=10)


def test_gvl_single_pair_reduces_to_trek_sum(load_graph):
    g = load_graph("iv_chain")
    p = random_parameterization(g, 4)
    fg = build_flow_graph(g)
    a = gvl_det_oracle(fg, p, [FlowNode("a", TOP)], [FlowNode("c", BOT)])
    b = trek_sum_oracle(fg, p, FlowNode("a", TOP), FlowNode("c", BOT))
    assert np.isclose(a, b)


def test_gvl_zero_when_no_full_system():
    # disconnected vertices: b has no path to c', so {a,b} cannot cover {a',c'}
    g = parse_graph("node a b c")
    p = random_parameterization(g, 4)
    fg = build_flow_graph(g)
    val = gvl_det_oracle(
        fg, p, [FlowNode("a", TOP), FlowNode("b", TOP)], [FlowNode("a", BOT), FlowNode("c", BOT)]
    )
    assert val == 0.0
    sig = covariance(p).sigma
    i = g.index
    assert np.isclose(np.linalg.det(sig[np.ix_([i["a"], i["b"]], [i["a"], i["c"]])]), 0.0)


def test_gvl_matches_minor_determinants():
    rng = np.random.default_rng(0)
    for seed in range(8):
        g = random_mixed_graph(5, 0.4, 0.3, seed=seed + 200)
        p = random_parameterization(g, seed)
        sig = covariance(p).sigma
        fg = build_flow_graph(g)
        names = g.vertices
        for _ in range(6):
            k = int(rng.integers(1, 4))
            rows = sorted(rng.choice(len(names), size=k, replace=False).tolist())
            cols = sorted(rng.choice(len(names), size=k, replace=False).tolist())
            got = gvl_det_oracle(
                fg,
                p,
                [FlowNode(names[i], TOP) for i in rows],
                [FlowNode(names[j], BOT) for j in cols],
            )
            want = np.linalg.det(sig[np.ix_(rows, cols)])
            assert abs(got - want) <= 1e-9 * max(1.0, abs(want)), (seed, rows, cols)


def test_rank_of_minor_equals_flow_value():
    rng = np.random.default_rng(1)
    for seed in range(12):
        g = random_mixed_graph(8, 0.3, 0.2, seed=seed + 300)
        p = random_parameterization(g, seed)
        sig = covariance(p).sigma
        fg = build_flow_graph(g)
        n = len(g.vertices)
        for _ in range(8):
            ks = int(rng.integers(1, 5))
            kt = int(rng.integers(1, 5))
            rows = sorted(rng.choice(n, size=ks, replace=False).tolist())
            cols = sorted(rng.choice(n, size=kt, replace=False).tolist())
            flow = max_vertex_flow(
                fg.adj,
                [fg.idx(g.vertices[i], TOP) for i in rows],
                [fg.idx(g.vertices[j], BOT) for j in cols],
            ).value
            assert numeric_rank(sig[np.ix_(rows, cols)]) == flow


def test_verify_rejects_forged_bow_certificate(load_graph):
    g = load_graph("bow")
    forged = Certificate(
        target=("x", "y"),
        method="IC",
        sources=(("x", "plain"),),
        sinks=(),
        corrections=(),
        known=frozenset(),
        formula="forged",
    )
    check = verify_certificate(g, forged, trials=3, tol=1e-6, seed=8)
    assert not check.passed and check.worst_rel_err > 1e-2


def test_verify_degenerate_denominator():
    # the source has no trek to the denominator column, so the minor vanishes
    g = parse_graph("x -> y\nnode z x y")
    cert = Certificate(
        target=("x", "y"),
        method="IC",
        sources=(("z", "plain"),),
        sinks=(),
        corrections=(),
        known=frozenset(),
        formula="degenerate",
    )
    with pytest.raises(DegenerateDenominator):
        verify_certificate(g, cert, trials=1, tol=1e-6, seed=0)


def test_verify_and_chain_on_fixture_results(load_graph):
    g = load_graph("relay_chain")
    result = icid(g)
    for cert in result.certificates:
        assert verify_certificate(g, cert, trials=3, tol=1e-6, seed=31).passed
    chained = verify_chained(g, result, trials=3, tol=1e-4, seed=77)
    assert chained.passed


def test_chained_uses_recovered_values(load_graph):
    # corrupting one certificate must surface in (at least) the chained check;
    # the bogus instrument has an open back-path, so its ratio is wrong
    g = load_graph("relay_chain")
    result = icid(g)
    bad = list(result.certificates)
    first = bad[0]
    assert first.target == ("b", "x")
    bad[0] = Certificate(
        target=first.target,
        method=first.method,
        sources=(("y", "plain"),),
        sinks=first.sinks,
        corrections=first.corrections,
        known=first.known,
        formula=first.formula,
    )
    from icid import IdentificationResult

    corrupted = IdentificationResult(tuple(bad), result.known_after, result.iterations)
    try:
        check = verify_chained(g, corrupted, trials=3, tol=1e-4, seed=5)
        assert not check.passed
    except DegenerateDenominator:
        pass
