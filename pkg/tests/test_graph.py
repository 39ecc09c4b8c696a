import pytest

from icid import GraphError, KnownEdges, MixedGraph, parse_graph, serialize_graph
from icid.randgen import random_mixed_graph


def test_parse_basic():
    g = parse_graph("a -> b\nb -> c\nb <-> c")
    assert g.vertices == ("a", "b", "c")
    assert g.directed == {("a", "b"), ("b", "c")}
    assert g.bidirected == {("b", "c")}


def test_parse_empty():
    g = parse_graph("")
    assert g.vertices == ()
    assert g.directed == frozenset() and g.bidirected == frozenset()


def test_parse_cycle_reports_line():
    with pytest.raises(GraphError) as exc:
        parse_graph("a -> b\nb -> a")
    assert exc.value.line == 2
    assert "cycle" in str(exc.value)


def test_parse_longer_cycle():
    with pytest.raises(GraphError) as exc:
        parse_graph("a -> b\nb -> c\nc -> a")
    assert exc.value.line == 3


def test_parse_duplicate_edge():
    with pytest.raises(GraphError) as exc:
        parse_graph("a -> b\na -> b")
    assert exc.value.line == 2 and "duplicate" in str(exc.value)
    with pytest.raises(GraphError):
        parse_graph("a <-> b\nb <-> a")


def test_parse_self_loop():
    with pytest.raises(GraphError):
        parse_graph("a -> a")
    with pytest.raises(GraphError):
        parse_graph("a <-> a")


def test_parse_unknown_token():
    with pytest.raises(GraphError) as exc:
        parse_graph("a => b")
    assert exc.value.line == 1
    with pytest.raises(GraphError):
        parse_graph("a -> b extra")


def test_parse_comments_blank_lines_and_node_order():
    g = parse_graph("# header\nnode c b a\n\na -> b  # trailing\n")
    assert g.vertices == ("c", "b", "a")
    assert g.directed == {("a", "b")}


def test_coexisting_directed_and_bidirected():
    g = parse_graph("x -> y\nx <-> y")
    assert ("x", "y") in g.directed and ("x", "y") in g.bidirected


def test_roundtrip_fixed_graphs():
    texts = [
        "a -> b\nb -> c\nb <-> c",
        "node z1 z2 x1 x2 y\nz1 -> x1\nx1 <-> y",
        "",
    ]
    for text in texts:
        g = parse_graph(text)
        assert parse_graph(serialize_graph(g)) == g


def test_roundtrip_random_graphs():
    for seed in range(25):
        g = random_mixed_graph(10, 0.3, 0.2, seed=seed)
        assert parse_graph(serialize_graph(g)) == g


def test_relatives_kinds(load_graph):
    g = parse_graph("a -> b\nb -> c\nb <-> c")
    assert g.relatives("c", "parents") == ("b",)
    assert g.relatives("a", "descendants") == ("a", "b", "c")
    assert g.relatives("c", "ancestors") == ("a", "b", "c")
    assert g.relatives("b", "siblings") == ("c",)
    with pytest.raises(ValueError):
        g.relatives("a", "cousins")
    with pytest.raises(GraphError):
        g.relatives("zzz", "parents")


def test_relatives_relay_chain(load_graph):
    g = load_graph("relay_chain")
    assert g.siblings("y") == ("a", "x")
    assert g.parents("c") == ("y",)


def test_ancestors_reflexive_and_dual():
    for seed in range(15):
        g = random_mixed_graph(8, 0.3, 0.1, seed=seed)
        for v in g.vertices:
            assert v in g.ancestors(v)
            assert v in g.descendants(v)
        for u in g.vertices:
            for v in g.vertices:
                assert (u in g.ancestors(v)) == (v in g.descendants(u))


def test_sibling_symmetry():
    for seed in range(15):
        g = random_mixed_graph(8, 0.2, 0.3, seed=seed)
        for u in g.vertices:
            for v in g.siblings(u):
                assert u in g.siblings(v)


def test_results_sorted_by_vertex_order():
    g = parse_graph("node d c b a\nb -> a\nc -> a\nd -> a")
    assert g.parents("a") == ("d", "c", "b")


def test_topological_order():
    g = parse_graph("a -> b\nb -> c\na -> c")
    order = g.topological_order()
    assert order is not None
    pos = {v: i for i, v in enumerate(order)}
    for u, v in g.directed:
        assert pos[u] < pos[v]


def test_known_edges_validation():
    g = parse_graph("a -> b")
    KnownEdges.of(("a", "b")).validate(g)
    with pytest.raises(GraphError):
        KnownEdges.of(("b", "a")).validate(g)
    k = KnownEdges.of(("a", "b"))
    assert k.known_parents(g, "b") == ("a",)
    assert k.unknown_parents(g, "b") == ()


def test_constructor_rejects_bad_edges():
    with pytest.raises(GraphError):
        MixedGraph(["a"], directed=[("a", "zz")])
    with pytest.raises(GraphError):
        MixedGraph(["a", "b"], directed=[("a", "b"), ("b", "a")])


def test_rename_and_reorder():
    g = parse_graph("a -> b\na <-> b")
    h = g.rename({"a": "u", "b": "w"})
    assert h.vertices == ("u", "w") and ("u", "w") in h.directed
    r = g.reorder(["b", "a"])
    assert r.vertices == ("b", "a") and r.directed == g.directed
