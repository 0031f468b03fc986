"""Bounded k-shortest path enumeration and the path catalog indexes."""

import io
import random
from fractions import Fraction

import pytest

from conftest import make_graph, make_instance, random_connected_edges
from wdmplan.pathgen import (build_catalog, dump_paths, k_shortest_bounded,
                             load_paths)


def triangle_graph():
    return make_graph([("e1", "a", "b", 100), ("e2", "b", "c", 100),
                       ("e3", "a", "c", 300)])


def test_triangle_order_detour_first():
    g = triangle_graph()
    paths = k_shortest_bounded(g, "a", "c", 50, 750)
    assert [(p.edges, p.length_km) for p in paths] == [
        (("e1", "e2"), Fraction(200)),
        (("e3",), Fraction(300)),
    ]
    assert paths[0].nodes == ("a", "b", "c")
    assert paths[0].interior == ("b",)


def test_triangle_tight_bound_cuts_direct_edge():
    g = triangle_graph()
    paths = k_shortest_bounded(g, "a", "c", 50, 250)
    assert [p.edges for p in paths] == [("e1", "e2")]


def test_k_limits_count():
    g = triangle_graph()
    paths = k_shortest_bounded(g, "a", "c", 1, 750)
    assert [p.edges for p in paths] == [("e1", "e2")]


def test_unreachable_within_bound_is_empty():
    g = make_graph([("e1", "a", "b", 800)])
    assert k_shortest_bounded(g, "a", "b", 5, 750) == []


def test_argument_errors():
    g = triangle_graph()
    with pytest.raises(ValueError, match="coincide"):
        k_shortest_bounded(g, "a", "a", 3, 100)
    with pytest.raises(ValueError, match="unknown node"):
        k_shortest_bounded(g, "a", "zz", 3, 100)
    with pytest.raises(ValueError, match="k must be"):
        k_shortest_bounded(g, "a", "b", 0, 100)


def all_simple_paths(graph, i, j, bound):
    """Exhaustive reference enumeration, ascending (length, edge ids)."""
    out = []

    def extend(node, eids, nids, length):
        if node == j:
            out.append((length, eids))
            return
        for e in graph.incident(node):
            w = e.other(node)
            if w in nids:
                continue
            nl = length + e.length_km
            if nl > bound:
                continue
            extend(w, eids + (e.id,), nids + (w,), nl)

    extend(i, (), (i,), Fraction(0))
    out.sort()
    return out


def test_matches_exhaustive_enumeration():
    rng = random.Random(29)
    for _ in range(40):
        n = rng.randint(3, 8)
        _, edges = random_connected_edges(rng, n, rng.randint(0, 5))
        g = make_graph(edges)
        i, j = (f"n{a}" for a in rng.sample(range(n), 2))
        bound = Fraction(rng.randint(150, 1300))
        k = rng.randint(1, 12)
        ref = all_simple_paths(g, i, j, bound)
        got = k_shortest_bounded(g, i, j, k, bound)
        assert [(p.length_km, p.edges) for p in got] == ref[:k]


def test_deterministic_across_runs():
    rng = random.Random(5)
    _, edges = random_connected_edges(rng, 7, 4)
    g = make_graph(edges)
    a = k_shortest_bounded(g, "n0", "n6", 8, 1200)
    b = k_shortest_bounded(g, "n0", "n6", 8, 1200)
    assert a == b


def test_parallel_edges_are_distinct_paths():
    g = make_graph([("e1", "a", "b", 100), ("e2", "a", "b", 100),
                    ("e3", "a", "b", 120)])
    paths = k_shortest_bounded(g, "a", "b", 5, 500)
    assert [p.edges for p in paths] == [("e1",), ("e2",), ("e3",)]


def test_catalog_indexes():
    inst = make_instance(
        [("e1", "a", "b", 100), ("e2", "b", "c", 100), ("e3", "a", "c", 300)],
        pops=("a", "b", "c"), demands=(("a", "c", 5),),
        max_paths_per_pair=5, max_path_km=750)
    cat = build_catalog(inst)
    assert set(cat.pair_paths) == {("a", "b"), ("a", "c"), ("b", "c")}
    assert len(cat) == sum(len(v) for v in cat.pair_paths.values())
    # global ids follow pair order
    assert [cat.index(p) for p in cat.paths] == list(range(len(cat)))
    for node in "abc":
        ends = cat.endpoint_paths(node)
        through = cat.paths_through(node)
        assert set(ends) <= set(through)
        for p in ends:
            assert node in p.ends
        for p in through:
            assert node in p.nodes
    for eid in ("e1", "e2", "e3"):
        for p in cat.paths_on_edge(eid):
            assert eid in p.edges
    # cross check the edge index against a full scan
    for eid in ("e1", "e2", "e3"):
        expect = [p for p in cat.paths if eid in p.edges]
        assert list(cat.paths_on_edge(eid)) == expect
    assert cat.empty_pairs() == ()


def test_catalog_flags_empty_pairs():
    inst = make_instance(
        [("e1", "a", "b", 100), ("e2", "b", "c", 900)],
        pops=("a", "c"), demands=(("a", "c", 1),),
        max_paths_per_pair=3, max_path_km=500)
    cat = build_catalog(inst)
    assert cat.empty_pairs() == (("a", "c"),)


def test_dump_load_round_trip():
    rng = random.Random(17)
    _, edges = random_connected_edges(rng, 6, 3)
    pops = ("n0", "n2", "n5")
    inst = make_instance(edges, pops=pops, demands=(("n0", "n5", 4),),
                         max_paths_per_pair=4, max_path_km=1100)
    cat = build_catalog(inst)
    buf = io.StringIO()
    dump_paths(cat, buf)
    buf.seek(0)
    again = load_paths(buf, inst.graph)
    assert again.pair_paths == cat.pair_paths


def test_load_rejects_corrupt_lines():
    g = triangle_graph()
    with pytest.raises(ValueError, match="ends at"):
        load_paths(io.StringIO("a c 100 e1\n"), g)
    with pytest.raises(ValueError, match="recomputed"):
        load_paths(io.StringIO("a c 999 e1 e2\n"), g)
