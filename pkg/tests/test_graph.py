import json
import random

import pytest

from feynmat.errors import ConsistencyError, DomainError, SchemaError
from feynmat.fixtures import load_fixture, load_matrix
from feynmat.graph import (
    Edge, FeynGraph, Momentum, cycle_matroid, extended_incidence, incidence_matrix,
    leg_columns, load_graph, route_momenta, simple_cycles, spanning_trees, two_forests,
)
from feynmat.linalg import is_totally_unimodular, rref
from feynmat.matroid import bases, circuits_of, same_matroid
from oracles import random_connected_graph

TRIANGLE = FeynGraph.build(["1", "2", "3"], [("a", "1", "2"), ("b", "2", "3"), ("c", "3", "1")],
                           [("p1", "1", "q1"), ("p2", "2", "q2"), ("p3", "3", "q3")])
BUBBLE = FeynGraph.build(["1", "2"], [("a", "1", "2"), ("b", "1", "2")],
                         [("p1", "1", "q1"), ("p2", "2", "q2")])


def test_dunce_cap_incidence_matches_literal(dunce):
    inc = incidence_matrix(dunce)
    assert inc == load_matrix("dunce_cap")
    assert inc.labels == ("a", "b", "c", "d")


def test_k33_incidence_reduces_to_bundled_matrix(k33):
    red, _ = rref(incidence_matrix(k33))
    assert red == rref(load_matrix("k33"))[0]


def test_leg_columns_and_extended_incidence(dunce):
    legs = leg_columns(dunce)
    assert legs.labels == ("e1", "e2", "e3")
    assert legs.rows == ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    ext = extended_incidence(dunce)
    assert ext.labels == ("a", "b", "c", "d", "e1", "e2", "e3")


def test_cycle_matroid_examples(dunce):
    m = cycle_matroid(dunce)
    assert m.rank == 2
    assert set(circuits_of(m).circuits) == {frozenset("cd"), frozenset("abc"), frozenset("abd")}
    two = FeynGraph.build("123456", [("a", 1, 2), ("b", 2, 3), ("c", 3, 1),
                                      ("d", 4, 5), ("e", 5, 6), ("f", 6, 4)])
    m2 = cycle_matroid(two)
    assert m2.rank == 4
    assert set(circuits_of(m2).circuits) == {frozenset("abc"), frozenset("def")}


def test_self_loop_is_a_loop_element():
    g = FeynGraph.build(["1", "2"], [("a", "1", "2"), ("t", "2", "2")])
    assert frozenset({"t"}) in circuits_of(cycle_matroid(g)).circuits
    assert frozenset({"t"}) in simple_cycles(g)


def test_circuits_are_cycles_and_bases_are_trees_on_random_graphs():
    rng = random.Random(3)
    for _ in range(25):
        g = random_connected_graph(rng, max_edges=8, max_vertices=5)
        m = cycle_matroid(g)
        assert set(circuits_of(m).circuits) == simple_cycles(g)
        assert bases(m) == spanning_trees(g)
        assert is_totally_unimodular(incidence_matrix(g))


def test_spanning_trees_and_two_forests(dunce):
    assert len(spanning_trees(dunce)) == 5
    assert len(spanning_trees(TRIANGLE)) == 3
    assert len(spanning_trees(BUBBLE)) == 2
    forests = two_forests(dunce)
    assert {tf.edges for tf in forests} == {frozenset("a"), frozenset("b"), frozenset("c"),
                                            frozenset("d")}
    single = FeynGraph.build(["1", "2"], [("a", "1", "2")])
    (only,) = two_forests(single)
    assert only.edges == frozenset() and only.parts == {frozenset("1"), frozenset("2")}
    assert two_forests(FeynGraph.build(["1"], [])) == []


def test_disconnected_graph_has_no_spanning_trees():
    g = FeynGraph.build("1234", [("a", 1, 2), ("b", 3, 4)])
    assert not g.is_connected()
    with pytest.raises(DomainError):
        spanning_trees(g)
    assert cycle_matroid(g).rank == 2


def test_loop_number(big, dunce):
    assert dunce.loop_number() == 2
    assert big.loop_number() == 3


@pytest.mark.parametrize("g", [TRIANGLE, BUBBLE], ids=["triangle", "bubble"])
def test_routing_conserves_momentum(g):
    r = route_momenta(g)
    assert r.check(g)
    assert len(r.loops) == g.loop_number()


def test_routing_on_fixtures(dunce, big):
    r = route_momenta(dunce)
    assert r.check(dunce) and r.loops == ("l1", "l2")
    assert r.relations == {"q3": Momentum.of({"q1": -1, "q2": -1})}
    rb = route_momenta(big)
    assert rb.check(big) and len(rb.loops) == 3


def test_routing_on_random_graphs():
    rng = random.Random(4)
    for _ in range(30):
        g = random_connected_graph(rng, max_edges=8, legs=rng.choice([0, 2, 3]))
        assert route_momenta(g).check(g)


def test_tree_graph_carries_only_external_momenta():
    g = FeynGraph.build("123", [("a", 1, 2), ("b", 2, 3)], [("p", 1, "q1"), ("s", 3, "q2")])
    r = route_momenta(g)
    assert r.loops == ()
    assert r["a"] == Momentum.symbol("q1") and r["b"] == Momentum.symbol("q1")


def test_single_leg_cannot_be_routed():
    g = FeynGraph.build("12", [("a", 1, 2)], [("p", 1, "q1")])
    with pytest.raises(ConsistencyError):
        route_momenta(g)


def test_momentum_algebra():
    k = Momentum.of({"l1": 1, "q1": -2})
    assert str(k) == "l1 - 2*q1"
    assert k - k == Momentum()
    assert (k * 2).as_dict()["q1"] == -4
    assert k.subs({"q1": Momentum.symbol("q2")}) == Momentum.of({"l1": 1, "q2": -2})
    assert str(-Momentum.of({"q1": 1, "l2": 1})) == "-l2 - q1"


def test_reversing_an_edge_keeps_the_matroid(big):
    flipped = FeynGraph(big.vertices, tuple(Edge(e.id, e.head, e.tail, e.mass2)
                                            for e in big.edges), big.externals)
    assert same_matroid(cycle_matroid(big), cycle_matroid(flipped))


def test_json_round_trip(tmp_path, big):
    text = big.to_json()
    assert FeynGraph.from_json(text) == big
    path = tmp_path / "g.json"
    path.write_text(text)
    assert load_graph(path) == big
    massive = FeynGraph.build("12", [("a", 1, 2, "m2")])
    assert FeynGraph.from_dict(massive.to_dict()).masses() == {"a": "m2"}


@pytest.mark.parametrize("doc, needle", [
    ({"edges": []}, "vertices"),
    ({"vertices": ["1"], "edges": [{"id": "a", "tail": "1"}]}, "edges[0]"),
    ({"vertices": ["1"], "edges": [{"id": "a", "tail": "1", "head": "9"}]}, "endpoint"),
    ({"vertices": ["1", "1"], "edges": []}, "distinct"),
    ({"vertices": ["1"], "edges": [], "externals": [{"id": "x", "vertex": "1"}]}, "externals[0]"),
    ([1, 2], "object"),
])
def test_schema_errors(doc, needle):
    with pytest.raises(SchemaError, match=needle.replace("[", r"\[").replace("]", r"\]")):
        FeynGraph.from_dict(doc)


def test_bad_json_reports_line():
    with pytest.raises(SchemaError, match="line 2"):
        FeynGraph.from_json('{"vertices": [],\n "edges": [}')


def test_bundled_fixtures_parse():
    for name in ("dunce_cap", "big_example", "k33"):
        g = load_fixture(name)
        assert g.is_connected()
        assert json.loads(g.to_json())["vertices"] == list(g.vertices)
