import random
from fractions import Fraction

import pytest
import sympy

from feynmat.errors import ConsistencyError, DomainError, IntegrityError, StateError
from feynmat.fixtures import load_matrix
from feynmat.graph import FeynGraph, Momentum, cycle_matroid, route_momenta
from feynmat.linalg import ExactMatrix
from feynmat.matroid import RepresentedMatroid, circuits_of, contract, same_matroid
from feynmat.poly import Poly
from feynmat.reduce import (
    DotPair, circuits_after_coextension, coextend_pair, expand_dot_product, normalize_to_IC,
    pair_redundant, reduce_graph, reduce_matrix, safe_combine, scalarize,
)
from oracles import brute_circuits, random_connected_graph, random_pairs

VACUUM_SUNRISE = FeynGraph.build("12", [("a", "1", "2"), ("b", "1", "2"), ("c", "1", "2")])
TRIANGLE = FeynGraph.build(["1", "2", "3"],
                           [("a", "1", "2", "ma"), ("b", "2", "3"), ("c", "3", "1")],
                           [("p1", "1", "q1"), ("p2", "2", "q2"), ("p3", "3", "q3")])
FIGURE_EIGHT = FeynGraph.build("123", [("a", 1, 2), ("b", 2, 1), ("c", 2, 3), ("d", 3, 2)])


def sets(*cs):
    return {frozenset(c) for c in cs}


def test_safe_combine():
    assert safe_combine([1, 1, 0], [1, 0, 1], 0) == [0, 1, -1]
    assert safe_combine([1, -1, 0], [-1, 0, 1], 0) == [0, -1, 1]
    with pytest.raises(IntegrityError, match="U\\(2,4\\)"):
        safe_combine([1, 1, 1], [1, 1, -1], 0)
    with pytest.raises(DomainError):
        safe_combine([0, 1], [1, 1], 0)
    with pytest.raises(DomainError):
        safe_combine([2, 1], [1, 1], 0)
    with pytest.raises(DomainError):
        safe_combine([1], [1, 1], 0)


def test_normalize_k33(k33):
    assert normalize_to_IC(k33) == load_matrix("k33_reduced")
    assert normalize_to_IC(load_matrix("k33_reduced")) == load_matrix("k33_reduced")


def test_normalize_keeps_matroid_on_random_graphs():
    rng = random.Random(31)
    for _ in range(25):
        g = random_connected_graph(rng, max_edges=8)
        m = normalize_to_IC(g)
        n = m.nrows
        assert m.select(m.labels[:n]) == ExactMatrix.identity(n, m.labels[:n])
        assert all(x in (-1, 0, 1) for r in m.rows for x in r)
        assert same_matroid(m, cycle_matroid(g))


def test_normalize_detects_non_binary_matrix():
    with pytest.raises(IntegrityError):
        normalize_to_IC(ExactMatrix.from_rows([[1, 1, 1], [1, 1, -1]], ["x", "y", "z"]))


def test_coextension_of_k33_both_signs():
    reduced = load_matrix("k33_reduced")
    m, info = coextend_pair(reduced, "7", "8", label="n")
    assert m == load_matrix("k33_coext_second") and info.case == 1
    m, info = coextend_pair(reduced, "7", "8", sign=-1, label="n")
    assert m == load_matrix("k33_coext_first") and info.case == 1
    assert same_matroid(contract(RepresentedMatroid(m), "n"), reduced)


def test_coextension_when_pair_touches_the_identity_block():
    reduced = load_matrix("k33_reduced")
    for i, j in (("1", "7"), ("1", "2"), ("2", "6")):
        m, info = coextend_pair(reduced, i, j)
        assert info.case in (2, 3)
        assert all(x in (-1, 0, 1) for r in m.rows for x in r)
        assert same_matroid(contract(RepresentedMatroid(m), "n1"), reduced)


def test_dot_pair_parsing():
    p = DotPair.parse("a1:a5=a11")
    assert (p.first, p.second, p.label) == ("a1", "a5", "a11")
    assert DotPair.parse("x:y", flip=True).flip
    assert p.key == frozenset({"a1", "a5"})
    with pytest.raises(DomainError):
        DotPair.parse("a1a5")


def test_big_example_reduction(big):
    rf = reduce_graph(big, ["a1:a5=a11"])
    assert rf.r == 1 and rf.new_labels == ("a11",)
    (x,) = rf.new_elements
    assert (x.alpha, x.beta, x.case) == (-1, 1, 1)
    assert x.momentum == rf.routing["a5"] - rf.routing["a1"]
    assert rf.is_block_form()
    assert same_matroid(rf.contract_new(), cycle_matroid(big))
    internal = load_matrix("big_matrix").drop(["e1", "e2", "e3", "e4"])
    assert same_matroid(rf.matrix, internal)


def test_big_example_with_legs_matches_bundled_matrix(big):
    rf = reduce_graph(big, ["a1:a5=a11"], include_legs=True)
    assert same_matroid(rf.full_matrix(), load_matrix("big_matrix"))


def test_pair_redundancy_in_vacuum_sunrise():
    r = route_momenta(VACUUM_SUNRISE)
    red = pair_redundant(VACUUM_SUNRISE, r, DotPair("a", "b"), {})
    assert red.witness == "c" and not red.parallel
    rf = reduce_graph(VACUUM_SUNRISE, ["a:b"])
    assert rf.r == 0 and rf.discarded[0].witness == "c"
    same = pair_redundant(VACUUM_SUNRISE, r, DotPair("a", "a"), {})
    assert same.parallel and same.witness == "a"


def test_coloop_note_when_new_momentum_is_external():
    rf = reduce_graph(TRIANGLE, ["a:b"])
    assert rf.r == 1
    assert any("coloop" in n for n in rf.notes)


def test_unknown_edge_in_pair(big):
    with pytest.raises(DomainError):
        reduce_graph(big, ["a1:zz"])


def test_joined_cycles_become_one_circuit():
    rf = reduce_graph(FIGURE_EIGHT, ["a:c"])
    got = set(circuits_of(rf.matroid()).circuits)
    assert got == {frozenset({"a", "b", "n1"}), frozenset({"c", "d", "n1"}),
                   frozenset({"a", "b", "c", "d"})}


def test_circuits_after_coextension_predicts_enumeration():
    m = normalize_to_IC(FIGURE_EIGHT)
    predicted = circuits_after_coextension(m, {"a": -1, "c": 1}, "f")
    assert frozenset("abcd") in predicted.circuits
    coloop = circuits_after_coextension(m, {}, "f")
    assert all("f" not in c for c in coloop.circuits)
    with pytest.raises(IntegrityError):
        circuits_after_coextension(m, {"a": 1}, "f", check=ExactMatrix.identity(5, list("abcdf")))


def test_block_form_property_on_random_graphs():
    rng = random.Random(101)
    for _ in range(40):
        g = random_connected_graph(rng, max_edges=8, max_vertices=5)
        pairs = random_pairs(rng, g, max_pairs=3)
        flips = [DotPair(a, b, flip=rng.random() < 0.5) for a, b in pairs]
        rf = reduce_graph(g, flips, include_legs=bool(g.externals) and len(g.externals) > 1)
        assert rf.is_block_form()
        assert rf.r + len(rf.discarded) == len(pairs)
        assert same_matroid(rf.contract_new(), cycle_matroid(g))
        assert brute_circuits(rf.graph_block(), 2) == brute_circuits(rf.graph_block())
        momenta = rf.momenta()
        for x in rf.new_elements:
            assert momenta[x.label] == momenta[x.pair[0]] * x.alpha + momenta[x.pair[1]] * x.beta


def test_coextension_need_not_stay_binary():
    # the K3,3 coextensions are non-binary, so the full matrix cannot keep a joint
    # Q / GF(2) representation; only the graph block does
    m = load_matrix("k33_coext_first")
    assert brute_circuits(m, 2) != brute_circuits(m)


def test_reduce_matrix():
    out, steps = reduce_matrix(load_matrix("k33"), ["7:8=n"])
    assert out == load_matrix("k33_coext_second")
    assert steps[0].label == "n"


def sym_vec(name):
    return sympy.Matrix(sympy.symbols(f"{name}0:4"))


@pytest.mark.parametrize("alpha, beta", [(1, -1), (-1, 1), (1, 1), (2, -1), (Fraction(1, 2), 3)])
def test_expand_dot_product_identity(alpha, beta):
    ke, kj = sym_vec("x"), sym_vec("y")
    kf = ke * sympy.Rational(alpha) + kj * sympy.Rational(beta)
    m = {x: sympy.Symbol(f"m_{x}") for x in "ejf"}
    D = {"e": ke.dot(ke) + m["e"] ** 2, "j": kj.dot(kj) + m["j"] ** 2, "f": kf.dot(kf) + m["f"] ** 2}
    masses = {"e": "e2", "j": "j2", "f": "f2"}
    msq = {"e2": m["e"] ** 2, "j2": m["j"] ** 2, "f2": m["f"] ** 2}
    total = 0
    for t in expand_dot_product("e", "j", "f", alpha=alpha, beta=beta, masses=masses):
        c = sympy.Rational(t.coefficient.numerator, t.coefficient.denominator)
        total += c * (D[t.propagator] if t.propagator else msq[t.mass2])
    assert sympy.expand(total - ke.dot(kj)) == 0


def test_expand_dot_product_errors():
    with pytest.raises(DomainError):
        expand_dot_product("e", "j")
    with pytest.raises(DomainError):
        expand_dot_product("e", "j", "f", alpha=0)
    k = {"e": Momentum.symbol("l1"), "j": Momentum.symbol("l2"), "f": Momentum.symbol("l1")}
    with pytest.raises(ConsistencyError):
        expand_dot_product("e", "j", "f", momenta=k)
    same = expand_dot_product("e", "e", masses={"e": "me"})
    assert [(t.coefficient, t.propagator, t.mass2) for t in same] == [(1, "e", None),
                                                                       (-1, None, "me")]


def _shifts(terms):
    return sorted((t.power_shift, t.coefficient, str(t.mass_factor)) for t in terms)


def test_scalarize_examples(big):
    assert _shifts(scalarize(VACUUM_SUNRISE, ["a:b"])) == sorted([
        ((("a", -1),), Fraction(-1, 2), "1"), ((("b", -1),), Fraction(-1, 2), "1"),
        ((("c", -1),), Fraction(1, 2), "1")])
    (unit,) = scalarize(big, [])
    assert unit.coefficient == 1 and unit.power_shift == ()
    massive = _shifts(scalarize(TRIANGLE, ["a:a"]))
    assert massive == sorted([((("a", -1),), Fraction(1), "1"), ((), Fraction(-1), "ma")])


def test_scalarize_is_linear_and_terms_share_a_host(big):
    base = scalarize(big, ["a1:a5=a11"])
    scaled = scalarize(big, ["a1:a5=a11"], coefficient=6)
    assert [t.coefficient * 6 for t in base] == [t.coefficient for t in scaled]
    assert len({id(t.host) for t in base}) == 1
    assert base[0].powers()[0] == ("a1", "nu_a1", -1)


def test_repeated_pair_squares_the_expansion():
    single = {t.power_shift[0][0]: t.coefficient for t in scalarize(VACUUM_SUNRISE, ["a:b"])}
    expected = {}
    for x, cx in single.items():
        for y, cy in single.items():
            key = tuple(sorted({x: 0, y: 0}))
            expected[key] = expected.get(key, 0) + cx * cy
    got = {tuple(e for e, _ in t.power_shift): t.coefficient
           for t in scalarize(VACUUM_SUNRISE, ["a:b", "a:b"])}
    assert got == expected


def test_block_views(big):
    rf = reduce_graph(big, ["a1:a5=a11"])
    k = rf.graph_rank
    assert rf.block_C().nrows == k and rf.block_D().nrows == 1
    assert same_matroid(rf.graph_block(), cycle_matroid(big))
    with pytest.raises(StateError):
        RepresentedMatroid(ExactMatrix.from_rows([[0, 0]]))
    assert isinstance(rf.momenta()["a11"], Momentum)
    assert isinstance(scalarize(big, ["a1:a5"])[0].mass_factor, Poly)


def test_vacuum_triangle_pair_is_parallel():
    # every edge of a one-loop vacuum graph carries the same momentum, so k_a.k_b = k_a^2
    tri = FeynGraph.build("123", [("a", 1, 2), ("b", 2, 3), ("c", 3, 1)])
    red = pair_redundant(tri, route_momenta(tri), DotPair("a", "b"), {})
    assert red.parallel
    (term,) = scalarize(tri, ["a:b"])
    assert term.coefficient == 1 and term.power_shift == (("a", -1),)
