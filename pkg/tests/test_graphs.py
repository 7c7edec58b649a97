import itertools
import math

import pytest

from hopftr.graphs import (
    EMPTY,
    GraphFamilyId,
    GraphSyntaxError,
    LoopValidityError,
    TaggedGraph,
    WorkLimitExceeded,
    catalan,
    contract,
    contraction_patterns,
    enumerate_family,
    eo_family,
    graft,
    induced_subgraph,
    leaf,
    mirror_images,
    parse_graph,
    permutation_fiber,
    recursion_count,
    recursion_graphs,
    render_graph,
    shape_of,
    tree_from_permutation,
)


def G(text):
    return parse_graph(text)


# ---------------------------------------------------------------- grammar


def test_parse_figure_tree():
    g = G("<<1 2> <3 <4 5>>>")
    assert g.tree == (("1", "2"), ("3", ("4", "5")))
    assert g.degree == 4 and g.n_leaves == 5 and g.n_loops == 0


def test_parse_empty_and_loop():
    assert G("0") is EMPTY or G("0") == EMPTY
    g = G("<1 2> | 1~2")
    assert g.n_loops == 1 and g.free_labels == [] and g.degree == 1


def test_whitespace_is_insignificant():
    assert G(" < <1   2>3 > ") == G("<<1 2> 3>")
    assert G("<<1 2> <3 4>>|2~3") == G("<<1 2> <3 4>> | 2~3")


def test_single_leaf_brackets():
    assert G("<1>") == G("1") == leaf("1")
    assert render_graph(G("<7>")) == "7"


def test_render_examples():
    assert render_graph(EMPTY) == "0"
    assert render_graph(graft(leaf("1"), leaf("2"))) == "<1 2>"
    assert render_graph(G("<<1 2> <3 <4 5>>>")) == "<<1 2> <3 <4 5>>>"


@pytest.mark.parametrize("text,pos", [("<1 2", 4), ("<1 2>>", 5), ("<1 2> | 1~", 10), ("<1 , 2>", 3)])
def test_syntax_error_positions(text, pos):
    with pytest.raises(GraphSyntaxError) as e:
        G(text)
    assert e.value.position == pos


@pytest.mark.parametrize("text", ["<<1 2> 3> | 1~3", "<<1 2> <3 4>> | 1~3, 2~4", "<1 2> | 1~2, 2~1"])
def test_loop_validity_errors(text):
    with pytest.raises(LoopValidityError):
        G(text)


def test_duplicate_label():
    with pytest.raises(ValueError, match="duplicate"):
        G("<1 <2 1>>")


def test_loop_ids_are_canonical():
    # the same pairing written in a different order is one graph
    a = G("<<1 2> <3 4>> | 3~4, 1~2")
    b = G("<<1 2> <3 4>> | 1~2, 3~4")
    assert a == b and hash(a) == hash(b)
    assert render_graph(a) == "<<1 2> <3 4>> | 1~2, 3~4"


# ---------------------------------------------------------------- construction


def test_graft_shapes():
    bar = leaf("x")
    assert shape_of(graft(bar, leaf("y")).tree) == (None, None)
    assert shape_of(graft(G("<1 2>"), bar).tree) == ((None, None), None)
    assert shape_of(graft(bar, G("<1 2>")).tree) == (None, (None, None))
    with pytest.raises(ValueError):
        graft(EMPTY, bar)


def test_catalan():
    assert [catalan(n) for n in (0, 3, 6)] == [1, 5, 132]
    assert catalan(6) == len(enumerate_family(GraphFamilyId("Y", 6)))


def test_family_examples():
    assert len(enumerate_family(GraphFamilyId("Y", 3))) == 5
    assert enumerate_family(GraphFamilyId("X", 0)) == [EMPTY]
    assert [render_graph(g) for g in enumerate_family(GraphFamilyId("Xg", 0, 1))] == ["<1 2> | 1~2"]
    assert len(enumerate_family(GraphFamilyId("Xg", 0, 2))) == 5
    # 3 slots and one adjacent contraction: 2 shapes times 2 positions
    assert len(enumerate_family(GraphFamilyId("Xg", 1, 1))) == 4


def test_families_are_sorted_and_distinct():
    for fid in (GraphFamilyId("Y", 5), GraphFamilyId("Xbar", 4), GraphFamilyId("Xg", 2, 1)):
        gs = enumerate_family(fid)
        texts = [render_graph(g) for g in gs]
        assert texts == sorted(texts)
        assert len(set(gs)) == len(gs)


def test_xbar_contains_x():
    for n in range(1, 6):
        xbar = set(enumerate_family(GraphFamilyId("Xbar", n)))
        assert set(enumerate_family(GraphFamilyId("X", n))) <= xbar
        assert all(g.is_balanced for g in xbar)


def test_work_limit(monkeypatch):
    monkeypatch.setenv("HOPF_TR_MAX_WORK", "100")
    with pytest.raises(WorkLimitExceeded):
        enumerate_family(GraphFamilyId("Y", 9))


def test_bad_family():
    with pytest.raises(ValueError):
        GraphFamilyId("Z", 1)
    with pytest.raises(ValueError):
        GraphFamilyId("Y", -1)


# ---------------------------------------------------------------- permutations


def test_tree_from_permutation_examples():
    assert tree_from_permutation((2, 3, 1)) == G("<<1 2> <3 4>>")
    assert tree_from_permutation((1,)) == G("<1 2>")
    assert tree_from_permutation((1, 3, 2)) == tree_from_permutation((2, 3, 1))
    with pytest.raises(ValueError):
        tree_from_permutation((1, 1))


def test_permutation_fibers():
    assert permutation_fiber(G("<1 2>")) == [(1,)]
    assert {(2, 3, 1), (1, 3, 2)} <= set(permutation_fiber(G("<<1 2> <3 4>>")))
    with pytest.raises(ValueError):
        permutation_fiber(G("<1 2> | 1~2"))
    with pytest.raises(ValueError):
        permutation_fiber(EMPTY)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_fibers_partition_symmetric_group(n):
    trees = enumerate_family(GraphFamilyId("Y", n))
    fibers = [set(permutation_fiber(t)) for t in trees]
    assert all(fibers)  # surjective onto Y(n)
    assert sum(len(f) for f in fibers) == math.factorial(n)
    assert set().union(*fibers) == set(itertools.permutations(range(1, n + 1)))


# ---------------------------------------------------------------- contraction


def test_contract_examples():
    assert contract(G("<1 2>"), 1) == G("<1 2> | 1~2")
    g = contract(G("<1 <2 3>>"), 2)
    assert g.pairs == [(1, 2)] and g.free_labels == ["1"]  # 0-based slots
    assert render_graph(g) == "<1 <2 3>> | 2~3"
    gg = contract(contract(G("<<1 2> <3 4>>"), 1), 1)
    assert gg.n_loops == 2 and gg.free_labels == [] and gg.is_balanced


def test_contract_errors():
    with pytest.raises(IndexError):
        contract(G("<1 2>"), 2)
    with pytest.raises(ValueError):
        contract(G("<1 2> | 1~2"), 1)


def test_contract_invariants():
    for g in enumerate_family(GraphFamilyId("Xbar", 5)):
        for pos in range(1, len(g.free_labels)):
            h = contract(g, pos)
            assert h.degree == g.degree
            assert len(h.free_labels) == len(g.free_labels) - 2
            assert h.is_balanced


def test_contraction_patterns_count():
    # balanced pairings with free slots outside all pairs: Motzkin-like counts
    assert [len(contraction_patterns(n)) for n in range(6)] == [1, 1, 2, 3, 6, 10]


# ---------------------------------------------------------------- subgraphs


def test_induced_subgraph_examples():
    t = G("<<1 2> 3>")
    assert induced_subgraph(t, {"1", "3"}) == G("<1 3>")
    assert induced_subgraph(t, set()) == EMPTY
    assert induced_subgraph(t, {"1", "2"}) == G("<1 2>")
    assert induced_subgraph(t, {"1", "2", "3"}) == t
    with pytest.raises(KeyError):
        induced_subgraph(t, {"9"})


def test_induced_subgraph_complements_cover_leaves():
    for t in enumerate_family(GraphFamilyId("X", 5)):
        labs = t.free_labels
        for r in range(len(labs) + 1):
            for a in itertools.combinations(labs, r):
                rest = [x for x in labs if x not in a]
                left, right = induced_subgraph(t, a), induced_subgraph(t, rest)
                got = (left.free_labels if not left.is_empty else []) + (right.free_labels if not right.is_empty else [])
                assert sorted(got) == sorted(labs)


# ---------------------------------------------------------------- EO families


def test_recursion_counts():
    assert recursion_count(3, 0) == 12
    assert recursion_count(1, 1) == 4
    assert recursion_count(0, 2) == 5
    assert recursion_count(2, 1) == 32
    assert recursion_count(1, 2) == 50
    assert len(recursion_graphs(3, 0)) == 12


def test_eo_genus0_count():
    # genus 0 recursion terms: catalan(k - 1) * k! labelled trees
    for k in range(2, 6):
        assert recursion_count(k, 0) == catalan(k - 1) * math.factorial(k)


def test_eo_family_weights_reproduce_recursion_count():
    for k, g in ((2, 0), (3, 0), (1, 1), (0, 2), (2, 1)):
        fam = eo_family(k, g)
        assert sum(w for _, w in fam) == recursion_count(k, g)


def test_mirror_images_of_vertex():
    assert sorted(mirror_images(("a", "b"))) == [("a", "b"), ("b", "a")]


def test_tagged_graph_rejects_bad_loops():
    with pytest.raises(LoopValidityError):
        TaggedGraph(((0, "a"), 1))  # each loop id must appear exactly twice
