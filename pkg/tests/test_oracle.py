import pytest

from fo2_trees.checks import NotASentenceError, PreconditionError
from fo2_trees.formula import free_vars, parse_formula
from fo2_trees.helper import build_signature
from fo2_trees.model import model_check
from fo2_trees.oracle import (
    brute_force_sat,
    count_trees,
    enumerate_shapes,
    enumerate_trees,
    node_labels,
    random_sentences,
    shape_size,
)


def test_shapes_up_to_three_nodes():
    shapes = list(enumerate_shapes(3))
    assert shapes == [(), ((),), ((), ()), (((),),)]
    assert [shape_size(s) for s in shapes] == [1, 2, 3, 3]
    with pytest.raises(PreconditionError):
        list(enumerate_shapes(0))


@pytest.mark.parametrize("max_nodes, expected", [(1, 2), (2, 6), (3, 22)])
def test_tree_counts(sig_a, max_nodes, expected):
    assert count_trees(max_nodes, sig_a) == expected
    assert len(list(enumerate_trees(max_nodes, sig_a))) == expected


def test_trees_are_distinct(sig_ab):
    seen = {(t.labels, t.children) for t in enumerate_trees(3, sig_ab)}
    assert len(seen) == count_trees(3, sig_ab)


def test_singular_labels():
    assert node_labels(build_signature("a,b"), singular=True) == [1, 2]
    assert node_labels(build_signature("a,b", core="a"), singular=True) == [1, 3]
    assert node_labels(build_signature("a,b"), singular=False) == [0, 1, 2, 3]
    assert count_trees(2, build_signature("a,b"), singular=True) == 2 + 4


def test_brute_force_finds_the_smallest_model(sig_a):
    f = parse_formula("exists x. exists y. (D(x,y) & a(y))", sig_a)
    found = brute_force_sat(f, sig_a, 3)
    assert found is not None
    assert len(found) == 2
    assert model_check(found, f)


def test_brute_force_is_monotone_in_the_node_count(sig_a):
    f = parse_formula("exists x. exists y. (D(x,y) & a(y))", sig_a)
    assert brute_force_sat(f, sig_a, 1) is None
    assert brute_force_sat(f, sig_a, 2) is not None
    assert brute_force_sat(f, sig_a, 4) is not None


def test_brute_force_rejects_open_formulas(sig_a):
    with pytest.raises(NotASentenceError):
        brute_force_sat(parse_formula("a(x)", sig_a), sig_a, 2)


def test_random_sentences_are_reproducible():
    sig = build_signature("a,b", "C,D,N,F")
    first = random_sentences(11, 25, sig)
    assert first == random_sentences(11, 25, sig)
    assert len(first) == 25
    assert first != random_sentences(12, 25, sig)
    assert all(not free_vars(f) for f in first)


def test_guarded_corpus_needs_descendant():
    with pytest.raises(PreconditionError):
        random_sentences(1, 3, build_signature("a", "N"), guarded=True)