import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fo2_trees.checks import InvalidTypeError, PreconditionError, SignatureMismatch
from fo2_trees.formula import Theta, parse_formula
from fo2_trees.model import Tree, ftp, model_check
from fo2_trees.normal_form import scott_normal_form
from fo2_trees.oracle import random_sentences
from fo2_trees.typesys import (
    FullType,
    child_types,
    compile_matrix,
    evaluate,
    is_combined_of,
    locally_consistent,
    phi_consistent,
    reduce,
)

from conftest import FULL_SIG, trees

A, B = 1, 2


def test_full_type_constraints():
    with pytest.raises(InvalidTypeError):
        FullType.build(A, UP={A, B})
    with pytest.raises(InvalidTypeError):
        FullType.build(A, DOWN_PLUS={B})
    with pytest.raises(InvalidTypeError):
        FullType.build(A, LEFT_PLUS={B})
    with pytest.raises(InvalidTypeError):
        FullType(tuple(frozenset() for _ in Theta))
    ft = FullType.build(A, DOWN={B}, DOWN_PLUS={A}, FREE={B})
    assert ft.alpha == A
    assert ft.members() == {A, B}


def test_reduce_groups_slots():
    ft = FullType.build(A, UP={B}, UP_PLUS={A}, DOWN={B}, RIGHT={A}, FREE={B})
    r = reduce(ft)
    assert r.above == {A, B}
    assert r.below == {B}
    assert r.free_and_sib == {A, B}


def test_evaluate_and_compile_agree(sig_ab):
    f = parse_formula("(a(x) & D(x,y)) -> b(y)", sig_ab)
    index = {"a": 0, "b": 1}
    test = compile_matrix(f, index)
    for a in range(4):
        for b in range(4):
            for theta in Theta:
                assert test(a, b, theta) == evaluate(f, a, b, theta, index)
    assert not test(A, A, Theta.DOWN_PLUS)
    assert test(A, A, Theta.RIGHT)


def test_quantified_formulas_are_not_pair_tests(sig_ab):
    with pytest.raises(PreconditionError):
        compile_matrix(parse_formula("exists y. b(y)", sig_ab), {"a": 0, "b": 1})


@pytest.fixture
def needs_b_below(sig_ab):
    return scott_normal_form(parse_formula("forall x. (a(x) -> exists y. (D(x,y) & b(y)))", sig_ab), sig_ab)


def test_phi_consistent_needs_the_witness(needs_b_below):
    fresh = 1 << needs_b_below.extended_signature.index("_nf0")
    alpha = A | fresh
    assert not phi_consistent(FullType.build(alpha), needs_b_below)
    assert not phi_consistent(FullType.build(alpha, DOWN={A}), needs_b_below)
    assert phi_consistent(FullType.build(alpha, DOWN={B}), needs_b_below)
    assert phi_consistent(FullType.build(alpha, DOWN={alpha}, DOWN_PLUS={B}), needs_b_below)
    # b above does not help
    assert not phi_consistent(FullType.build(alpha, UP={B}), needs_b_below)


def test_phi_consistent_checks_chi(needs_b_below):
    # a without the renaming predicate violates a(x) -> _nf0(x)
    assert not phi_consistent(FullType.build(A, DOWN={B}), needs_b_below)


def test_phi_consistent_rejects_foreign_types(needs_b_below):
    with pytest.raises(SignatureMismatch):
        phi_consistent(FullType.build(1 << 5), needs_b_below)


def test_child_types_are_locally_consistent():
    triples = [(B, frozenset(), frozenset()), (A, frozenset({B}), frozenset()), (B, frozenset(), frozenset())]
    parent = FullType.build(A, DOWN={A, B}, DOWN_PLUS={B})
    children = child_types(A, frozenset(), frozenset(), triples)
    assert children[1][Theta.LEFT] == {B}
    assert children[2][Theta.LEFT_PLUS] == {B}
    assert children[0][Theta.FREE] == {B}
    assert locally_consistent(parent, children)


def test_locally_consistent_rejects_mismatches():
    triples = [(B, frozenset(), frozenset()), (B, frozenset(), frozenset())]
    children = child_types(A, frozenset(), frozenset(), triples)
    assert locally_consistent(FullType.build(A, DOWN={B}), children)
    assert not locally_consistent(FullType.build(A, DOWN={A}), children)
    assert not locally_consistent(FullType.build(B, DOWN={B}), children)
    assert not locally_consistent(FullType.build(A, DOWN={B}), [children[1], children[0]])
    with pytest.raises(PreconditionError):
        locally_consistent(FullType.build(A), [])


def test_is_combined_of():
    ft1 = FullType.build(A, DOWN={B})
    ft2 = FullType.build(A, FREE={A})
    assert is_combined_of(FullType.build(A, DOWN={B}, FREE={A}), ft1, ft2)
    assert not is_combined_of(FullType.build(A, DOWN={A}), ft1, ft2)


_NORMAL_FORMS = [scott_normal_form(f, FULL_SIG) for f in random_sentences(17, 60, FULL_SIG, depth=2)]


@pytest.mark.slow
@given(st.sampled_from(_NORMAL_FORMS), trees, st.data())
@settings(max_examples=1000, deadline=None)
def test_model_check_agrees_with_realised_full_types(nf, t, data):
    fresh = len(nf.fresh_predicates)
    extras = data.draw(st.lists(st.integers(0, (1 << fresh) - 1), min_size=len(t), max_size=len(t)))
    base = len(FULL_SIG)
    labelled = Tree(nf.extended_signature, [label | extra << base for label, extra in zip(t.labels, extras)], t.children)
    consistent = all(phi_consistent(ftp(labelled, v), nf) for v in range(len(labelled)))
    assert model_check(labelled, nf.to_sentence()) == consistent
