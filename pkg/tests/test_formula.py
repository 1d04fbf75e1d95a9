import pytest
from hypothesis import given, settings

from fo2_trees.checks import (
    FormulaSyntaxError,
    OrderAtomError,
    PreconditionError,
    ThirdVariableError,
    UndeclaredPredicateError,
)
from fo2_trees.formula import (
    ALL_SLOTS,
    BELOW,
    And,
    Exists,
    Forall,
    Implies,
    Not,
    Or,
    Order,
    Position,
    Signature,
    Theta,
    Unary,
    is_ennf,
    is_guarded,
    not_sim_atom,
    order_formula,
    parse_formula,
    pretty,
    simplify,
    size,
    to_ennf,
)
from fo2_trees.model import model_check
from fo2_trees.oracle import random_sentences

from conftest import FULL_SIG, formulas, sentences, trees


def test_inverse_is_an_involution():
    for theta in Theta:
        assert theta.inverse.inverse is theta
    assert Theta.DOWN.inverse is Theta.UP
    assert Theta.FREE.inverse is Theta.FREE


def test_signature_rejects_bad_names():
    with pytest.raises(PreconditionError):
        Signature(("a", "a"))
    with pytest.raises(PreconditionError):
        Signature(("exists",))
    with pytest.raises(PreconditionError):
        Signature(("A",))
    with pytest.raises(PreconditionError):
        Signature(("a",), frozenset({"X"}))
    with pytest.raises(PreconditionError):
        Signature(("a",), singular_core=("b",))


def test_signature_masks(sig_ab):
    assert sig_ab.mask({"b"}) == 2
    assert sig_ab.names(3) == ("a", "b")
    assert sig_ab.core_mask == 3
    assert sig_ab.fresh_name("_nf", {"_nf0"}) == "_nf1"


def test_parse_precedence(sig_ab):
    a, b = Unary("a", "x"), Unary("b", "x")
    assert parse_formula("a(x) & b(x) | a(x)", sig_ab) == Or(And(a, b), a)
    assert parse_formula("a(x) -> b(x) -> a(x)", sig_ab) == Implies(a, Implies(b, a))
    assert parse_formula("~a(x) & b(x)", sig_ab) == And(Not(a), b)


def test_parse_quantifiers_and_atoms(sig_ab):
    f = parse_formula("forall x. (a(x) -> exists y. (D(x,y) & b(y)))", sig_ab)
    assert f == Forall("x", Implies(Unary("a", "x"), Exists("y", And(Order("D", "x", "y"), Unary("b", "y")))))
    assert parse_formula("x=y", sig_ab) == Order("=", "x", "y")
    assert parse_formula("pos[down,right+](x,y)", sig_ab) == Position(frozenset({Theta.DOWN, Theta.RIGHT_PLUS}), "x", "y")


def test_parse_errors(sig_ab):
    with pytest.raises(ThirdVariableError):
        parse_formula("exists z. a(z)", sig_ab)
    with pytest.raises(UndeclaredPredicateError):
        parse_formula("exists x. c(x)", sig_ab)
    with pytest.raises(OrderAtomError):
        parse_formula("exists x. exists y. C(x,y)", sig_ab)
    with pytest.raises(FormulaSyntaxError):
        parse_formula("exists x. (a(x)", sig_ab)
    with pytest.raises(FormulaSyntaxError):
        parse_formula("a(x) && b(x)", sig_ab)


@given(formulas)
@settings(max_examples=100, deadline=None)
def test_pretty_parses_back(f):
    assert parse_formula(pretty(f), FULL_SIG) == f


def test_order_formula_picks_the_named_atom():
    assert order_formula(BELOW) == Order("D", "x", "y")
    assert order_formula(frozenset({Theta.UP})) == Order("C", "y", "x")
    assert order_formula(ALL_SLOTS) == simplify(Position(ALL_SLOTS, "x", "y"))


def test_simplify_folds_constants(sig_a):
    f = parse_formula("(a(x) & true) | false", sig_a)
    assert simplify(f) == Unary("a", "x")
    assert simplify(parse_formula("x=x -> a(x)", sig_a)) == Unary("a", "x")


def test_to_ennf_example(sig_a):
    f = parse_formula("~forall x. a(x)", sig_a)
    assert to_ennf(f) == Exists("x", Not(Unary("a", "x")))


def test_negated_order_atom_becomes_position(sig_ab):
    f = to_ennf(parse_formula("~D(x,y)", sig_ab))
    assert f == Position(ALL_SLOTS - BELOW, "x", "y")


@given(formulas)
@settings(max_examples=200, deadline=None)
def test_ennf_shape_and_size(f):
    g = to_ennf(f)
    assert is_ennf(g)
    assert size(g) <= 2 * size(f)


@given(sentences, trees)
@settings(max_examples=150, deadline=None)
def test_ennf_is_equivalent(f, t):
    assert model_check(t, to_ennf(f)) == model_check(t, f)


def test_not_sim_atom():
    sig = Signature(("a",), frozenset({"D"}))
    expected = And(And(Not(Order("=", "x", "y")), Not(Order("D", "x", "y"))), Not(Order("D", "y", "x")))
    assert not_sim_atom(sig) == expected
    with pytest.raises(PreconditionError):
        not_sim_atom(Signature(("a",), frozenset()))


def test_guardedness(sig_ab):
    assert is_guarded(parse_formula("forall x. (a(x) -> exists y. (D(x,y) & b(y)))", sig_ab))
    assert is_guarded(parse_formula("forall x. forall y. (D(x,y) -> false)", sig_ab))
    assert not is_guarded(parse_formula("exists y. (a(y) & b(x))", sig_ab))
    assert not is_guarded(parse_formula("exists x. exists y. (a(x) & b(y))", sig_ab))


def test_guarded_corpus_is_guarded(sig_ab):
    for f in random_sentences(7, 50, sig_ab, depth=3, guarded=True):
        assert is_guarded(f)
