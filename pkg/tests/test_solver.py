import pytest

from fo2_trees.checks import NotASentenceError
from fo2_trees.formula import Signature, parse_formula
from fo2_trees.gf2 import gf2_sat_singular
from fo2_trees.helper import build_signature
from fo2_trees.model import is_singular, model_check
from fo2_trees.normal_form import NormalFormFormula, scott_normal_form
from fo2_trees.oracle import brute_force_sat, random_sentences
from fo2_trees.solver import (
    DEFAULT_PHASES,
    BoundsSource,
    Mode,
    Outcome,
    Phase,
    SolverBounds,
    SolverSettings,
    admissible_types,
    decide_sat,
    default_bounds,
)
from fo2_trees.typesys import TypeContext


def _bare(unary: tuple[str, ...]) -> NormalFormFormula:
    sig = Signature(unary, frozenset({"D"}))
    return NormalFormFormula((), (), sig, sig)


def test_default_bounds_general():
    assert default_bounds(_bare(("a",))) == SolverBounds(12, 16)
    assert default_bounds(_bare(("a", "b"))) == SolverBounds(48, 64)


def test_default_bounds_singular():
    bounds = default_bounds(_bare(("a", "b")), Mode.SINGULAR, input_size=10)
    assert bounds.max_depth == 18000
    assert bounds.max_degree == 64
    assert bounds.source is BoundsSource.THEORETICAL


def test_singular_depth_needs_descendant_only():
    sig = Signature(("a", "b"), frozenset({"C", "D"}))
    nf = NormalFormFormula((), (), sig, sig)
    assert default_bounds(nf, "singular", input_size=10).max_depth == 48


def test_settings_from_config():
    settings = SolverSettings.from_config(
        {"search_budget": 10, "max_extended_predicates": 3, "phases": [{"depth": 2, "degree": 2}]}
    )
    assert settings.search_budget == 10
    assert settings.phases == (Phase(2, 2, None),)
    assert SolverSettings.from_config({}).phases == DEFAULT_PHASES


def test_admissible_types_drop_unwitnessable(sig_ab):
    f = parse_formula("(forall x. (a(x) -> exists y. (D(x,y) & b(y)))) & (forall x. forall y. (D(x,y) -> ~b(y)))", sig_ab)
    ctx = TypeContext(scott_normal_form(f, sig_ab))
    universe = admissible_types(ctx)
    assert universe
    assert not any(t & 1 for t in universe)


def test_single_node_model(sig_a):
    f = parse_formula("exists x. a(x)", sig_a)
    verdict = decide_sat(f, sig_a)
    assert verdict.outcome is Outcome.SAT
    assert model_check(verdict.witness, f)
    assert verdict.to_dict()["verdict"] == "sat"


def test_model_with_a_descendant(sig_ab):
    f = parse_formula("(exists x. a(x)) & (forall x. (a(x) -> exists y. (D(x,y) & b(y))))", sig_ab)
    verdict = decide_sat(f, sig_ab)
    assert verdict.is_sat
    assert verdict.witness.depth() >= 1
    assert model_check(verdict.witness, f)
    assert verdict.witness.sig == sig_ab


def test_sibling_order():
    sig = build_signature("a,b", "D,N")
    f = parse_formula("exists x. exists y. (N(x,y) & a(x) & b(y))", sig)
    verdict = decide_sat(f, sig)
    assert verdict.is_sat
    assert model_check(verdict.witness, f)


def test_contradiction_is_unsat(sig_a):
    verdict = decide_sat(parse_formula("exists x. (a(x) & ~a(x))", sig_a), sig_a)
    assert verdict.outcome is Outcome.UNSAT
    assert verdict.witness is None


def test_singular_mode_forbids_two_core_labels(sig_ab):
    f = parse_formula("exists x. (a(x) & b(x))", sig_ab)
    assert decide_sat(f, sig_ab, Mode.GENERAL).is_sat
    verdict = decide_sat(f, sig_ab, Mode.SINGULAR)
    assert verdict.outcome is Outcome.UNSAT


def test_singular_witness(sig_ab):
    f = parse_formula("exists x. (a(x) & exists y. (D(x,y) & b(y)))", sig_ab)
    verdict = decide_sat(f, sig_ab, Mode.SINGULAR)
    assert verdict.is_sat
    assert is_singular(verdict.witness)


def test_forced_infinite_descent_is_unsat(sig_a):
    f = parse_formula(
        "(forall x. forall y. (D(x,y) -> false)) & (forall x. (a(x) -> exists y. (D(x,y) & a(y)))) & (exists x. a(x))",
        sig_a,
    )
    assert decide_sat(f, sig_a).outcome is Outcome.UNSAT


def test_user_bounds_never_give_unsat(sig_a):
    f = parse_formula("exists x. exists y. (D(x,y) & a(y))", sig_a)
    verdict = decide_sat(f, sig_a, bounds=SolverBounds(0, 1, BoundsSource.USER))
    assert verdict.outcome is Outcome.UNKNOWN
    assert verdict.reason


def test_too_many_predicates_is_unknown(sig_ab):
    f = parse_formula("exists x. (a(x) & exists y. (D(x,y) & b(y)))", sig_ab)
    verdict = decide_sat(f, sig_ab, settings=SolverSettings(max_extended_predicates=1))
    assert verdict.outcome is Outcome.UNKNOWN
    assert "predicates" in verdict.reason


def test_budget_exhaustion_is_unknown(sig_ab):
    f = parse_formula("(exists x. a(x)) & (forall x. (a(x) -> exists y. (D(x,y) & b(y))))", sig_ab)
    verdict = decide_sat(f, sig_ab, settings=SolverSettings(search_budget=1))
    assert verdict.outcome is Outcome.UNKNOWN
    assert verdict.reason == "search budget exhausted"


def test_needs_a_sentence(sig_a):
    with pytest.raises(NotASentenceError):
        decide_sat(parse_formula("a(x)", sig_a), sig_a)


@pytest.mark.slow
def test_agrees_with_the_oracle():
    sig = build_signature("a", "C,D,N,F")
    for f in random_sentences(2026, 500, sig, depth=3):
        found = brute_force_sat(f, sig, 6)
        verdict = decide_sat(f, sig)
        if found is not None:
            assert verdict.outcome is Outcome.SAT, str(f)
        if verdict.is_sat:
            assert model_check(verdict.witness, f)


@pytest.mark.slow
def test_agrees_with_the_guarded_engine():
    sig = build_signature("a,b,c")
    for f in random_sentences(3, 200, sig, depth=2, guarded=True):
        gf2 = gf2_sat_singular(f, sig)
        assert gf2.outcome is not Outcome.UNKNOWN, str(f)
        if brute_force_sat(f, sig, 4, singular=True) is not None:
            assert gf2.is_sat, str(f)
        fo2 = decide_sat(f, sig, Mode.SINGULAR)
        if fo2.outcome is not Outcome.UNKNOWN:
            assert fo2.outcome is gf2.outcome, str(f)
