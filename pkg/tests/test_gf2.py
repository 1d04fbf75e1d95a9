import pytest

from fo2_trees.checks import ConfigError, NotASentenceError, PreconditionError, UnguardedFormulaError
from fo2_trees.formula import parse_formula
from fo2_trees.gf2 import Gf2Settings, PathState, _depth_schedule, _partitions, gf2_sat_singular
from fo2_trees.helper import build_signature
from fo2_trees.model import is_singular, model_check
from fo2_trees.solver import Mode, Outcome, decide_sat


def test_partitions_single_block_first():
    found = list(_partitions([1, 2, 3]))
    assert len(found) == 5
    assert found[0] == [[1, 2, 3]]
    assert [[1], [2], [3]] in found
    assert list(_partitions([])) == [[]]


def test_path_state_key_ignores_depth():
    a = PathState(1, frozenset({(0, 1)}), (2, 4, 2), 3)
    b = PathState(1, frozenset({(0, 1)}), (4, 2, 4, 2), 4)
    assert a.key == b.key
    assert a.key == (1, frozenset({2, 4}), frozenset({(0, 1)}))
    assert PathState(1, frozenset(), (), 0).key == (1, frozenset(), frozenset())


def test_one_node_model(sig_a):
    verdict = gf2_sat_singular(parse_formula("exists x. a(x)", sig_a), sig_a)
    assert verdict.outcome is Outcome.SAT
    assert len(verdict.witness) == 1
    assert verdict.stats["nodes"] == 1


def test_model_with_a_descendant(sig_ab):
    f = parse_formula("exists x. (a(x) & exists y. (D(x,y) & b(y)))", sig_ab)
    verdict = gf2_sat_singular(f, sig_ab)
    assert verdict.is_sat
    assert len(verdict.witness) >= 2
    assert model_check(verdict.witness, f)
    assert is_singular(verdict.witness)


def test_agrees_with_the_full_type_search(sig_ab):
    f = parse_formula("exists x. (a(x) & exists y. (D(x,y) & b(y)))", sig_ab)
    assert decide_sat(f, sig_ab, Mode.SINGULAR).outcome is gf2_sat_singular(f, sig_ab).outcome


def test_forced_infinite_descent_is_unsat(sig_a):
    f = parse_formula(
        "(forall x. forall y. (D(x,y) -> false)) & (forall x. (a(x) -> exists y. (D(x,y) & a(y)))) & (exists x. a(x))",
        sig_a,
    )
    verdict = gf2_sat_singular(f, sig_a)
    assert verdict.outcome is Outcome.UNSAT
    assert verdict.witness is None


def test_budget_exhaustion_is_unknown(sig_ab):
    f = parse_formula("exists x. (a(x) & exists y. (D(x,y) & b(y)))", sig_ab)
    verdict = gf2_sat_singular(f, sig_ab, Gf2Settings(search_budget=1))
    assert verdict.outcome is Outcome.UNKNOWN
    assert verdict.reason == "search budget exhausted"


def test_preconditions(sig_ab):
    with pytest.raises(NotASentenceError):
        gf2_sat_singular(parse_formula("a(x)", sig_ab), sig_ab)
    with pytest.raises(UnguardedFormulaError):
        gf2_sat_singular(parse_formula("exists x. exists y. (a(x) & b(y))", sig_ab), sig_ab)
    sig_cd = build_signature("a", "C,D")
    with pytest.raises(PreconditionError):
        gf2_sat_singular(parse_formula("exists x. a(x)", sig_cd), sig_cd)


def test_settings_from_config():
    assert Gf2Settings.from_config({"search_budget": 7}).search_budget == 7
    assert Gf2Settings.from_config({}) == Gf2Settings()


def test_depth_schedule_doubles_up_to_the_cap():
    assert _depth_schedule(100, 20) == [2, 4, 8, 16, 20]
    assert _depth_schedule(5, 64) == [2, 4, 5]
    assert _depth_schedule(1, 64) == [1]


def test_settings_reject_non_positive_values():
    with pytest.raises(ConfigError):
        Gf2Settings(max_depth=0)
    with pytest.raises(ConfigError):
        Gf2Settings.from_config({"search_budget": 0})
    assert Gf2Settings.from_config({"max_depth": 9}).max_depth == 9


@pytest.fixture
def sig_abc():
    return build_signature("a,b,c")


@pytest.mark.parametrize(
    "text",
    [
        "exists x. (c(x) & a(x))",
        "(forall x. (a(x) -> exists y. (D(x,y) & a(y)))) & (exists x. a(x))",
        "(forall x. (a(x) -> exists y. (D(x,y) & b(y)))) & (forall x. (b(x) -> exists y. (D(x,y) & a(y)))) & (exists x. a(x))",
        "(exists x. (a(x) & exists y. (D(x,y) & b(y)))) & (forall x. forall y. (D(x,y) -> (a(x) & a(y))))",
    ],
)
def test_unsatisfiable_sentences_are_settled(sig_abc, text):
    verdict = gf2_sat_singular(parse_formula(text, sig_abc), sig_abc)
    assert verdict.outcome is Outcome.UNSAT
    assert decide_sat(parse_formula(text, sig_abc), sig_abc, Mode.SINGULAR).outcome is not Outcome.SAT


def test_height_cap_gives_unknown(sig_abc):
    f = parse_formula("exists x. (a(x) & exists y. (D(x,y) & b(y) & exists x. (D(y,x) & c(x))))", sig_abc)
    verdict = gf2_sat_singular(f, sig_abc, Gf2Settings(max_depth=1))
    assert verdict.outcome is Outcome.UNKNOWN
    assert verdict.reason == "depth bound 1 reached"
    assert gf2_sat_singular(f, sig_abc).is_sat


def test_long_chain_without_recursion_trouble():
    sig = build_signature(",".join(f"p{i}" for i in range(6)))
    steps = " & ".join(f"(forall x. (p{i}(x) -> exists y. (D(x,y) & p{i + 1}(y))))" for i in range(5))
    f = parse_formula(f"(exists x. p0(x)) & {steps}", sig)
    verdict = gf2_sat_singular(f, sig)
    assert verdict.is_sat
    assert verdict.witness.depth() >= 5
    assert model_check(verdict.witness, f)
