import json

import pytest

from fo2_trees.cli import EXIT_ERROR, EXIT_USAGE, choose_engine, run
from fo2_trees.formula import parse_formula
from fo2_trees.helper import build_signature
from fo2_trees.io_utils import read_formula_file, read_tree, write_tree
from fo2_trees.model import Tree, model_check
from fo2_trees.reductions import gen_expdeg
from fo2_trees.solver import Mode


@pytest.fixture
def no_config(tmp_path):
    return ["--config", str(tmp_path / "none.yaml")]


def _report(capsys) -> dict:
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


def test_sat_exits_zero(formula_file, no_config, capsys):
    path = formula_file("exists x. a(x)")
    assert run([*no_config, "sat", str(path)]) == 0
    report = _report(capsys)
    assert report["verdict"] == "sat"
    assert report["engine"] == "fo2"


def test_sat_writes_the_model(formula_file, no_config, tmp_path, capsys):
    path = formula_file("exists x. (a(x) & exists y. (D(x,y) & b(y)))")
    out = tmp_path / "model.json"
    assert run([*no_config, "sat", str(path), "--emit-model", str(out)]) == 0
    assert _report(capsys)["model"] == str(out)
    f, _ = read_formula_file(path)
    assert model_check(read_tree(out), f)


def test_unsat_exits_one(formula_file, no_config, capsys):
    path = formula_file("exists x. (a(x) & ~a(x))")
    assert run([*no_config, "sat", str(path)]) == 1
    assert _report(capsys)["verdict"] == "unsat"


def test_user_bounds_give_unknown(formula_file, no_config, capsys):
    path = formula_file("exists x. exists y. (D(x,y) & a(y))")
    assert run([*no_config, "sat", str(path), "--max-depth", "0", "--max-degree", "1"]) == 2
    assert _report(capsys)["verdict"] == "unknown"


def test_singular_guarded_input_uses_the_guarded_engine(formula_file, no_config, capsys):
    path = formula_file("exists x. a(x)")
    assert run([*no_config, "sat", str(path), "--mode", "singular"]) == 0
    assert _report(capsys)["engine"] == "gf2"


def test_max_depth_caps_the_guarded_engine(formula_file, no_config, capsys):
    path = formula_file("exists x. (a(x) & exists y. (D(x,y) & b(y) & exists x. (D(y,x) & a(x))))")
    assert run([*no_config, "sat", str(path), "--mode", "singular", "--max-depth", "1"]) == 2
    report = _report(capsys)
    assert report["engine"] == "gf2"
    assert report["verdict"] == "unknown"


def test_repository_config_is_read(formula_file, capsys):
    path = formula_file("exists x. a(x)")
    assert run(["sat", str(path)]) == 0


@pytest.mark.parametrize("argv", [[], ["sat"], ["frobnicate"], ["sat", "f.fo2", "--mode", "odd"], ["gen", "path"]])
def test_usage_errors(argv):
    assert run(argv) == EXIT_USAGE


def test_missing_file(no_config, tmp_path, capsys):
    assert run([*no_config, "sat", str(tmp_path / "missing.fo2")]) == EXIT_ERROR
    assert _report(capsys)["error"] == "FileNotFoundError"


def test_syntax_error(formula_file, no_config, capsys):
    path = formula_file("exists x. (a(x) &")
    assert run([*no_config, "sat", str(path)]) == EXIT_ERROR
    assert _report(capsys)["error"] == "FormulaSyntaxError"


def test_check(formula_file, tmp_path, capsys):
    sig = build_signature("a,b")
    tree = write_tree(tmp_path / "t.json", Tree.chain(sig, [{"a"}, {"b"}]))
    holds = formula_file("exists x. (a(x) & exists y. (D(x,y) & b(y)))", name="holds.fo2")
    fails = formula_file("exists x. (b(x) & exists y. (D(x,y) & a(y)))", name="fails.fo2")
    assert run(["check", "--tree", str(tree), "--formula", str(holds)]) == 0
    assert capsys.readouterr().out.strip() == "true"
    assert run(["check", "--tree", str(tree), "--formula", str(fails)]) == 1
    assert capsys.readouterr().out.strip() == "false"


def test_normalize(formula_file, capsys):
    path = formula_file("forall x. (a(x) -> exists y. (D(x,y) & b(y)))")
    assert run(["normalize", str(path)]) == 0
    nf = _report(capsys)["normal_form"]
    assert set(nf) == {"universal", "witnesses", "fresh", "size"}
    assert len(nf["witnesses"]) >= 1

    assert run(["normalize", str(path), "--gf2"]) == 0
    assert len(_report(capsys)["candidates"]) >= 1


def test_oracle(formula_file, capsys):
    path = formula_file("exists x. exists y. (D(x,y) & a(y))")
    assert run(["oracle", str(path), "--max-nodes", "1"]) == 2
    assert _report(capsys)["verdict"] == "unknown"
    assert run(["oracle", str(path), "--max-nodes", "2"]) == 0
    report = _report(capsys)
    f, _ = read_formula_file(path)
    assert model_check(Tree.from_dict(report["model"]), f)


def test_gen_expdeg_round_trips(tmp_path):
    out = tmp_path / "expdeg.fo2"
    assert run(["gen", "--out", str(out), "expdeg", "1"]) == 0
    f, sig = read_formula_file(out)
    expected = gen_expdeg(1)
    assert sig == expected.signature
    assert f == expected.formula


def test_gen_qbf(tmp_path, capsys):
    q = tmp_path / "q.qdimacs"
    q.write_text("p cnf 2 1\ne 2 0\na 1 0\n1 2 0\n")
    assert run(["gen", "qbf", str(q)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# sig: unary=root,leaf,is_true,is_false bin=D")


def test_gen_path(capsys):
    assert run(["gen", "path", "1", "--style", "transitive"]) == 0
    assert "F(" in capsys.readouterr().out


def test_choose_engine(sig_a):
    f = parse_formula("exists x. a(x)", sig_a)
    assert choose_engine(f, sig_a, Mode.SINGULAR, "auto") == "gf2"
    assert choose_engine(f, sig_a, Mode.GENERAL, "auto") == "fo2"
    assert choose_engine(f, sig_a, Mode.GENERAL, "gf2") == "gf2"
    unguarded = parse_formula("exists x. exists y. (a(x) & a(y))", sig_a)
    assert choose_engine(unguarded, sig_a, Mode.SINGULAR, "auto") == "fo2"
    sig = build_signature("a", "C,D")
    assert choose_engine(parse_formula("exists x. a(x)", sig), sig, Mode.SINGULAR, "auto") == "fo2"
