from datetime import date

import pandas as pd
import pytest

from fo2_trees.checks import FormulaSyntaxError, PreconditionError
from fo2_trees.formula import parse_formula
from fo2_trees.helper import build_signature
from fo2_trees.io_utils import (
    construct_results_filename,
    format_signature_header,
    output_results,
    parse_signature_header,
    read_formula_file,
    read_tree,
    write_formula_file,
    write_tree,
)
from fo2_trees.model import Tree


def test_signature_header_defaults():
    sig = parse_signature_header("# sig: unary=a,b")
    assert sig.unary == ("a", "b")
    assert sig.binary == {"D"}
    assert sig.singular_core is None


def test_signature_header_fields():
    sig = parse_signature_header("#sig: unary=a,b bin=C,N core=b")
    assert sig.binary == {"C", "N"}
    assert sig.singular_core == ("b",)
    assert parse_signature_header(format_signature_header(sig)) == sig
    assert parse_signature_header("# sig: unary=a bin=").binary == frozenset()


@pytest.mark.parametrize("line", ["exists x. a(x)", "# sig: bin=D", "# signature unary=a"])
def test_bad_headers(line):
    with pytest.raises(FormulaSyntaxError):
        parse_signature_header(line)


def test_formula_file_round_trip(tmp_path):
    sig = build_signature("a,b", "D,F", core="a")
    f = parse_formula("forall x. (a(x) -> exists y. (F(x,y) & b(y)))", sig)
    path = write_formula_file(tmp_path / "f.fo2", f, sig)
    assert read_formula_file(path) == (f, sig)


def test_formula_file_skips_leading_blank_lines(tmp_path):
    path = tmp_path / "f.fo2"
    path.write_text("\n\n# sig: unary=a\nexists x.\n  a(x)\n")
    f, sig = read_formula_file(path)
    assert sig.unary == ("a",)
    assert f == parse_formula("exists x. a(x)", sig)


def test_formula_file_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_formula_file(tmp_path / "missing.fo2")
    empty = tmp_path / "empty.fo2"
    empty.write_text("\n")
    with pytest.raises(FormulaSyntaxError):
        read_formula_file(empty)


def test_tree_file_round_trip(tmp_path):
    sig = build_signature("a,b", "D,N")
    t = Tree.from_nested(sig, ({"a"}, [({"b"}, []), ({"a", "b"}, [({"b"}, [])])]))
    assert read_tree(write_tree(tmp_path / "t.json", t)) == t


def test_tree_file_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_tree(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text('{"root": {"label": []}}')
    with pytest.raises(PreconditionError):
        read_tree(broken)


def test_results_filename():
    today = date.today().strftime("%Y-%m-%d")
    assert construct_results_filename("out.csv", append_version=False) == construct_results_filename(
        f"out_{today}.csv", append_today=False, append_version=False
    )
    assert str(construct_results_filename("out.csv", append_today=False, append_version=False)) == "out.csv"
    with pytest.raises(ValueError):
        construct_results_filename("results/out.csv")
    with pytest.raises(ValueError):
        construct_results_filename("out")


def test_output_results(tmp_path):
    df = pd.DataFrame({"seed": [1, 2], "verdict": ["sat", "unsat"]})
    csv = output_results(df, tmp_path / "oracle.csv", append_today=False, append_version=False)
    assert csv == tmp_path / "oracle.csv"
    pd.testing.assert_frame_equal(pd.read_csv(csv), df)

    txt = output_results(df, tmp_path / "oracle.txt", append_today=False, append_version=False)
    pd.testing.assert_frame_equal(pd.read_csv(txt, sep="\t"), df)

    xlsx = tmp_path / "oracle.xlsx"
    output_results(df, xlsx, append_today=False, append_version=False, sheet_name="Oracle")
    output_results(df.head(1), xlsx, append_today=False, append_version=False, sheet_name="Summary")
    sheets = pd.read_excel(xlsx, sheet_name=None)
    assert set(sheets) == {"Oracle", "Summary"}
    assert len(sheets["Summary"]) == 1

    with pytest.raises(ValueError):
        output_results(df, tmp_path / "oracle.json", append_today=False, append_version=False)
