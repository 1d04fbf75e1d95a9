import pytest

from fo2_trees.checks import PreconditionError, validate_extension, validate_filename
from fo2_trees.helper import build_signature, calc_percent, split_names


def test_split_names():
    assert split_names("a, b,,c") == ("a", "b", "c")
    assert split_names("") == ()


def test_build_signature():
    sig = build_signature("a,b", "D,N")
    assert sig.unary == ("a", "b")
    assert sig.binary == {"D", "N"}
    assert sig.singular_core is None
    assert build_signature("a,b", core="b").singular_core == ("b",)


@pytest.mark.parametrize(
    "unary, binary, core",
    [("a,a", "D", None), ("x", "D", None), ("A", "D", None), ("a", "E", None), ("a", "D", "b")],
)
def test_build_signature_rejects(unary, binary, core):
    with pytest.raises(PreconditionError):
        build_signature(unary, binary, core)


@pytest.mark.parametrize(
    "num, denom, round_to, expected",
    [(1, 4, 2, 0.25), (2, 3, 2, 0.67), (2, 3, 0, 1.0)],
)
def test_calc_percent(num, denom, round_to, expected):
    assert calc_percent(num, denom, round_to) == expected


def test_calc_percent_needs_numbers():
    with pytest.raises(TypeError):
        calc_percent("1", 2)


def test_calc_percent_of_an_empty_total_raises():
    with pytest.raises(ZeroDivisionError):
        calc_percent(5, 0)


def test_validators():
    assert validate_extension(".xlsx") == ".xlsx"
    with pytest.raises(ValueError):
        validate_extension("xlsx")
    with pytest.raises(ValueError):
        validate_filename("a/b.csv")
