import pytest
from hypothesis import strategies as st

from fo2_trees.formula import (
    FALSE,
    TRUE,
    VARIABLES,
    And,
    Exists,
    Forall,
    Iff,
    Implies,
    Not,
    Or,
    Order,
    Position,
    Signature,
    Theta,
    Unary,
    free_vars,
)
from fo2_trees.helper import build_signature
from fo2_trees.model import Tree

FULL_SIG = Signature(("a", "b"), frozenset({"C", "D", "N", "F"}))

_vars = st.sampled_from(VARIABLES)

atoms = st.one_of(
    st.builds(Unary, st.sampled_from(FULL_SIG.unary), _vars),
    st.builds(Order, st.sampled_from(("C", "D", "N", "F", "=")), _vars, _vars),
    st.builds(Position, st.frozensets(st.sampled_from(list(Theta)), min_size=1), _vars, _vars),
    st.sampled_from([TRUE, FALSE]),
)

formulas = st.recursive(
    atoms,
    lambda inner: st.one_of(
        st.builds(Not, inner),
        st.builds(And, inner, inner),
        st.builds(Or, inner, inner),
        st.builds(Implies, inner, inner),
        st.builds(Iff, inner, inner),
        st.builds(Exists, _vars, inner),
        st.builds(Forall, _vars, inner),
    ),
    max_leaves=8,
)


def close(f):
    for var in sorted(free_vars(f)):
        f = Exists(var, f)
    return f


sentences = formulas.map(close)

_labels = st.integers(min_value=0, max_value=(1 << len(FULL_SIG)) - 1)

nested_trees = st.recursive(
    st.builds(lambda label: (label, []), _labels),
    lambda kids: st.tuples(_labels, st.lists(kids, min_size=1, max_size=3)),
    max_leaves=7,
)

trees = nested_trees.map(lambda nested: Tree.from_nested(FULL_SIG, nested))


@pytest.fixture
def sig_a():
    return build_signature("a")


@pytest.fixture
def sig_ab():
    return build_signature("a,b")


@pytest.fixture
def formula_file(tmp_path):
    """Write a formula file and return its path."""

    def write(text: str, header: str = "# sig: unary=a,b bin=D", name: str = "input.fo2"):
        path = tmp_path / name
        path.write_text(header + "\n" + text + "\n")
        return path

    return write
