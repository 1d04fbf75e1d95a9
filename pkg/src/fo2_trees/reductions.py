"""Formula generators from the lower-bound constructions, used as stress and equisatisfiability tests."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from pathlib import Path

from lark import Lark, Transformer
from lark.exceptions import UnexpectedInput

from fo2_trees.checks import PreconditionError, QBFShapeError, UnguardedFormulaError
from fo2_trees.formula import (
    TRUE,
    And,
    Const,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Order,
    Position,
    Signature,
    Unary,
    children,
    conj,
    disj,
    free_vars,
    is_guarded,
    quantifier_block,
    relations,
    split_guard,
    validate_formula,
)

log = logging.getLogger(__name__)

QBF_SIGNATURE = Signature(("root", "leaf", "is_true", "is_false"), frozenset({"D"}))


@dataclass(frozen=True)
class GeneratedFormula:
    """A generated sentence together with the signature it is written over."""

    formula: Formula
    signature: Signature


def _other(var: str) -> str:
    return "y" if var == "x" else "x"


def _elem_name(sig: Signature) -> str:
    return "elem" if "elem" not in sig else sig.fresh_name("elem", set())


# ---------------------------------------------------------------- unary FO² into FO²[D]


def gen_unary_translation(f: Formula, sig: Signature) -> GeneratedFormula:
    """
    # Encode a unary FO² sentence as a singular tree sentence over D.

        Every element becomes an elem node and each predicate it satisfies
        a descendant labelled with that predicate:
        p(x) becomes exists y. (D(x,y) & p(y)) and quantifiers are
        relativised to elem and at least one elem node is required.
        Boolean structure is kept as is.

    Parameters
    ----------
    > f : Formula

        Uses unary atoms only.

    > sig : Signature

    Returns
    -------
    > GeneratedFormula

        Over sig's predicates plus elem, binary symbols {D}, every
        predicate in the singular core.

    Example
    -------
    > f = exists x. p(x)

        return

            (exists x. elem(x)) & (exists x. (elem(x) & exists y. (D(x,y) & p(y))))
    #
    """
    if relations(f) or _has_equality(f):
        raise PreconditionError("the unary translation takes formulas without binary atoms")
    validate_formula(f, sig)
    elem = _elem_name(sig)

    def t(g: Formula) -> Formula:
        if isinstance(g, Const):
            return g
        if isinstance(g, Unary):
            w = _other(g.var)
            return Exists(w, And(Order("D", g.var, w), Unary(g.pred, w)))
        if isinstance(g, Not):
            return Not(t(g.body))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(t(g.left), t(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, And(Unary(elem, g.var), t(g.body)))
        if isinstance(g, Forall):
            return Forall(g.var, Implies(Unary(elem, g.var), t(g.body)))
        raise PreconditionError(f"unexpected node {g!r} in a unary formula")

    target = Signature(sig.unary + (elem,), frozenset({"D"}))
    # structures are non-empty
    return GeneratedFormula(conj(Exists("x", Unary(elem, "x")), t(f)), target)


def _has_equality(f: Formula) -> bool:
    if isinstance(f, (Order, Position)):
        return True
    return any(_has_equality(c) for c in children(f))


# ---------------------------------------------------------------- GF²[D] into singular GF²[D, C]


def tree_axiom(sig: Signature, elem: str) -> Formula:
    """Inner nodes are elem; every labelled node hangs below elem nodes only; everything below elem is labelled."""
    labels = sig.unary + (elem,)
    parts = [
        Forall("x", Implies(Unary(p, "x"), Forall("y", Implies(Order("D", "y", "x"), Unary(elem, "y")))))
        for p in labels
    ]
    below = disj(*(Unary(p, "y") for p in labels))
    parts.append(Forall("x", Implies(Unary(elem, "x"), Forall("y", Implies(Order("D", "x", "y"), below)))))
    return conj(*parts)


def gen_gf2_child_encoding(f: Formula, sig: Signature) -> GeneratedFormula:
    """
    # Encode a guarded sentence over D as a guarded sentence over D and C on singular trees.

        Nodes of the source tree become elem nodes; the predicates a node
        satisfies become leaf children, so p(x) turns into
        exists y. (C(x,y) & p(y)). Quantified variables are relativised to
        elem and the result is conjoined with the tree axiom and with
        exists x. elem(x).

    Parameters
    ----------
    > f : Formula

        A guarded sentence whose binary symbols are within {D}.

    > sig : Signature

    Returns
    -------
    > GeneratedFormula

        Over sig's predicates plus elem, binary symbols {C, D}.
    #
    """
    validate_formula(f, sig)
    if not relations(f) <= {"D"}:
        raise PreconditionError("the child encoding takes formulas over D only")
    if not is_guarded(f):
        raise UnguardedFormulaError(f"{f} is not in the guarded fragment")
    elem = _elem_name(sig)

    def t(g: Formula) -> Formula:
        if isinstance(g, Const):
            return g
        if isinstance(g, Unary):
            w = _other(g.var)
            return Exists(w, And(Order("C", g.var, w), Unary(g.pred, w)))
        if isinstance(g, (Order, Position)):
            return g
        if isinstance(g, Not):
            return Not(t(g.body))
        if isinstance(g, (And, Or, Implies, Iff)):
            return type(g)(t(g.left), t(g.right))
        return quantified(g)

    def quantified(g: Exists | Forall) -> Formula:
        kind = type(g)
        bound, body = quantifier_block(g)
        split = split_guard(body, kind, frozenset(bound) | free_vars(body))
        if split is None:
            raise UnguardedFormulaError(f"{g} has no guard")
        guard, rest = split
        relativise = [Unary(elem, v) for v in dict.fromkeys(bound)]
        if isinstance(guard, Unary):
            premise = [*relativise, t(guard)]
        else:
            premise = [guard, *relativise]
        if kind is Exists:
            inner: Formula = conj(*premise, *(t(r) for r in rest))
        else:
            inner = Implies(conj(*premise), disj(*(t(r) for r in rest)))
        for v in reversed(bound):
            inner = kind(v, inner)
        return inner

    target = Signature(sig.unary + (elem,), frozenset({"C", "D"}))
    return GeneratedFormula(conj(tree_axiom(sig, elem), Exists("x", Unary(elem, "x")), t(f)), target)


# ---------------------------------------------------------------- QBF


@dataclass(frozen=True)
class QBFInstance:
    """
    # ∃v_k ∀v_{k-1} … ∃v_2 ∀v_1 ψ′ with ψ′ in CNF.

        Literal i stands for v_i and -i for its negation. k is even, so the
        outermost variable is existential and the innermost universal. No
        clauses means ψ′ is true; an empty clause makes it false.
    #
    """

    variables: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.variables < 0 or self.variables % 2:
            raise QBFShapeError(f"the quantifier prefix needs an even number of variables, got {self.variables}")
        for clause in self.clauses:
            for lit in clause:
                if lit == 0 or abs(lit) > self.variables:
                    raise QBFShapeError(f"literal {lit} is outside v_1..v_{self.variables}")

    def is_existential(self, i: int) -> bool:
        return i % 2 == 0


def evaluate_qbf(q: QBFInstance) -> bool:
    """Truth of q by direct recursion over its prefix."""

    def matrix(values: dict[int, bool]) -> bool:
        return all(any(values[abs(lit)] == (lit > 0) for lit in clause) for clause in q.clauses)

    def value(i: int, values: dict[int, bool]) -> bool:
        if i == 0:
            return matrix(values)
        branches = (value(i - 1, {**values, i: b}) for b in (True, False))
        return any(branches) if q.is_existential(i) else all(branches)

    return value(q.variables, {})


def random_qbf(seed: int, variables: int, clauses: int, width: int = 3) -> QBFInstance:
    """Reproducible QBF with the given prefix length and clauses of up to width distinct literals."""
    rng = random.Random(seed)
    if variables == 0:
        return QBFInstance(0, ())
    drawn = []
    for _ in range(clauses):
        picked = rng.sample(range(1, variables + 1), min(width, variables))
        drawn.append(tuple(v if rng.random() < 0.5 else -v for v in picked))
    return QBFInstance(variables, tuple(drawn))


_QDIMACS_GRAMMAR = r"""
    start: _NL* header _NL+ (quant _NL+)* (clause _NL*)*

    header: "p" "cnf" INT INT
    quant: QUANTIFIER literal* "0"
    clause: literal* "0"
    literal: SIGNED_LIT

    QUANTIFIER: "e" | "a"
    SIGNED_LIT: /-?[1-9][0-9]*/
    COMMENT: /c(?:[ \t][^\n]*)?(?=\n)/

    %import common.INT
    %import common.NEWLINE -> _NL
    %import common.WS_INLINE
    %ignore WS_INLINE
    %ignore COMMENT
"""


class QdimacsTransformer(Transformer):
    def literal(self, children):
        return int(children[0])

    def header(self, children):
        return "header", int(children[0]), int(children[1])

    def quant(self, children):
        return "quant", str(children[0]), list(children[1:])

    def clause(self, children):
        return "clause", tuple(children)

    def start(self, children):
        return [c for c in children if isinstance(c, tuple)]


_qdimacs = Lark(_QDIMACS_GRAMMAR, start="start", parser="lalr", transformer=QdimacsTransformer())


def parse_qdimacs(text: str) -> QBFInstance:
    """
    # Read a QDIMACS instance into the alternating shape, padding with dummy variables.

        Variables missing from the prefix are existential and outermost.
        Walking the prefix outside in, a dummy variable of the expected
        quantifier is inserted wherever the quantifiers do not alternate
        ∃, ∀, ∃, …, and a final dummy ∀ is added when needed.

    Example
    -------
    > text = 'p cnf 1 1\\na 1 0\\n1 0\\n'

        return

            QBFInstance(variables=2, clauses=((1,),))
    #
    """
    if not text.endswith("\n"):
        text += "\n"
    try:
        items = _qdimacs.parse(text)
    except UnexpectedInput as exc:
        raise QBFShapeError(f"malformed QDIMACS input at line {getattr(exc, 'line', '?')}") from exc
    _, declared, _ = items[0]
    blocks = [(q, vs) for kind, q, vs in (i for i in items if i[0] == "quant")]
    clauses = [c for kind, c in (i for i in items if i[0] == "clause")]

    quantified = {v for _, vs in blocks for v in vs}
    used = {abs(lit) for c in clauses for lit in c}
    prefix = [("e", v) for v in sorted((used | set(range(1, declared + 1))) - quantified)]
    prefix += [(q, v) for q, vs in blocks for v in vs]

    shaped: list[int | None] = []
    for q, v in prefix:
        expected = "e" if len(shaped) % 2 == 0 else "a"
        if q != expected:
            shaped.append(None)
        shaped.append(v)
    if len(shaped) % 2:
        shaped.append(None)

    k = len(shaped)
    position = {v: k - j for j, v in enumerate(shaped) if v is not None}
    renamed = tuple(tuple(position[abs(lit)] * (1 if lit > 0 else -1) for lit in c) for c in clauses)
    log.debug("QDIMACS prefix of %d variables padded to %d", len(prefix), k)
    return QBFInstance(k, renamed)


def read_qdimacs(path: str | Path) -> QBFInstance:
    return parse_qdimacs(Path(path).read_text())


def _depth(i: int, var: str) -> Formula:
    """var lies at least i steps below a root node."""
    if i == 0:
        return Unary("root", var)
    w = _other(var)
    return Exists(w, And(Order("D", w, var), _depth(i - 1, w)))


def _height(i: int, k: int, var: str) -> Formula:
    """For i ≥ 1: var lies exactly k+1-i steps below the root; height 0 is a leaf."""
    if i == 0:
        return Unary("leaf", var)
    return And(_depth(k + 1 - i, var), Not(_depth(k + 2 - i, var)))


def _child(guard_var: str, *parts: Formula) -> Formula:
    w = _other(guard_var)
    return Exists(w, conj(Order("D", guard_var, w), *parts))


def _either(var: str) -> Formula:
    return Or(Unary("is_true", var), Unary("is_false", var))


def gen_qbf(q: QBFInstance) -> GeneratedFormula:
    """
    # Encode a QBF as a guarded sentence over D whose singular models are winning valuation trees.

        The model is a tree of depth k+1 below a root node: the node at
        height i carries the value of v_i as is_true or is_false, nodes at
        even height branch both ways, nodes at odd height pick one child,
        and every leaf checks ψ′ against the values on its path.

    Parameters
    ----------
    > q : QBFInstance

    Returns
    -------
    > GeneratedFormula

        Over root, leaf, is_true, is_false with binary symbols {D}.

    Example
    -------
    > q = QBFInstance(0, ())

        return

            exists x. root(x) & forall x. (root(x) -> exists y. (D(x,y) & leaf(y)))
    #
    """
    k = q.variables
    if k % 2:
        raise QBFShapeError(f"the quantifier prefix needs an even number of variables, got {k}")

    parts: list[Formula] = [Exists("x", Unary("root", "x"))]
    if k == 0:
        parts.append(Forall("x", Implies(Unary("root", "x"), _child("x", Unary("leaf", "y")))))
    else:
        parts.append(Forall("x", Implies(Unary("root", "x"), _child("x", _height(k, k, "y"), _either("y")))))
        for value in ("is_true", "is_false"):
            for i in range(2, k + 1):
                if i % 2 == 0:
                    step = And(
                        _child("x", _height(i - 1, k, "y"), Unary("is_true", "y")),
                        _child("x", _height(i - 1, k, "y"), Unary("is_false", "y")),
                    )
                else:
                    step = _child("x", _height(i - 1, k, "y"), _either("y"))
                parts.append(Forall("x", Implies(Unary(value, "x"), Implies(_height(i, k, "x"), step))))
            parts.append(
                Forall("x", Implies(Unary(value, "x"), Implies(_height(1, k, "x"), _child("x", Unary("leaf", "y")))))
            )

    def literal(lit: int) -> Formula:
        v = abs(lit)
        holds = Exists("y", conj(Order("D", "y", "x"), _height(v, k, "y"), Unary("is_true", "y")))
        return holds if lit > 0 else Not(holds)

    matrix = conj(*(disj(*(literal(lit) for lit in clause)) for clause in q.clauses))
    parts.append(Forall("x", Implies(Unary("leaf", "x"), matrix)))
    return GeneratedFormula(conj(*parts), QBF_SIGNATURE)


# ---------------------------------------------------------------- exponential degree


def _bit(i: int, var: str) -> Formula:
    w = _other(var)
    return Exists(w, And(Order("D", var, w), Unary(f"b{i}", w)))


def gen_expdeg(n: int) -> GeneratedFormula:
    """
    # A sentence of size polynomial in n whose singular models give the root 2^n children.

        The children of the root are the elem nodes; an elem node encodes
        the number whose bit i is set when some descendant is labelled
        b{i}. Some elem node encodes 0 and every elem node other than
        2^n-1 has an elem node encoding its successor.

    Example
    -------
    > n = 1

        return

            a sentence whose smallest singular model is a root with two elem
            children, one of them above a b0 leaf
    #
    """
    if n < 1:
        raise PreconditionError("gen_expdeg needs n ≥ 1")
    sig = Signature(("root", "elem", *(f"b{i}" for i in range(n))), frozenset({"D"}))

    root_def = Forall("x", Iff(Unary("root", "x"), Not(Exists("y", Order("D", "y", "x")))))
    below_root_only = Not(Exists("y", And(Order("D", "y", "x"), Not(Unary("root", "y")))))
    elem_def = Forall("x", Iff(Unary("elem", "x"), And(Not(Unary("root", "x")), below_root_only)))

    first = conj(Unary("elem", "x"), *(Not(_bit(i, "x")) for i in range(n)))
    all_set = conj(*(_bit(i, "x") for i in range(n)))

    options = []
    for j in range(n):
        lower = [_bit(i, "x") for i in range(j)] + [Not(_bit(i, "y")) for i in range(j)]
        higher = [Iff(_bit(i, "x"), _bit(i, "y")) for i in range(j + 1, n)]
        options.append(conj(*lower, Not(_bit(j, "x")), _bit(j, "y"), *higher))
    successor = conj(Unary("elem", "y"), disj(*options))

    f = conj(
        root_def,
        elem_def,
        Exists("x", first),
        Forall("x", Implies(And(Unary("elem", "x"), Not(all_set)), Exists("y", successor))),
    )
    return GeneratedFormula(f, sig)


def counter_value(t, v: int) -> int:
    """The number an elem node of a gen_expdeg model encodes."""
    below = {w for w in range(len(t)) if v in t.ancestors[w]}
    names = {name for w in below for name in t.label_names(w)}
    return sum(1 << int(name[1:]) for name in names if name.startswith("b") and name[1:].isdigit())


# ---------------------------------------------------------------- sibling position gadgets


def gen_path_gadget(i: int, style: str = "adjacent") -> Formula:
    """
    # An open formula in y that fixes y's position among its siblings.

        adjacent: Path_0(y) = ~exists x. N(x,y) and
        Path_{i+1}(y) = exists x. (N(x,y) & Path_i(x)), true exactly at
        the (i+1)-th sibling. transitive: Path_{≥i} & ~Path_{≥i+1} over F,
        where Path_{≥i+1}(y) = exists x. (F(x,y) & Path_{≥i}(x)).

    Parameters
    ----------
    > i : integer

    > style : 'adjacent' or 'transitive'

    >> default : 'adjacent'

    Example
    -------
    > i = 0, style = 'adjacent'

        return

            ~exists x. N(x,y)
    #
    """
    if i < 0:
        raise PreconditionError("gadget index must be non-negative")
    if style == "adjacent":
        return _adjacent(i, "y")
    if style == "transitive":
        return conj(_at_least(i, "y"), Not(_at_least(i + 1, "y")))
    raise PreconditionError(f"unknown gadget style '{style}', expected 'adjacent' or 'transitive'")


def _adjacent(i: int, var: str) -> Formula:
    w = _other(var)
    if i == 0:
        return Not(Exists(w, Order("N", w, var)))
    return Exists(w, And(Order("N", w, var), _adjacent(i - 1, w)))


def _at_least(i: int, var: str) -> Formula:
    if i == 0:
        return TRUE
    w = _other(var)
    inner = _at_least(i - 1, w)
    return Exists(w, Order("F", w, var) if inner == TRUE else And(Order("F", w, var), inner))
