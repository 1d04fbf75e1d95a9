"""Signatures, the FO2/GF2 abstract syntax, the formula grammar, ENNF and guardedness."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import IntEnum
from functools import reduce

from lark import Lark, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from fo2_trees.checks import (
    BINARY_SYMBOLS,
    FormulaSyntaxError,
    OrderAtomError,
    PreconditionError,
    ThirdVariableError,
    UndeclaredPredicateError,
    validate_signature,
)

log = logging.getLogger(__name__)

VARIABLES = ("x", "y")


class Theta(IntEnum):
    """
    The ten order formulas. A member names the position of the second
    node relative to the first: DOWN means "is a child of the first node".
    """

    DOWN = 0
    UP = 1
    DOWN_PLUS = 2
    UP_PLUS = 3
    RIGHT = 4
    LEFT = 5
    RIGHT_PLUS = 6
    LEFT_PLUS = 7
    FREE = 8
    SAME = 9

    @property
    def inverse(self) -> Theta:
        return _INVERSE[self]

    @property
    def slot_name(self) -> str:
        return SLOT_NAMES[self]


_INVERSE = {
    Theta.DOWN: Theta.UP,
    Theta.UP: Theta.DOWN,
    Theta.DOWN_PLUS: Theta.UP_PLUS,
    Theta.UP_PLUS: Theta.DOWN_PLUS,
    Theta.RIGHT: Theta.LEFT,
    Theta.LEFT: Theta.RIGHT,
    Theta.RIGHT_PLUS: Theta.LEFT_PLUS,
    Theta.LEFT_PLUS: Theta.RIGHT_PLUS,
    Theta.FREE: Theta.FREE,
    Theta.SAME: Theta.SAME,
}

SLOT_NAMES = {
    Theta.DOWN: "down",
    Theta.UP: "up",
    Theta.DOWN_PLUS: "down+",
    Theta.UP_PLUS: "up+",
    Theta.RIGHT: "right",
    Theta.LEFT: "left",
    Theta.RIGHT_PLUS: "right+",
    Theta.LEFT_PLUS: "left+",
    Theta.FREE: "free",
    Theta.SAME: "same",
}
_SLOT_BY_NAME = {name: theta for theta, name in SLOT_NAMES.items()}

ALL_SLOTS = frozenset(Theta)

# positions θ[x,y] in which rel(x,y) holds
RELATION_SLOTS = {
    "C": frozenset({Theta.DOWN}),
    "D": frozenset({Theta.DOWN, Theta.DOWN_PLUS}),
    "N": frozenset({Theta.RIGHT}),
    "F": frozenset({Theta.RIGHT, Theta.RIGHT_PLUS}),
    "=": frozenset({Theta.SAME}),
}

BELOW = RELATION_SLOTS["D"]
ABOVE = frozenset({Theta.UP, Theta.UP_PLUS})
SIBLINGS_AND_FREE = frozenset({Theta.RIGHT, Theta.LEFT, Theta.RIGHT_PLUS, Theta.LEFT_PLUS, Theta.FREE})


def invert_slots(slots: frozenset[Theta]) -> frozenset[Theta]:
    return frozenset(theta.inverse for theta in slots)


@dataclass(frozen=True)
class Signature:
    """
    # A signature τ = τ₀ ∪ τ_bin.

        unary is the ordered alphabet τ₀ (bit i of a 1-type is unary[i]),
        binary the navigational symbols in use, and singular_core the
        predicates that carry exactly one label per node in singular trees.
    #
    """

    unary: tuple[str, ...]
    binary: frozenset[str] = frozenset({"D"})
    singular_core: tuple[str, ...] | None = None
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "unary", tuple(self.unary))
        object.__setattr__(self, "binary", frozenset(self.binary))
        if self.singular_core is not None:
            object.__setattr__(self, "singular_core", tuple(self.singular_core))
        validate_signature(self.unary, self.binary, self.singular_core)
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(self.unary)})

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self.unary)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UndeclaredPredicateError(f"predicate '{name}' is not declared in the signature") from None

    def mask(self, names) -> int:
        return sum(1 << self.index(name) for name in set(names))

    def names(self, mask: int) -> tuple[str, ...]:
        return tuple(name for i, name in enumerate(self.unary) if mask >> i & 1)

    @property
    def core(self) -> tuple[str, ...]:
        return self.singular_core if self.singular_core is not None else self.unary

    @property
    def core_mask(self) -> int:
        return self.mask(self.core)

    def extend(self, fresh) -> Signature:
        return Signature(self.unary + tuple(fresh), self.binary, self.singular_core)

    def with_core(self, core) -> Signature:
        return Signature(self.unary, self.binary, tuple(core) if core is not None else None)

    def fresh_name(self, prefix: str, taken: set[str]) -> str:
        """Smallest `<prefix><k>` not declared here and not in `taken`."""
        k = 0
        while f"{prefix}{k}" in self._index or f"{prefix}{k}" in taken:
            k += 1
        return f"{prefix}{k}"


class Formula:
    """Base of the formula node classes."""

    __slots__ = ()

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Unary(Formula):
    pred: str
    var: str


@dataclass(frozen=True)
class Order(Formula):
    """An order atom rel(left, right); rel is one of C, D, N, F or '='."""

    rel: str
    left: str
    right: str


@dataclass(frozen=True)
class Position(Formula):
    """
    The disjunction of the order formulas in `slots`, applied to (left, right).
    Produced when negated order atoms are expanded.
    """

    slots: frozenset
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(_Binary):
    pass


@dataclass(frozen=True)
class Or(_Binary):
    pass


@dataclass(frozen=True)
class Implies(_Binary):
    pass


@dataclass(frozen=True)
class Iff(_Binary):
    pass


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


TRUE = Const(True)
FALSE = Const(False)

_CONNECTIVES = {And: "&", Or: "|", Implies: "->", Iff: "<->"}
ATOMS = (Const, Unary, Order, Position)
QUANTIFIERS = (Exists, Forall)


def conj(*parts: Formula) -> Formula:
    parts = [p for p in parts if p != TRUE]
    if not parts:
        return TRUE
    return reduce(lambda acc, p: And(acc, p), parts)


def disj(*parts: Formula) -> Formula:
    parts = [p for p in parts if p != FALSE]
    if not parts:
        return FALSE
    return reduce(lambda acc, p: Or(acc, p), parts)


def conjuncts(f: Formula) -> list[Formula]:
    """The flattened top-level conjunction of f."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def atom_slots(f: Order | Position) -> frozenset[Theta]:
    """Positions θ[x,y] in which the atom holds, oriented from x to y."""
    slots = RELATION_SLOTS[f.rel] if isinstance(f, Order) else f.slots
    return slots if f.left == "x" else invert_slots(slots)


def order_formula(slots: frozenset[Theta], left: str = "x", right: str = "y") -> Formula:
    """The shortest atom expressing "right is in one of `slots` relative to left"."""
    slots = frozenset(slots)
    if slots == ALL_SLOTS:
        return TRUE
    for rel in ("=",) + BINARY_SYMBOLS:
        if RELATION_SLOTS[rel] == slots:
            return Order(rel, left, right)
        if RELATION_SLOTS[rel] == invert_slots(slots):
            return Order(rel, right, left)
    return Position(slots, left, right)


# ---------------------------------------------------------------- traversals


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, _Binary):
        return (f.left, f.right)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    return ()


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, Const):
        return frozenset()
    if isinstance(f, Unary):
        return frozenset({f.var})
    if isinstance(f, (Order, Position)):
        return frozenset({f.left, f.right})
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    return frozenset().union(*(free_vars(c) for c in children(f)))


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def size(f: Formula) -> int:
    """Number of AST nodes."""
    return 1 + sum(size(c) for c in children(f))


def predicates(f: Formula) -> frozenset[str]:
    if isinstance(f, Unary):
        return frozenset({f.pred})
    return frozenset().union(*(predicates(c) for c in children(f)))


def relations(f: Formula) -> frozenset[str]:
    """Binary symbols used by order atoms of f ('=' excluded)."""
    if isinstance(f, Order):
        return frozenset() if f.rel == "=" else frozenset({f.rel})
    return frozenset().union(*(relations(c) for c in children(f)))


def variables(f: Formula) -> frozenset[str]:
    if isinstance(f, Unary):
        return frozenset({f.var})
    if isinstance(f, (Order, Position)):
        return frozenset({f.left, f.right})
    own = frozenset({f.var}) if isinstance(f, QUANTIFIERS) else frozenset()
    return own.union(*(variables(c) for c in children(f)))


def position_atoms(f: Formula) -> list[frozenset[Theta]]:
    """Slot sets (oriented x to y) of every two-variable order or position atom of f."""
    if isinstance(f, (Order, Position)):
        return [atom_slots(f)] if f.left != f.right else []
    found = []
    for c in children(f):
        found.extend(position_atoms(c))
    return found


def rebuild(f: Formula, parts: tuple[Formula, ...]) -> Formula:
    if isinstance(f, Not):
        return Not(parts[0])
    if isinstance(f, _Binary):
        return type(f)(parts[0], parts[1])
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.var, parts[0])
    return f


def swap_vars(f: Formula) -> Formula:
    """Rename x to y and y to x throughout f."""
    other = {"x": "y", "y": "x"}
    if isinstance(f, Unary):
        return Unary(f.pred, other[f.var])
    if isinstance(f, Order):
        return Order(f.rel, other[f.left], other[f.right])
    if isinstance(f, Position):
        return Position(f.slots, other[f.left], other[f.right])
    if isinstance(f, QUANTIFIERS):
        return type(f)(other[f.var], swap_vars(f.body))
    return rebuild(f, tuple(swap_vars(c) for c in children(f)))


def replace(f: Formula, mapping: dict[Formula, Formula]) -> Formula:
    """Replace every subformula that is a key of `mapping`, outermost first."""
    if f in mapping:
        return mapping[f]
    parts = children(f)
    if not parts:
        return f
    return rebuild(f, tuple(replace(c, mapping) for c in parts))


def simplify(f: Formula) -> Formula:
    """Fold truth constants and atoms whose two arguments coincide."""
    if isinstance(f, Order) and f.left == f.right:
        return Const(f.rel == "=")
    if isinstance(f, Position) and f.left == f.right:
        return Const(Theta.SAME in f.slots)
    if isinstance(f, Position) and f.slots == ALL_SLOTS:
        return TRUE
    if isinstance(f, Position) and not f.slots:
        return FALSE
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, Not):
        body = simplify(f.body)
        return Const(not body.value) if isinstance(body, Const) else Not(body)
    if isinstance(f, QUANTIFIERS):
        # domains are nonempty
        body = simplify(f.body)
        return body if isinstance(body, Const) else type(f)(f.var, body)
    left, right = simplify(f.left), simplify(f.right)
    if isinstance(f, And):
        if FALSE in (left, right):
            return FALSE
        return right if left == TRUE else left if right == TRUE else And(left, right)
    if isinstance(f, Or):
        if TRUE in (left, right):
            return TRUE
        return right if left == FALSE else left if right == FALSE else Or(left, right)
    if isinstance(f, Implies):
        if left == FALSE or right == TRUE:
            return TRUE
        if left == TRUE:
            return right
        if right == FALSE:
            return simplify(Not(left))
        return Implies(left, right)
    # Iff
    if isinstance(left, Const) and isinstance(right, Const):
        return Const(left.value == right.value)
    if isinstance(left, Const):
        left, right = right, left
    if right == TRUE:
        return left
    if right == FALSE:
        return simplify(Not(left))
    return Iff(left, right)


def specialize(f: Formula, slots: frozenset[Theta]) -> Formula:
    """
    Fix every x/y order atom of f to its truth value in the positions `slots`.
    Atoms must be constant on `slots`; quantified subformulas are left as they are.
    """
    if isinstance(f, (Order, Position)):
        if f.left == f.right:
            return simplify(f)
        holds = atom_slots(f)
        if slots <= holds:
            return TRUE
        if not slots & holds:
            return FALSE
        raise PreconditionError(f"{pretty(f)} is not constant on {sorted(s.slot_name for s in slots)}")
    if isinstance(f, ATOMS) or isinstance(f, QUANTIFIERS):
        return f
    return simplify(rebuild(f, tuple(specialize(c, slots) for c in children(f))))


def theta_classes(atoms: list[frozenset[Theta]]) -> list[frozenset[Theta]]:
    """
    # Group the ten order formulas into the classes the given atoms cannot tell apart.

        Equality always separates SAME from the rest. Classes are returned
        ordered by their smallest member.
    #
    """
    groups: dict[tuple, set[Theta]] = {}
    for theta in Theta:
        key = (theta == Theta.SAME,) + tuple(theta in slots for slots in atoms)
        groups.setdefault(key, set()).add(theta)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def signature_classes(binary: frozenset[str]) -> list[frozenset[Theta]]:
    """The order formulas that the binary symbols `binary` can define, as slot classes."""
    atoms = []
    for rel in binary:
        atoms.append(RELATION_SLOTS[rel])
        atoms.append(invert_slots(RELATION_SLOTS[rel]))
    return theta_classes(atoms)


# ---------------------------------------------------------------- printing


def pretty(f: Formula) -> str:
    """
    # Render a formula in the concrete syntax accepted by parse_formula.

        Binary connectives are always parenthesised and quantified
        operands are wrapped, so parse_formula(pretty(f)) == f.

    Example
    -------
    > f = Exists('y', And(Order('D', 'x', 'y'), Unary('p', 'y')))

        return

            'exists y. (D(x,y) & p(y))'
    #
    """
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Unary):
        return f"{f.pred}({f.var})"
    if isinstance(f, Order):
        if f.rel == "=":
            return f"{f.left}={f.right}"
        return f"{f.rel}({f.left},{f.right})"
    if isinstance(f, Position):
        names = ",".join(SLOT_NAMES[t] for t in sorted(f.slots))
        return f"pos[{names}]({f.left},{f.right})"
    if isinstance(f, Not):
        return "~" + _operand(f.body)
    if isinstance(f, _Binary):
        return f"({_operand(f.left)} {_CONNECTIVES[type(f)]} {_operand(f.right)})"
    keyword = "exists" if isinstance(f, Exists) else "forall"
    return f"{keyword} {f.var}. {pretty(f.body)}"


def _operand(f: Formula) -> str:
    text = pretty(f)
    return f"({text})" if isinstance(f, QUANTIFIERS) else text


# ---------------------------------------------------------------- parsing

_GRAMMAR = r"""
    ?start: formula

    ?formula: quantified
            | iff

    quantified: "exists" NAME "." formula -> exists
              | "forall" NAME "." formula -> forall

    ?iff: imp
        | iff "<->" imp -> biconditional

    ?imp: disj
        | disj "->" imp -> implication

    ?disj: conj
         | disj "|" conj -> disjunction

    ?conj: neg
         | conj "&" neg -> conjunction

    ?neg: "~" neg -> negation
        | atom

    ?atom: NAME "(" NAME ")" -> unary_atom
         | ORDER "(" NAME "," NAME ")" -> order_atom
         | NAME "=" NAME -> equality
         | "pos" "[" SLOT ("," SLOT)* "]" "(" NAME "," NAME ")" -> position_atom
         | "true" -> true_const
         | "false" -> false_const
         | "(" formula ")"

    ORDER: "C" | "D" | "N" | "F"
    SLOT: /(down|up|right|left)\+?|free|same/
    NAME: /[a-z_][A-Za-z0-9_]*/
    COMMENT: /#[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""


class FormulaTreeTransformer(Transformer):
    """Turns the lark parse tree into Formula nodes."""

    def exists(self, children):
        return Exists(str(children[0]), children[1])

    def forall(self, children):
        return Forall(str(children[0]), children[1])

    def biconditional(self, children):
        return Iff(children[0], children[1])

    def implication(self, children):
        return Implies(children[0], children[1])

    def disjunction(self, children):
        return Or(children[0], children[1])

    def conjunction(self, children):
        return And(children[0], children[1])

    def negation(self, children):
        return Not(children[0])

    def unary_atom(self, children):
        return Unary(str(children[0]), str(children[1]))

    def order_atom(self, children):
        return Order(str(children[0]), str(children[1]), str(children[2]))

    def equality(self, children):
        return Order("=", str(children[0]), str(children[1]))

    def position_atom(self, children):
        *slots, left, right = children
        return Position(frozenset(_SLOT_BY_NAME[str(s)] for s in slots), str(left), str(right))

    def true_const(self, children):
        return TRUE

    def false_const(self, children):
        return FALSE


_parser = Lark(_GRAMMAR, start="start", parser="lalr", transformer=FormulaTreeTransformer())


def parse_formula(text: str, sig: Signature) -> Formula:
    """
    # Parse formula text against a signature.

        Raises FormulaSyntaxError with the position of the offending token,
        ThirdVariableError for variables other than x and y,
        UndeclaredPredicateError for predicates missing from the signature
        and OrderAtomError for order atoms outside its binary symbols.

    Parameters
    ----------
    > text : string

        Formula text, e.g. 'exists y. (D(x,y) & p(y))'

    > sig : Signature

    Returns
    -------
    > Formula

    Example
    -------
    > text = 'exists z. p(z)'

        raise

            ThirdVariableError: variable 'z' is not one of x, y
    #
    """
    try:
        f = _parser.parse(text)
    except UnexpectedEOF as exc:
        raise FormulaSyntaxError("unexpected end of formula") from exc
    except (UnexpectedCharacters, UnexpectedToken) as exc:
        raise FormulaSyntaxError(f"unexpected input near {_near(text, exc)!r}", exc.line, exc.column) from exc
    except UnexpectedInput as exc:
        raise FormulaSyntaxError(str(exc), getattr(exc, "line", None), getattr(exc, "column", None)) from exc

    validate_formula(f, sig)
    return f


def _near(text: str, exc: UnexpectedInput) -> str:
    pos = getattr(exc, "pos_in_stream", None)
    if pos is None:
        return ""
    return text[pos:pos + 12]


def validate_formula(f: Formula, sig: Signature) -> None:
    """Raise if f uses a third variable, an undeclared predicate or a foreign order atom."""
    bad = variables(f) - set(VARIABLES)
    if bad:
        raise ThirdVariableError(f"variable '{sorted(bad)[0]}' is not one of x, y")
    undeclared = sorted(p for p in predicates(f) if p not in sig)
    if undeclared:
        raise UndeclaredPredicateError(f"undeclared predicates {undeclared}")
    foreign = relations(f) - sig.binary
    if foreign:
        raise OrderAtomError(f"order atoms {sorted(foreign)} are not in the signature's binary symbols {sorted(sig.binary)}")


# ---------------------------------------------------------------- ENNF


def to_ennf(f: Formula) -> Formula:
    """
    # Existential negation normal form.

        No universal quantifiers remain and negations sit only in front of
        unary atoms and existential quantifiers. A negated order atom is
        replaced by one position atom covering the remaining order
        formulas. Biconditionals are kept, which keeps the result within
        twice the size of f.

    Example
    -------
    > f = ~forall x. p(x)

        return

            exists x. ~p(x)
    #
    """
    return _ennf(f, True)


def _ennf(f: Formula, positive: bool) -> Formula:
    if isinstance(f, Const):
        return Const(f.value == positive)
    if isinstance(f, Unary):
        return f if positive else Not(f)
    if isinstance(f, (Order, Position)):
        if positive:
            return f
        if f.left == f.right:
            return Const(not simplify(f).value)
        slots = RELATION_SLOTS[f.rel] if isinstance(f, Order) else f.slots
        return Position(ALL_SLOTS - slots, f.left, f.right)
    if isinstance(f, Not):
        return _ennf(f.body, not positive)
    if isinstance(f, And):
        kind = And if positive else Or
        return kind(_ennf(f.left, positive), _ennf(f.right, positive))
    if isinstance(f, Or):
        kind = Or if positive else And
        return kind(_ennf(f.left, positive), _ennf(f.right, positive))
    if isinstance(f, Implies):
        if positive:
            return Or(_ennf(f.left, False), _ennf(f.right, True))
        return And(_ennf(f.left, True), _ennf(f.right, False))
    if isinstance(f, Iff):
        return Iff(_ennf(f.left, positive), _ennf(f.right, True))
    if isinstance(f, Exists):
        body = Exists(f.var, _ennf(f.body, True))
        return body if positive else Not(body)
    # Forall
    body = Exists(f.var, _ennf(f.body, False))
    return Not(body) if positive else body


def is_ennf(f: Formula) -> bool:
    if isinstance(f, Forall):
        return False
    if isinstance(f, Not):
        return isinstance(f.body, (Unary, Exists)) and is_ennf(f.body)
    return all(is_ennf(c) for c in children(f))


def not_sim_atom(sig: Signature) -> Formula:
    """
    # The open formula x≁y: x and y are distinct and related by no binary predicate of sig.

        Uses the descendant (resp. following-sibling) symbol when present,
        since it subsumes child (resp. next-sibling).

    Example
    -------
    > sig.binary = {'D'}

        return

            ((~x=y & ~D(x,y)) & ~D(y,x))
    #
    """
    if not sig.binary:
        raise PreconditionError("x≁y needs at least one binary predicate")
    parts: list[Formula] = [Not(Order("=", "x", "y"))]
    for group in (("D", "C"), ("F", "N")):
        rel = next((r for r in group if r in sig.binary), None)
        if rel is not None:
            parts += [Not(Order(rel, "x", "y")), Not(Order(rel, "y", "x"))]
    return conj(*parts)


# ---------------------------------------------------------------- guardedness


def atom_vars(f: Formula) -> frozenset[str] | None:
    """Variables covered by f when f can serve as a guard, else None."""
    if isinstance(f, Order):
        return frozenset({f.left, f.right})
    if isinstance(f, Unary):
        return frozenset({f.var})
    return None


def _positive_conjuncts(f: Formula) -> list[Formula]:
    """Conjuncts of f, reading negated disjunctions and implications as conjunctions."""
    if isinstance(f, And):
        return _positive_conjuncts(f.left) + _positive_conjuncts(f.right)
    if isinstance(f, Not) and isinstance(f.body, Or):
        return _positive_conjuncts(Not(f.body.left)) + _positive_conjuncts(Not(f.body.right))
    if isinstance(f, Not) and isinstance(f.body, Implies):
        return _positive_conjuncts(f.body.left) + _positive_conjuncts(Not(f.body.right))
    return [f]


def split_guard(body: Formula, kind: type, needed: frozenset[str]) -> tuple[Formula, list[Formula]] | None:
    """
    # Find the guard of a quantifier body.

        For an existential body g ∧ ψ₁ ∧ … the guard is a conjunct; for a
        universal body g ⇒ ψ (or ¬g ∨ ψ) it is a premise conjunct. The
        guard must be an atom covering `needed`. Returns the guard and the
        remaining parts (for a universal: the remaining premises followed
        by the conclusion), or None.
    #
    """

    def covers(g):
        vs = atom_vars(g)
        return vs is not None and needed <= vs

    if kind is Exists:
        parts = _positive_conjuncts(body)
        for i, g in enumerate(parts):
            if covers(g):
                return g, parts[:i] + parts[i + 1:]
        return None

    if isinstance(body, Implies):
        premises = conjuncts(body.left)
        for i, g in enumerate(premises):
            if covers(g):
                rest = premises[:i] + premises[i + 1:]
                return g, ([Not(conj(*rest))] if rest else []) + [body.right]
        return None
    if isinstance(body, Or):
        options = [body.left, body.right]
        for i, g in enumerate(options):
            if isinstance(g, Not) and covers(g.body):
                return g.body, [options[1 - i]]
        return None
    if isinstance(body, Not) and covers(body.body):
        return body.body, [FALSE]
    if isinstance(body, Not) and isinstance(body.body, And):
        premises = conjuncts(body.body)
        for i, g in enumerate(premises):
            if covers(g):
                return g, [Not(conj(*(premises[:i] + premises[i + 1:])))]
    return None


def quantifier_block(f: Exists | Forall) -> tuple[list[str], Formula]:
    """Variables bound by the run of same-kind quantifiers starting at f, and the body below it."""
    kind = type(f)
    bound = []
    body: Formula = f
    while isinstance(body, kind):
        bound.append(body.var)
        body = body.body
    return bound, body


def is_guarded(f: Formula) -> bool:
    """
    # Whether f belongs to GF².

        Every quantifier block must be relativised by an atom covering the
        bound variables and the free variables of its body; equalities
        x=x and x=y count as guards, and a unary atom guards a
        one-variable body.

    Example
    -------
    > f = exists y. (p(y) & q(x))

        return

            False
    #
    """
    if isinstance(f, ATOMS):
        return True
    if isinstance(f, QUANTIFIERS):
        bound, body = quantifier_block(f)
        needed = free_vars(body) | set(bound)
        found = split_guard(body, type(f), needed)
        if found is None:
            return False
        return all(is_guarded(part) for part in found[1])
    return all(is_guarded(c) for c in children(f))
