"""1-types, full types, reduced full types and the consistency conditions on them."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from fo2_trees.checks import InvalidTypeError, PreconditionError, SignatureMismatch
from fo2_trees.formula import (
    ABOVE,
    BELOW,
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
    Theta,
    Unary,
    atom_slots,
    pretty,
    simplify,
)

log = logging.getLogger(__name__)

# A 1-type is a bitmask over Signature.unary.
OneType = int

_EMPTY: frozenset = frozenset()

_AT_MOST_ONE = (Theta.UP, Theta.RIGHT, Theta.LEFT)
_EMPTY_IMPLIES_EMPTY = (
    (Theta.UP, Theta.UP_PLUS),
    (Theta.DOWN, Theta.DOWN_PLUS),
    (Theta.LEFT, Theta.LEFT_PLUS),
    (Theta.RIGHT, Theta.RIGHT_PLUS),
)
_SIBLING_SLOTS = (Theta.LEFT, Theta.LEFT_PLUS, Theta.RIGHT, Theta.RIGHT_PLUS, Theta.FREE)


@dataclass(frozen=True)
class FullType:
    """
    # A full type ᾱ: for each of the ten order formulas, the set of 1-types found in that position.

        Construction checks the cardinality constraints (UP, RIGHT, LEFT hold
        at most one 1-type, SAME exactly one) and emptiness propagation
        (UP empty forces UP_PLUS empty, and likewise for DOWN, LEFT, RIGHT).
    #
    """

    slots: tuple

    def __post_init__(self):
        slots = tuple(frozenset(s) for s in self.slots)
        object.__setattr__(self, "slots", slots)
        if len(slots) != len(Theta):
            raise InvalidTypeError(f"a full type has {len(Theta)} slots, got {len(slots)}")
        if len(slots[Theta.SAME]) != 1:
            raise InvalidTypeError("the SAME slot must hold exactly one 1-type")
        for theta in _AT_MOST_ONE:
            if len(slots[theta]) > 1:
                raise InvalidTypeError(f"the {theta.slot_name} slot holds more than one 1-type")
        for theta, dependent in _EMPTY_IMPLIES_EMPTY:
            if not slots[theta] and slots[dependent]:
                raise InvalidTypeError(f"{dependent.slot_name} is nonempty while {theta.slot_name} is empty")

    @classmethod
    def build(cls, alpha: OneType, **named: Iterable[OneType]) -> FullType:
        """FullType.build(alpha, DOWN={b}, FREE={c}) with all other slots empty."""
        slots = [_EMPTY] * len(Theta)
        slots[Theta.SAME] = frozenset({alpha})
        for name, members in named.items():
            slots[Theta[name]] = frozenset(members)
        return cls(tuple(slots))

    @classmethod
    def from_mapping(cls, mapping: Mapping[Theta, Iterable[OneType]]) -> FullType:
        return cls(tuple(frozenset(mapping.get(theta, ())) for theta in Theta))

    def __getitem__(self, theta: Theta) -> frozenset:
        return self.slots[theta]

    @property
    def alpha(self) -> OneType:
        return next(iter(self.slots[Theta.SAME]))

    def union(self, thetas: Iterable[Theta]) -> frozenset:
        return frozenset().union(*(self.slots[t] for t in thetas))

    def replace(self, **named: Iterable[OneType]) -> FullType:
        slots = list(self.slots)
        for name, members in named.items():
            slots[Theta[name]] = frozenset(members)
        return FullType(tuple(slots))

    def members(self) -> frozenset:
        return self.union(Theta)


@dataclass(frozen=True)
class ReducedFullType:
    """(α, A, B, F): own 1-type, 1-types above, below, and among siblings or free nodes."""

    alpha: OneType
    above: frozenset
    below: frozenset
    free_and_sib: frozenset


def reduce(ft: FullType) -> ReducedFullType:
    return ReducedFullType(ft.alpha, ft.union(ABOVE), ft.union(BELOW), ft.union(_SIBLING_SLOTS))


# ---------------------------------------------------------------- evaluation


def evaluate(f: Formula, a: OneType, b: OneType, theta: Theta, index: Mapping[str, int]) -> bool:
    """
    # Truth of a quantifier-free formula when x has 1-type a, y has 1-type b and y sits at θ[x,y].

        Equality holds exactly under SAME; order atoms hold per the order
        formula in force.
    #
    """
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Unary):
        return bool((a if f.var == "x" else b) >> index[f.pred] & 1)
    if isinstance(f, (Order, Position)):
        if f.left == f.right:
            return simplify(f).value
        return theta in atom_slots(f)
    if isinstance(f, Not):
        return not evaluate(f.body, a, b, theta, index)
    if isinstance(f, And):
        return evaluate(f.left, a, b, theta, index) and evaluate(f.right, a, b, theta, index)
    if isinstance(f, Or):
        return evaluate(f.left, a, b, theta, index) or evaluate(f.right, a, b, theta, index)
    if isinstance(f, Implies):
        return not evaluate(f.left, a, b, theta, index) or evaluate(f.right, a, b, theta, index)
    if isinstance(f, Iff):
        return evaluate(f.left, a, b, theta, index) == evaluate(f.right, a, b, theta, index)
    raise PreconditionError(f"quantified formula {pretty(f)} cannot be evaluated on a pair of 1-types")


PairTest = Callable[[OneType, OneType, Theta], bool]


def compile_matrix(f: Formula, index: Mapping[str, int]) -> PairTest:
    """Compile a quantifier-free formula into a closure over (a, b, θ)."""
    if isinstance(f, Const):
        value = f.value
        return lambda a, b, t: value
    if isinstance(f, Unary):
        bit = 1 << index[f.pred]
        if f.var == "x":
            return lambda a, b, t: bool(a & bit)
        return lambda a, b, t: bool(b & bit)
    if isinstance(f, (Order, Position)):
        if f.left == f.right:
            value = simplify(f).value
            return lambda a, b, t: value
        slots = atom_slots(f)
        return lambda a, b, t: t in slots
    if isinstance(f, Not):
        inner = compile_matrix(f.body, index)
        return lambda a, b, t: not inner(a, b, t)
    if isinstance(f, (And, Or, Implies, Iff)):
        left = compile_matrix(f.left, index)
        right = compile_matrix(f.right, index)
        if isinstance(f, And):
            return lambda a, b, t: left(a, b, t) and right(a, b, t)
        if isinstance(f, Or):
            return lambda a, b, t: left(a, b, t) or right(a, b, t)
        if isinstance(f, Implies):
            return lambda a, b, t: not left(a, b, t) or right(a, b, t)
        return lambda a, b, t: left(a, b, t) == right(a, b, t)
    if isinstance(f, (Exists, Forall)):
        raise PreconditionError(f"quantified formula {pretty(f)} cannot be compiled to a pair test")
    raise PreconditionError(f"unknown formula node {f!r}")


class TypeContext:
    """
    # Compiled view of a normal form: pair compatibility and witness tests over 1-types.

        ok(a, b, θ) is χ(a, b, θ) ∧ χ(b, a, θ⁻¹), memoised.
    #
    """

    def __init__(self, nf):
        self.nf = nf
        sig = nf.extended_signature
        self.sig = sig
        self.width = len(sig)
        index = {name: i for i, name in enumerate(sig.unary)}
        self.index = index
        self._chi = [compile_matrix(c, index) for c in nf.universal_conjuncts]
        self.witnesses = [
            (1 << index[w.trigger], frozenset(w.eta), compile_matrix(w.matrix, index), w)
            for w in nf.witness_conjuncts
        ]
        self._ok: dict = {}

    def chi(self, a: OneType, b: OneType, theta: Theta) -> bool:
        return all(test(a, b, theta) for test in self._chi)

    def ok(self, a: OneType, b: OneType, theta: Theta) -> bool:
        key = (a, b, theta)
        found = self._ok.get(key)
        if found is None:
            found = self.chi(a, b, theta) and self.chi(b, a, theta.inverse)
            self._ok[key] = found
            self._ok[(b, a, theta.inverse)] = found
        return found

    def self_ok(self, a: OneType) -> bool:
        return self.ok(a, a, Theta.SAME)

    def triggered(self, a: OneType):
        return [w for w in self.witnesses if a & w[0]]

    def check_width(self, types: Iterable[OneType]) -> None:
        limit = 1 << self.width
        for t in types:
            if not 0 <= t < limit:
                raise SignatureMismatch(f"1-type {t:#x} uses predicates outside the normal form's signature")

    def phi_consistent(self, ft: FullType) -> bool:
        alpha = ft.alpha
        for theta in Theta:
            for beta in ft[theta]:
                if not self.ok(alpha, beta, theta):
                    return False
        for bit, eta, psi, _ in self.witnesses:
            if not alpha & bit:
                continue
            if not any(psi(alpha, beta, theta) for theta in eta for beta in ft[theta]):
                return False
        return True


@lru_cache(maxsize=64)
def type_context(nf) -> TypeContext:
    return TypeContext(nf)


def phi_consistent(ft: FullType, nf) -> bool:
    """
    # Whether the element of a full type can neither violate χ nor lack a witness.

        (a) every 1-type α' in slot θ is compatible with α under θ, checked
        by evaluating χ on the pair in both directions; (b) every witness
        conjunct triggered by α finds some α' in a slot of its η with
        (α, α') ⊨ ψ.

    Parameters
    ----------
    > ft : FullType

    > nf : NormalFormFormula

        Its extended signature must cover every 1-type of ft.

    Returns
    -------
    > boolean
    #
    """
    context = type_context(nf)
    context.check_width(ft.members())
    return context.phi_consistent(ft)


def is_combined_of(ft: FullType, ft1: FullType, ft2: FullType) -> bool:
    if not ft.alpha == ft1.alpha == ft2.alpha:
        return False
    return all(ft[t] == ft1[t] or ft[t] == ft2[t] for t in Theta)


def _down_closure(ft: FullType) -> frozenset:
    return ft[Theta.DOWN] | ft[Theta.DOWN_PLUS]


def locally_consistent(parent: FullType, children: list[FullType]) -> bool:
    """
    # Whether a parent full type and the ordered full types of its children fit together.

        Checks the horizontal conditions (sibling slots follow the order of
        the children), the vertical conditions (the parent's down slots
        collect the children, each child's up slots come from the parent)
        and the free condition (a child sees the other children's subtrees
        and everything outside its parent's subtree as free).

    Parameters
    ----------
    > parent : FullType

    > children : list of FullType

        Nonempty, left to right.

    Returns
    -------
    > boolean

    Example
    -------
    > two children where the first child's RIGHT slot is not the second child's 1-type

        return

            False
    #
    """
    if not children:
        raise PreconditionError("locally_consistent needs at least one child")
    k = len(children)
    alphas = [c.alpha for c in children]

    for i, child in enumerate(children):
        # (h1) (h2)
        if child[Theta.LEFT] != (frozenset({alphas[i - 1]}) if i > 0 else _EMPTY):
            return False
        if child[Theta.RIGHT] != (frozenset({alphas[i + 1]}) if i < k - 1 else _EMPTY):
            return False
        # (h3) (h4)
        left_plus = children[i - 1][Theta.LEFT] | children[i - 1][Theta.LEFT_PLUS] if i > 0 else _EMPTY
        if child[Theta.LEFT_PLUS] != left_plus:
            return False
        right_plus = children[i + 1][Theta.RIGHT] | children[i + 1][Theta.RIGHT_PLUS] if i < k - 1 else _EMPTY
        if child[Theta.RIGHT_PLUS] != right_plus:
            return False

    # (v1) (v3)
    if parent[Theta.DOWN] != frozenset(alphas):
        return False
    if parent[Theta.DOWN_PLUS] != frozenset().union(*(_down_closure(c) for c in children)):
        return False

    outside = parent.union(_SIBLING_SLOTS)
    above = parent[Theta.UP] | parent[Theta.UP_PLUS]
    for i, child in enumerate(children):
        # (v2) (v4)
        if child[Theta.UP] != frozenset({parent.alpha}):
            return False
        if child[Theta.UP_PLUS] != above:
            return False
        # (f1)
        others = frozenset().union(*(_down_closure(c) for j, c in enumerate(children) if j != i))
        if child[Theta.FREE] != others | outside:
            return False
    return True


def child_types(
    alpha: OneType, above: frozenset, outside: frozenset, triples: list[tuple[OneType, frozenset, frozenset]]
) -> list[FullType]:
    """
    # The unique child full types locally consistent with a parent.

        The parent is given by its 1-type, the 1-types above it and the
        1-types among its siblings and free nodes.

        Each child is given by its own 1-type and its two down slots; every
        other slot is forced by the horizontal, vertical and free
        conditions. The caller is responsible for (v1) and (v3).
    #
    """
    k = len(triples)
    alphas = [t[0] for t in triples]
    closures = [t[1] | t[2] for t in triples]
    up = frozenset({alpha})
    result = []
    for i, (own, down, down_plus) in enumerate(triples):
        slots = [_EMPTY] * len(Theta)
        slots[Theta.SAME] = frozenset({own})
        slots[Theta.DOWN] = down
        slots[Theta.DOWN_PLUS] = down_plus
        slots[Theta.UP] = up
        slots[Theta.UP_PLUS] = above
        slots[Theta.LEFT] = frozenset({alphas[i - 1]}) if i > 0 else _EMPTY
        slots[Theta.RIGHT] = frozenset({alphas[i + 1]}) if i < k - 1 else _EMPTY
        slots[Theta.LEFT_PLUS] = frozenset(alphas[:max(i - 1, 0)])
        slots[Theta.RIGHT_PLUS] = frozenset(alphas[i + 2:])
        slots[Theta.FREE] = frozenset().union(*(closures[j] for j in range(k) if j != i)) | outside
        result.append(FullType(tuple(slots)))
    return result

