"""Scott-style normal form for FO² and the guessing normalisation for GF²."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Flag
from typing import Iterator

from fo2_trees.checks import NotASentenceError, PreconditionError, UnguardedFormulaError
from fo2_trees.formula import (
    ABOVE,
    ALL_SLOTS,
    ATOMS,
    BELOW,
    FALSE,
    QUANTIFIERS,
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
    Signature,
    Theta,
    Unary,
    atom_slots,
    children,
    conj,
    conjuncts,
    disj,
    free_vars,
    is_guarded,
    order_formula,
    position_atoms,
    pretty,
    quantifier_block,
    replace,
    simplify,
    size as formula_size,
    specialize,
    split_guard,
    swap_vars,
    theta_classes,
    validate_formula,
)

log = logging.getLogger(__name__)

SAME_SLOT = frozenset({Theta.SAME})
GUARDED_ETAS = (BELOW, ABOVE, SAME_SLOT)
_GUARDS = {Order("D", "x", "y"): BELOW, Order("D", "y", "x"): ABOVE, Order("=", "x", "y"): SAME_SLOT}


@dataclass(frozen=True)
class WitnessConjunct:
    """∀x(trigger(x) ⇒ ∃y(η(x,y) ∧ matrix(x,y))) with η given as a set of order formulas."""

    trigger: str
    eta: frozenset
    matrix: Formula

    def __post_init__(self):
        object.__setattr__(self, "eta", frozenset(self.eta))
        if not self.eta:
            raise PreconditionError(f"witness conjunct for {self.trigger} has an empty η")
        if position_atoms(self.matrix) or _has_quantifier(self.matrix):
            raise PreconditionError(f"witness matrix {pretty(self.matrix)} must be unary and quantifier-free")

    def to_formula(self) -> Formula:
        body = conj(order_formula(self.eta), self.matrix)
        return Forall("x", Implies(Unary(self.trigger, "x"), Exists("y", body)))


def _has_quantifier(f: Formula) -> bool:
    return isinstance(f, QUANTIFIERS) or any(_has_quantifier(c) for c in children(f))


@dataclass(frozen=True)
class NormalFormFormula:
    """
    # φ = ∀x∀y χ(x,y) ∧ ⋀ᵢ ∀x(λᵢ(x) ⇒ ∃y(ηᵢ(x,y) ∧ ψᵢ(x,y))).

        χ is kept as a list of quantifier-free conjuncts. The extended
        signature adds the fresh predicates and keeps the original
        signature's singular core, so fresh predicates are unconstrained in
        singular mode.
    #
    """

    universal_conjuncts: tuple[Formula, ...]
    witness_conjuncts: tuple[WitnessConjunct, ...]
    extended_signature: Signature
    original_signature: Signature
    source_size: int = 0

    def __post_init__(self):
        object.__setattr__(self, "universal_conjuncts", tuple(self.universal_conjuncts))
        object.__setattr__(self, "witness_conjuncts", tuple(self.witness_conjuncts))
        for c in self.universal_conjuncts:
            if _has_quantifier(c):
                raise PreconditionError(f"universal conjunct {pretty(c)} is not quantifier-free")
            validate_formula(c, self.extended_signature)
        for w in self.witness_conjuncts:
            self.extended_signature.index(w.trigger)
            validate_formula(w.matrix, self.extended_signature)

    @property
    def universal_matrix(self) -> Formula:
        return conj(*self.universal_conjuncts)

    @property
    def fresh_predicates(self) -> tuple[str, ...]:
        return self.extended_signature.unary[len(self.original_signature):]

    def to_sentence(self) -> Formula:
        """The FO² sentence this normal form stands for."""
        parts = [Forall("x", Forall("y", self.universal_matrix))]
        parts += [w.to_formula() for w in self.witness_conjuncts]
        return conj(*parts)

    def order_classes(self) -> list[frozenset]:
        """The order formulas that χ and the η's cannot tell apart, as slot classes."""
        atoms = []
        for c in self.universal_conjuncts:
            atoms.extend(position_atoms(c))
        atoms.extend(w.eta for w in self.witness_conjuncts)
        return theta_classes(atoms)

    def is_gf2_shaped(self) -> bool:
        """Every universal conjunct is g ⇒ ψ and every η is one of x↓₊y, y↓₊x, x=y."""
        for c in self.universal_conjuncts:
            if not isinstance(c, Implies) or c.left not in _GUARDS or position_atoms(c.right):
                return False
        return all(w.eta in GUARDED_ETAS for w in self.witness_conjuncts)

    def size(self) -> int:
        return formula_size(self.to_sentence())

    def describe(self) -> str:
        lines = [f"forall x. forall y. {pretty(c)}" for c in self.universal_conjuncts]
        lines += [pretty(w.to_formula()) for w in self.witness_conjuncts]
        return "\n".join(lines)


# ---------------------------------------------------------------- renaming


class Polarity(Flag):
    POS = 1
    NEG = 2
    BOTH = 3

    def flip(self) -> Polarity:
        if self is Polarity.BOTH:
            return self
        return Polarity.NEG if self is Polarity.POS else Polarity.POS


@dataclass
class _Renamer:
    """
    Replaces quantified subformulas by fresh unary predicates, innermost first.
    Identical subformulas share one predicate; constraints are emitted once
    per predicate for the union of the polarities it occurred with.
    """

    sig: Signature
    prefix: str = "_nf"
    fresh: list[str] = field(default_factory=list)
    chi: list[Formula] = field(default_factory=list)
    witnesses: list[WitnessConjunct] = field(default_factory=list)
    _registry: dict = field(default_factory=dict)

    def new_name(self, prefix: str | None = None) -> str:
        name = self.sig.fresh_name(prefix or self.prefix, set(self.fresh))
        self.fresh.append(name)
        return name

    def abstract(self, f: Formula, pol: Polarity, ctx: str = "x") -> Formula:
        if isinstance(f, ATOMS):
            return f
        if isinstance(f, Not):
            return Not(self.abstract(f.body, pol.flip(), ctx))
        if isinstance(f, (And, Or)):
            return type(f)(self.abstract(f.left, pol, ctx), self.abstract(f.right, pol, ctx))
        if isinstance(f, Implies):
            return Implies(self.abstract(f.left, pol.flip(), ctx), self.abstract(f.right, pol, ctx))
        if isinstance(f, Iff):
            return Iff(self.abstract(f.left, Polarity.BOTH, ctx), self.abstract(f.right, Polarity.BOTH, ctx))

        node = type(f)(f.var, self.abstract(f.body, pol, f.var))
        free = free_vars(node)
        if free:
            (var,) = free
            key = node if var == "x" else swap_vars(node)
        else:
            var = ctx
            key = node if node.var == "y" else swap_vars(node)
        entry = self._registry.get(key)
        if entry is None:
            entry = [self.new_name(), Polarity(0)]
            self._registry[key] = entry
        entry[1] |= pol
        return Unary(entry[0], var)

    def emit(self) -> None:
        for key, (name, pol) in self._registry.items():
            self.define(key, name, pol)

    def define(self, key: Exists | Forall, name: str, pol: Polarity) -> None:
        raise NotImplementedError

    def define_by_witness(
        self, key: Exists | Forall, name: str, pol: Polarity, body: Formula, scope: frozenset | None
    ) -> None:
        """
        Constraints making `name` agree with `key` in the directions `pol` needs.
        body is the quantified body of key; scope is the η a witness for it
        ranges over, or None to split the body over its order-formula classes.
        """
        r = Unary(name, "x")
        if isinstance(key, Exists):
            if pol & Polarity.POS:
                self.exists_witness(name, body, scope)
            if pol & Polarity.NEG:
                self.chi.append(self.guarded(Implies(body, r), scope))
        else:
            if pol & Polarity.POS:
                self.chi.append(self.guarded(Implies(r, body), scope))
            if pol & Polarity.NEG:
                companion = self.new_name()
                self.chi.append(self.local(Or(r, Unary(companion, "x"))))
                self.exists_witness(companion, Not(body), scope)

    def exists_witness(self, trigger: str, body: Formula, scope: frozenset | None) -> None:
        t = Unary(trigger, "x")
        if scope is None:
            parts = [(c, specialize(body, c)) for c in theta_classes(position_atoms(body))]
        else:
            parts = [(scope, simplify(body))]
        parts = [(eta, psi) for eta, psi in parts if psi != FALSE]
        if not parts:
            self.chi.append(self.local(Not(t)))
        elif len(parts) == 1:
            self.witnesses.append(WitnessConjunct(trigger, *parts[0]))
        else:
            split = []
            for eta, psi in parts:
                s = self.new_name()
                split.append(Unary(s, "x"))
                self.witnesses.append(WitnessConjunct(s, eta, psi))
            self.chi.append(Implies(t, disj(*split)))

    def guarded(self, f: Formula, scope: frozenset | None) -> Formula:
        return f

    def local(self, f: Formula) -> Formula:
        return f


class _ScottRenamer(_Renamer):
    def define(self, key, name, pol):
        self.define_by_witness(key, name, pol, key.body, None if free_vars(key) else ALL_SLOTS)


def scott_normal_form(f: Formula, sig: Signature) -> NormalFormFormula:
    """
    # Rewrite an FO² sentence into normal form over fresh unary predicates.

        Universal conjuncts ∀x∀y ψ go straight into χ once their inner
        quantified subformulas are renamed. Every other quantified
        subformula becomes a fresh predicate whose defining constraints
        follow the polarity of its occurrences. Existential requirements
        are split over the order-formula classes of their body, so every η
        is a single class.

    Parameters
    ----------
    > f : Formula

        An FO² sentence over sig.

    > sig : Signature

    Returns
    -------
    > NormalFormFormula

        Satisfiable over exactly the same tree frames as f. Fresh
        predicates are named _nf0, _nf1, ... in order of creation.

    Example
    -------
    > f = forall x. forall y. ((a(x) & a(y)) -> x=y)

        return

            χ = ((a(x) & a(y)) -> x=y) with no witness conjuncts
    #
    """
    if free_vars(f):
        raise NotASentenceError(f"normal form needs a sentence; free variables {sorted(free_vars(f))}")
    validate_formula(f, sig)
    renamer = _ScottRenamer(sig)
    top: list[Formula] = []
    for part in conjuncts(simplify(f)):
        if isinstance(part, Const):
            if not part.value:
                top.append(FALSE)
            continue
        if isinstance(part, Forall):
            bound, body = quantifier_block(part)
            matrix = renamer.abstract(body, Polarity.POS, bound[-1])
            top.append(swap_vars(matrix) if free_vars(matrix) == {"y"} else matrix)
        else:
            top.append(renamer.abstract(part, Polarity.POS, "x"))
    renamer.emit()
    nf = NormalFormFormula(
        tuple(top + renamer.chi),
        tuple(renamer.witnesses),
        Signature(sig.unary + tuple(renamer.fresh), sig.binary, sig.core),
        sig,
        formula_size(f),
    )
    log.debug("normal form of size %d with %d fresh predicates", nf.size(), len(renamer.fresh))
    return nf


# ---------------------------------------------------------------- GF²


def guard_eta(guard: Formula) -> frozenset:
    """The order-formula class a guard x↓₊y, y↓₊x or x=y stands for."""
    if isinstance(guard, Order) and guard.left != guard.right:
        slots = atom_slots(guard)
        if slots in GUARDED_ETAS:
            return slots
    raise UnguardedFormulaError(f"{pretty(guard)} is not a descendant or equality guard")


def _guard_of(body: Formula, kind: type) -> tuple[frozenset, Formula]:
    """The η of the two-variable guard of body, and the rest of body as one formula."""
    found = split_guard(body, kind, frozenset({"x", "y"}))
    if found is None:
        raise UnguardedFormulaError(f"no guard covering x and y in {pretty(body)}")
    guard, rest = found
    eta = guard_eta(guard)
    return eta, specialize(conj(*rest) if kind is Exists else disj(*rest), eta)


class _GuardedRenamer(_Renamer):
    """Renames guarded subformulas with one free variable, keeping every constraint guarded."""

    def define(self, key, name, pol):
        if not free_vars(key):
            raise PreconditionError(f"sentence {pretty(key)} should have been replaced by its guessed value")
        eta, body = _guard_of(key.body, type(key))
        self.define_by_witness(key, name, pol, body, eta)

    def guarded(self, f: Formula, scope: frozenset | None) -> Formula:
        return Implies(order_formula(scope), simplify(f))

    def local(self, f: Formula) -> Formula:
        return Implies(Order("=", "x", "y"), simplify(f))


def _closed_subformulas(top: list[Formula]) -> list[Formula]:
    """Closed quantified subformulas strictly below the top-level conjuncts, in preorder."""
    found: list[Formula] = []

    def walk(g: Formula, at_top: bool) -> None:
        if isinstance(g, QUANTIFIERS) and not at_top and not free_vars(g) and g not in found:
            found.append(g)
        for c in children(g):
            walk(c, False)

    for part in top:
        walk(part, True)
    return found


def _negate(f: Formula) -> Formula:
    """Push one negation through the leading quantifier block."""
    if isinstance(f, QUANTIFIERS):
        dual = Forall if isinstance(f, Exists) else Exists
        if isinstance(f.body, type(f)):
            return dual(f.var, _negate(f.body))
        return dual(f.var, Not(f.body))
    return Not(f)


class _GF2Candidate:
    """Assembles one normal form from the sentences that hold under a guess."""

    def __init__(self, sig: Signature, source_size: int = 0):
        self.sig = sig
        self.source_size = source_size
        self.renamer = _GuardedRenamer(sig)
        self.top: list[Formula] = []
        renamer = self.renamer
        root = sig.fresh_name("_root", set()) if "_root" in sig else "_root"
        renamer.fresh.append(root)
        has_ancestor = renamer.new_name()
        self.root = Unary(root, "x")
        h = Unary(has_ancestor, "x")
        self.top.append(Implies(Order("=", "x", "y"), Iff(self.root, Not(h))))
        self.top.append(Implies(Order("D", "y", "x"), h))
        renamer.witnesses.append(WitnessConjunct(has_ancestor, ABOVE, TRUE))

    def add(self, sentence: Formula) -> None:
        sentence = simplify(sentence)
        if isinstance(sentence, Const):
            if not sentence.value:
                self.top.append(Implies(Order("=", "x", "y"), FALSE))
            return
        if not isinstance(sentence, QUANTIFIERS):
            raise PreconditionError(f"unexpected top-level sentence {pretty(sentence)}")
        renamer = self.renamer
        bound, body = quantifier_block(sentence)

        if isinstance(sentence, Forall):
            if len(set(bound)) == 1:
                if bound[0] == "y":
                    body = swap_vars(body)
                matrix = simplify(renamer.abstract(body, Polarity.POS, "x"))
                self.top.append(Implies(Order("=", "x", "y"), matrix))
            else:
                eta, matrix = _guard_of(renamer.abstract(body, Polarity.POS, bound[-1]), Forall)
                self.top.append(Implies(order_formula(eta), matrix))
            return

        if len(bound) > 1:
            inner: Formula = body
            for var in reversed(bound[1:]):
                inner = Exists(var, inner)
            if not free_vars(inner):
                return self.add(inner)
            body = inner
        if bound[0] == "y":
            body = swap_vars(body)
        matrix = simplify(renamer.abstract(body, Polarity.POS, "x"))
        s = renamer.new_name()
        self.top.append(Implies(Order("=", "x", "y"), Implies(self.root, disj(Unary(s, "x"), matrix))))
        psi = simplify(swap_vars(matrix))
        if psi != FALSE:
            renamer.witnesses.append(WitnessConjunct(s, BELOW, psi))

    def build(self) -> NormalFormFormula:
        renamer = self.renamer
        renamer.emit()
        sig = self.sig
        return NormalFormFormula(
            tuple(self.top + renamer.chi),
            tuple(renamer.witnesses),
            Signature(sig.unary + tuple(renamer.fresh), sig.binary, sig.core),
            sig,
            self.source_size,
        )


def gf2_normalize(f: Formula, sig: Signature) -> Iterator[NormalFormFormula]:
    """
    # Stream the normal-form candidates of a GF² sentence, one per guess.

        Each closed quantified subformula that is not a top-level conjunct
        is guessed true or false. Under a guess the subformula is replaced
        by its value everywhere, and its (possibly negated) body is added as
        a top-level sentence. A guess is dropped as soon as one of its
        top-level sentences simplifies to false. Existential sentences are
        rewritten relative to the root: the root satisfies the body or has
        a descendant that does. Every candidate defines the root through a
        has-ancestor predicate.

    Parameters
    ----------
    > f : Formula

        A guarded sentence whose only binary symbol is D.

    > sig : Signature

    Returns
    -------
    > iterator of NormalFormFormula

        f is satisfiable over a tree frame iff some candidate is; every
        candidate is guarded-shaped.

    Example
    -------
    > f = exists x. a(x)

        yields a candidate containing

            (x=y -> (_root(x) -> (_nf1(x) | a(x))))

            forall x. (_nf1(x) -> exists y. (D(x,y) & a(y)))
    #
    """
    if free_vars(f):
        raise NotASentenceError(f"normalisation needs a sentence; free variables {sorted(free_vars(f))}")
    validate_formula(f, sig)
    if not sig.binary <= {"D"}:
        raise PreconditionError(f"GF² normalisation works over the descendant relation only, got {sorted(sig.binary)}")
    if not is_guarded(f):
        raise UnguardedFormulaError(f"{pretty(f)} is not in the guarded fragment")

    top = conjuncts(simplify(f))
    guessed = _closed_subformulas(top)
    log.debug("gf2 normalisation guesses %d sentences", len(guessed))
    for values in itertools.product((True, False), repeat=len(guessed)):
        mapping = {g: Const(v) for g, v in zip(guessed, values)}
        sentences = [simplify(replace(part, mapping)) for part in top]
        for g, v in zip(guessed, values):
            asserted = type(g)(g.var, replace(g.body, mapping))
            sentences.append(simplify(asserted if v else _negate(asserted)))
        if FALSE in sentences:
            continue
        candidate = _GF2Candidate(sig, formula_size(f))
        for sentence in sentences:
            candidate.add(sentence)
        yield candidate.build()
