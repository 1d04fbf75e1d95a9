"""Satisfiability of guarded two-variable sentences over the descendant relation on singular trees."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Iterator

from fo2_trees.checks import ConfigError, NotASentenceError, PreconditionError, UnguardedFormulaError
from fo2_trees.formula import (
    ABOVE,
    Formula,
    Signature,
    Theta,
    Unary,
    children,
    free_vars,
    is_guarded,
    predicates,
    size,
)
from fo2_trees.model import Tree, is_singular, model_check
from fo2_trees.normal_form import SAME_SLOT, NormalFormFormula, gf2_normalize
from fo2_trees.oracle import node_labels
from fo2_trees.solver import Mode, Outcome, Verdict, admissible_types, default_bounds
from fo2_trees.typesys import OneType, TypeContext, compile_matrix

log = logging.getLogger(__name__)

# type elimination enumerates every 1-type, so it only runs on narrow signatures
_ELIMINATION_WIDTH = 8
_STATIC_READS = 12

# (witness conjunct, what its matrix reads of the 1-type that needs a descendant)
Demand = tuple[int, OneType]


@dataclass(frozen=True)
class PathState:
    """
    One node of the path being built.

    promised_below holds the witness demands some descendant must meet,
    inherited from ancestors or raised by the node itself. ancestors runs
    from the root down to the parent. Two states with the same key accept
    the same subtrees, so depth is not part of it.
    """

    current: OneType
    promised_below: frozenset
    ancestors: tuple[OneType, ...]
    depth: int

    @property
    def key(self) -> tuple:
        return self.current, frozenset(self.ancestors), self.promised_below


@dataclass(frozen=True)
class Gf2Settings:
    search_budget: int = 500_000
    max_depth: int = 64

    def __post_init__(self):
        if self.search_budget < 1 or self.max_depth < 1:
            raise ConfigError(f"gf2 search_budget and max_depth must be positive, got {self}")

    @classmethod
    def from_config(cls, section: dict[str, Any]) -> Gf2Settings:
        return cls(
            search_budget=int(section.get("search_budget", cls.search_budget)),
            max_depth=int(section.get("max_depth", cls.max_depth)),
        )


class _BudgetExhausted(Exception):
    pass


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.spent = 0

    def tick(self) -> None:
        self.spent += 1
        if self.spent > self.limit:
            raise _BudgetExhausted


@dataclass(frozen=True)
class _Miss:
    """A failed state: the keys it met again on the path, and whether no depth cut was involved."""

    deps: frozenset = frozenset()
    exact: bool = True


_EXACT = _Miss()


def _partitions(items: list) -> Iterator[list[list]]:
    """Set partitions of items, the single block first."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for blocks in _partitions(rest):
        for i in range(len(blocks)):
            yield blocks[:i] + [[first] + blocks[i]] + blocks[i + 1 :]
        yield [[first]] + blocks


def _reads(f: Formula, var: str) -> frozenset[str]:
    """Predicates f applies to var."""
    if isinstance(f, Unary):
        return frozenset({f.pred}) if f.var == var else frozenset()
    return frozenset().union(*(_reads(c, var) for c in children(f)))


def _depth_schedule(bound: int, cap: int) -> list[int]:
    """Height limits tried in turn: doubling from 2 up to the smaller of bound and cap."""
    top = max(1, min(bound, cap))
    limits = []
    limit = 2
    while limit < top:
        limits.append(limit)
        limit *= 2
    return limits + [top]


class _PathSearch:
    """
    # Depth-first construction of one root-to-leaf path at a time.

        A node's demands are split among its children, one block per child,
        so a node has at most as many children as demands. Children are
        independent of each other: with the descendant relation alone,
        siblings and unrelated nodes are never constrained.

        A key met again on the current path is cut, since the shorter tree
        obtained by skipping the repetition is also a model. A failure
        records the path keys it was cut against and whether a height limit
        stopped it; it is reused wherever those keys are again on the path
        and the remaining height is no larger, and it becomes final once it
        depends on nothing.
    #
    """

    def __init__(self, nf: NormalFormFormula, budget: _Budget):
        self.nf = nf
        self.budget = budget
        self.limit = 0
        ctx = TypeContext(nf)
        sig = nf.extended_signature
        self.width = ctx.width
        self.core_bits = [sig.index(name) for name in sig.core]
        self.core_mask = sig.mask(sig.core)
        fresh = set(nf.fresh_predicates)
        plain = [i for i, name in enumerate(sig.unary) if i not in self.core_bits and name not in fresh]
        self.order = self.core_bits + plain + [sig.index(name) for name in nf.fresh_predicates]

        assigned = 0
        due = [[] for _ in self.order]
        steps = []
        for bit in self.order:
            assigned |= 1 << bit
            steps.append(assigned)
        for c in nf.universal_conjuncts:
            needed = sig.mask(predicates(c))
            k = next(k for k, mask in enumerate(steps) if needed & mask == needed)
            due[k].append(compile_matrix(c, ctx.index))
        self.due = due

        self.same: list[tuple] = []
        self.above: list[tuple] = []
        self.below: list[tuple] = []
        self.x_reads: dict[int, int] = {}
        self.y_reads: dict[int, int] = {}
        canonical: dict = {}
        for i, (bit, eta, psi, w) in enumerate(ctx.witnesses):
            if eta == SAME_SLOT:
                self.same.append((bit, psi))
            elif eta == ABOVE:
                self.above.append((bit, psi))
            else:
                j = canonical.setdefault(w.matrix, i)
                self.x_reads[j] = sig.mask(_reads(w.matrix, "x"))
                self.y_reads[j] = sig.mask(_reads(w.matrix, "y"))
                self.below.append((bit, j))
        self.psi = [psi for _, _, psi, _ in ctx.witnesses]

        self.allowed: frozenset | None = None
        if ctx.width <= _ELIMINATION_WIDTH:
            self.allowed = frozenset(admissible_types(ctx, self.core_mask if self.core_bits else None))

        self.success: dict[tuple, tuple] = {}
        self.final: set[tuple] = set()
        self.failed: dict[tuple, tuple[int, frozenset, bool]] = {}
        self.on_path: dict[tuple, None] = {}
        self.meetable_cache: dict[Demand, bool] = {}
        self.children_cache: dict[tuple, list[OneType]] = {}
        self.cache_hits = 0
        self.peak_depth = 0
        self.peak_promises = 0

    # ------------------------------------------------------------ 1-types

    def _pair_ok(self, test, g: OneType, parent: OneType | None, upper: frozenset) -> bool:
        if not test(g, g, Theta.SAME):
            return False
        if parent is not None and not (test(parent, g, Theta.DOWN) and test(g, parent, Theta.UP)):
            return False
        return all(test(a, g, Theta.DOWN_PLUS) and test(g, a, Theta.UP_PLUS) for a in upper)

    def _placeable(self, g: OneType, parent: OneType | None, upper: frozenset) -> bool:
        if self.allowed is not None and g not in self.allowed:
            return False
        for bit, psi in self.same:
            if g & bit and not psi(g, g, Theta.SAME):
                return False
        for bit, psi in self.above:
            if not g & bit:
                continue
            if parent is not None and psi(g, parent, Theta.UP):
                continue
            if not any(psi(g, a, Theta.UP_PLUS) for a in upper):
                return False
        return True

    def candidates(self, parent: OneType | None, upper: frozenset) -> Iterator[OneType]:
        """
        1-types that may sit below parent and the upper ancestors, one core
        predicate each, generated bit by bit with every conjunct of χ checked
        as soon as its predicates are fixed. Fresh predicates are tried false
        first.
        """
        order, due, ncore = self.order, self.due, len(self.core_bits)

        def walk(k: int, mask: OneType, has_core: bool) -> Iterator[OneType]:
            if k == len(order):
                if self._placeable(mask, parent, upper):
                    yield mask
                return
            for value in (0, 1 << order[k]):
                core_now = has_core
                if k < ncore and value:
                    if has_core:
                        continue
                    core_now = True
                if k == ncore - 1 and not core_now:
                    continue
                g = mask | value
                if all(self._pair_ok(test, g, parent, upper) for test in due[k]):
                    yield from walk(k + 1, g, core_now)

        yield from walk(0, 0, False)

    def children_of(self, parent: OneType, upper: frozenset) -> list[OneType]:
        key = (parent, upper)
        if key not in self.children_cache:
            self.children_cache[key] = list(self.candidates(parent, upper))
        return self.children_cache[key]

    def demands_of(self, g: OneType) -> frozenset:
        return frozenset((i, g & self.x_reads[i]) for bit, i in self.below if g & bit)

    def accepts(self, demand: Demand, g: OneType) -> bool:
        i, source = demand
        return self.psi[i](source, g, Theta.DOWN_PLUS)

    def meetable(self, demand: Demand) -> bool:
        """Whether any 1-type with one core predicate could meet the demand at all."""
        if demand not in self.meetable_cache:
            self.meetable_cache[demand] = self._meetable(demand)
        return self.meetable_cache[demand]

    def _meetable(self, demand: Demand) -> bool:
        if self.allowed is not None:
            return any(self.accepts(demand, h) for h in self.allowed)
        read = self.y_reads[demand[0]]
        bits = [b for b in range(self.width) if read >> b & 1]
        if len(bits) > _STATIC_READS:
            return True
        # an unread core predicate can always supply the one core bit
        spare_core = bool(self.core_mask & ~read)
        for choice in range(1 << len(bits)):
            h = sum(1 << b for k, b in enumerate(bits) if choice >> k & 1)
            if self.core_bits:
                core_count = (h & self.core_mask).bit_count()
                if core_count > 1 or (core_count == 0 and not spare_core):
                    continue
            if self.accepts(demand, h):
                return True
        return False

    # ------------------------------------------------------------ search

    def roots(self) -> Iterator[PathState]:
        for g in self.candidates(None, frozenset()):
            yield PathState(g, self.demands_of(g), (), 0)

    def _known_failure(self, key: tuple, remaining: int) -> _Miss | None:
        entry = self.failed.get(key)
        if entry is None:
            return None
        height, deps, exact = entry
        if not exact and height < remaining:
            return None
        deps = deps - self.final
        if not deps <= self.on_path.keys():
            return None
        return _Miss(deps, exact)

    def _record(self, key: tuple, remaining: int, deps: set, exact: bool) -> _Miss:
        deps = frozenset(deps) - self.final - {key}
        if exact and not deps:
            self.final.add(key)
            self.failed.pop(key, None)
            return _EXACT
        self.failed[key] = (remaining, deps, exact)
        return _Miss(deps, exact)

    def solve(self, state: PathState) -> tuple[tuple | None, _Miss | None]:
        """A subtree rooted at state, or why there is none within the current height limit."""
        key = state.key
        if key in self.success:
            self.cache_hits += 1
            return self.success[key], None
        if key in self.final:
            self.cache_hits += 1
            return None, _EXACT
        if key in self.on_path:
            return None, _Miss(frozenset({key}))
        remaining = self.limit - state.depth
        known = self._known_failure(key, remaining)
        if known is not None:
            self.cache_hits += 1
            return None, known

        if not state.promised_below:
            found = (state.current, [])
            self.success[key] = found
            return found, None
        if not all(self.meetable(d) for d in state.promised_below):
            self.final.add(key)
            return None, _EXACT
        if remaining <= 0:
            return None, _Miss(exact=False)

        self.budget.tick()
        self.peak_depth = max(self.peak_depth, state.depth)
        self.peak_promises = max(self.peak_promises, len(state.promised_below))
        deps: set = set()
        exact = True
        self.on_path[key] = None
        try:
            for blocks in _partitions(sorted(state.promised_below)):
                kids = []
                for block in blocks:
                    kid, miss = self.solve_block(state, frozenset(block))
                    if kid is None:
                        deps |= miss.deps
                        exact = exact and miss.exact
                        break
                    kids.append(kid)
                else:
                    found = (state.current, kids)
                    self.success[key] = found
                    return found, None
        finally:
            del self.on_path[key]
        return None, self._record(key, remaining, deps, exact)

    def solve_block(self, state: PathState, block: frozenset) -> tuple[tuple | None, _Miss | None]:
        """One child of state meeting every demand of block itself or below it."""
        ancestors = state.ancestors + (state.current,)
        options = []
        for g in self.children_of(state.current, frozenset(state.ancestors)):
            rest = frozenset(d for d in block if not self.accepts(d, g)) | self.demands_of(g)
            options.append((len(rest), g, rest))
        # children that close the most demands first
        options.sort(key=lambda option: option[0])

        deps: set = set()
        exact = True
        for _, g, rest in options:
            self.budget.tick()
            kid, miss = self.solve(PathState(g, rest, ancestors, state.depth + 1))
            if kid is not None:
                return kid, None
            deps |= miss.deps
            exact = exact and miss.exact
        return None, _Miss(frozenset(deps), exact)


def _single_node(f: Formula, sig: Signature) -> Tree | None:
    for label in node_labels(sig, singular=True):
        t = Tree.from_nested(sig, (label, []))
        if model_check(t, f):
            return t
    return None


def gf2_sat_singular(f: Formula, sig: Signature, settings: Gf2Settings | None = None) -> Verdict:
    """
    # Decide whether a guarded sentence over the descendant relation has a finite singular tree model.

        One-node models are checked directly. Otherwise every normal-form
        candidate of the sentence is searched path by path: a node's 1-type
        must fit every ancestor, find its upward witnesses among them and
        pass its downward witnesses on as demands that its children either
        meet or inherit. Only the current path and the demands along it are
        live at any time. Heights are deepened from 2 up to the smaller of
        the theoretical bound and settings.max_depth.

    Parameters
    ----------
    > f : Formula

        A guarded sentence over sig.

    > sig : Signature

        Its binary symbols must be exactly D.

    > settings : Gf2Settings

    >> default : Gf2Settings()

    Returns
    -------
    > Verdict

        Sat carries a singular witness over sig that model-checks true.
        Unsat means every candidate failed without a height limit being
        involved, or failed at the theoretical bound. Unknown names the
        budget or the height cap that stopped the search.

    Example
    -------
    > f = exists x. a(x), sig.unary = ('a',)

        return

            Verdict(SAT) with a single node labelled {a}
    #
    """
    if free_vars(f):
        raise NotASentenceError(f"gf2_sat_singular needs a sentence; free variables {sorted(free_vars(f))}")
    if sig.binary != {"D"}:
        raise PreconditionError(f"the guarded engine works over D alone, got {sorted(sig.binary)}")
    if not is_guarded(f):
        raise UnguardedFormulaError(f"{f} is not in the guarded fragment")
    settings = settings or Gf2Settings()

    stats: dict[str, Any] = {"candidates": 0, "expansions": 0, "cache_hits": 0, "peak_depth": 0, "peak_promises": 0}
    direct = _single_node(f, sig)
    if direct is not None:
        log.info("one-node model found")
        return Verdict(Outcome.SAT, direct, stats=stats | {"nodes": 1})

    budget = _Budget(settings.search_budget)
    exact = True
    try:
        for nf in gf2_normalize(f, sig):
            stats["candidates"] += 1
            if not nf.is_gf2_shaped():
                raise PreconditionError("normalisation produced a candidate outside the guarded shapes")
            bound = default_bounds(nf, Mode.SINGULAR, size(f)).max_depth
            search = _PathSearch(nf, budget)
            try:
                found, settled = _search_candidate(search, bound, settings.max_depth)
            finally:
                stats["cache_hits"] += search.cache_hits
                stats["peak_depth"] = max(stats["peak_depth"], search.peak_depth)
                stats["peak_promises"] = max(stats["peak_promises"], search.peak_promises)
                stats["expansions"] = budget.spent
            if found is None:
                exact &= settled
                continue
            witness = Tree.from_nested(nf.extended_signature, found).project(sig)
            if model_check(witness, f) and is_singular(witness):
                log.info("model with %d nodes found in candidate %d", len(witness), stats["candidates"])
                return Verdict(Outcome.SAT, witness, stats=stats | {"nodes": len(witness), "depth": witness.depth()})
            log.error("candidate %d produced a tree that fails the input sentence", stats["candidates"])
            exact = False
    except _BudgetExhausted:
        log.info("search budget of %d expansions exhausted", settings.search_budget)
        return Verdict(Outcome.UNKNOWN, reason="search budget exhausted", stats=stats)

    if exact:
        return Verdict(Outcome.UNSAT, stats=stats)
    return Verdict(Outcome.UNKNOWN, reason=f"depth bound {settings.max_depth} reached", stats=stats)


def _search_candidate(search: _PathSearch, bound: int, cap: int) -> tuple[tuple | None, bool]:
    """A model of one candidate, and whether a failure to find one is conclusive."""
    for limit in _depth_schedule(bound, cap):
        search.limit = limit
        exact = True
        for root in search.roots():
            search.budget.tick()
            found, miss = search.solve(root)
            if found is not None:
                return found, True
            exact = exact and miss.exact
        if exact or limit >= bound:
            return None, True
        log.debug("no model of height %d, deepening", limit)
    return None, False
