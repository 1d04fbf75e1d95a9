"""Satisfiability of FO² over finite ordered trees by a memoised AND-OR search over full types."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterator

from fo2_trees.checks import NotASentenceError
from fo2_trees.formula import SIBLINGS_AND_FREE, Formula, Signature, Theta, free_vars, size
from fo2_trees.model import Tree, is_singular, model_check
from fo2_trees.normal_form import NormalFormFormula, scott_normal_form
from fo2_trees.typesys import FullType, OneType, TypeContext, child_types, reduce

log = logging.getLogger(__name__)

_DOWN_SLOTS = frozenset({Theta.DOWN, Theta.DOWN_PLUS})


class Mode(str, Enum):
    GENERAL = "general"
    SINGULAR = "singular"


class BoundsSource(str, Enum):
    THEORETICAL = "theoretical"
    USER = "user-override"


class Outcome(str, Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolverBounds:
    """Longest root-to-leaf path (in edges) and largest number of children the search may build."""

    max_depth: int
    max_degree: int
    source: BoundsSource = BoundsSource.THEORETICAL


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    witness: Tree | None = None
    reason: str = ""
    stats: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def is_sat(self) -> bool:
        return self.outcome is Outcome.SAT

    def to_dict(self) -> dict[str, Any]:
        report: dict[str, Any] = {"verdict": self.outcome.value, "stats": dict(self.stats)}
        if self.reason:
            report["reason"] = self.reason
        return report


@dataclass(frozen=True)
class Phase:
    """Caps for one round of iterative deepening; set_size None leaves down-set sizes unbounded."""

    depth: int
    degree: int
    set_size: int | None = None


DEFAULT_PHASES = (Phase(1, 2, 1), Phase(2, 3, 2), Phase(4, 4, 3), Phase(6, 6, 4))


@dataclass(frozen=True)
class SolverSettings:
    search_budget: int = 200_000
    max_extended_predicates: int = 10
    phases: tuple[Phase, ...] = DEFAULT_PHASES

    @classmethod
    def from_config(cls, section: dict[str, Any]) -> SolverSettings:
        phases = tuple(Phase(p["depth"], p["degree"], p.get("set_size")) for p in section.get("phases", []))
        return cls(
            search_budget=int(section.get("search_budget", cls.search_budget)),
            max_extended_predicates=int(section.get("max_extended_predicates", cls.max_extended_predicates)),
            phases=phases or DEFAULT_PHASES,
        )


def default_bounds(nf: NormalFormFormula, mode: Mode | str = Mode.GENERAL, input_size: int | None = None) -> SolverBounds:
    """
    # The theoretical depth and degree bounds for a normal form.

        General mode: max_depth = 3·2^(2m) and max_degree = 4·2^(2m), with m
        the number of unary predicates of the extended signature. Singular
        mode over the descendant relation alone replaces the depth by
        6·|τ|·|φ|³, with τ the original signature (unary and binary symbols)
        and |φ| the size of the input sentence.

    Example
    -------
    > m = 1, mode = 'general'

        return

            SolverBounds(max_depth=12, max_degree=16)
    #
    """
    m = len(nf.extended_signature)
    depth = 3 * 2 ** (2 * m)
    degree = 4 * 2 ** (2 * m)
    if Mode(mode) is Mode.SINGULAR and nf.extended_signature.binary == {"D"}:
        original = nf.original_signature
        tau = len(original) + len(original.binary)
        phi = input_size if input_size is not None else nf.source_size
        depth = 6 * tau * phi**3
    return SolverBounds(depth, degree)


# ---------------------------------------------------------------- admissible 1-types


def admissible_types(ctx: TypeContext, core_mask: int | None = None) -> list[OneType]:
    """
    # 1-types that can occur in some model, by iterated elimination.

        A 1-type survives when it is compatible with itself, has exactly
        one core predicate in singular mode, and every witness it triggers
        can be met by a surviving 1-type in a compatible position.
    #
    """
    types = [
        a
        for a in range(1 << ctx.width)
        if (core_mask is None or (a & core_mask).bit_count() == 1) and ctx.self_ok(a)
    ]
    while True:
        alive = types
        kept = [a for a in types if all(_has_witness(ctx, a, eta, psi, alive) for _, eta, psi, _ in ctx.triggered(a))]
        if len(kept) == len(types):
            return kept
        types = kept


def _has_witness(ctx: TypeContext, a: OneType, eta, psi, alive) -> bool:
    for theta in eta:
        if theta is Theta.SAME:
            if psi(a, a, theta):
                return True
        elif any(psi(a, b, theta) and ctx.ok(a, b, theta) for b in alive):
            return True
    return False


def _order_visible(nf: NormalFormFormula) -> bool:
    return not any(SIBLINGS_AND_FREE <= c for c in nf.order_classes())


# ---------------------------------------------------------------- search


class _BudgetExhausted(Exception):
    pass


# (own 1-type, 1-types above, 1-types beside or free, DOWN slot, DOWN_PLUS slot)
Key = tuple


class _Search:
    """
    One search over a normal form. Successes are cached with the height of
    the subtree found; failures are cached globally when no cap pruned
    anything below them and per phase otherwise.
    """

    def __init__(self, nf: NormalFormFormula, singular: bool, bounds: SolverBounds, settings: SolverSettings):
        self.nf = nf
        self.ctx = TypeContext(nf)
        self.bounds = bounds
        self.settings = settings
        core = nf.extended_signature.core_mask if singular else None
        demand = lambda a: (len(self.ctx.triggered(a)), a.bit_count(), a)
        self.universe = sorted(admissible_types(self.ctx, core), key=demand)
        self.rank = {a: i for i, a in enumerate(self.universe)}
        self.ordered = _order_visible(nf)
        self.expansions = 0
        self.cache_hits = 0
        self.success: dict[Key, int] = {}
        self.choice: dict[Key, list[Key]] = {}
        self.failed: dict[Key, int] = {}
        self.phase_failed: dict[Key, int] = {}
        self.phase = Phase(bounds.max_depth, bounds.max_degree)

    def tick(self) -> None:
        self.expansions += 1
        if self.expansions > self.settings.search_budget:
            raise _BudgetExhausted

    def phases(self) -> Iterator[Phase]:
        seen = set()
        for p in self.settings.phases + (Phase(self.bounds.max_depth, self.bounds.max_degree),):
            p = Phase(
                min(p.depth, self.bounds.max_depth),
                min(p.degree, self.bounds.max_degree),
                None if p.set_size is None or p.set_size >= len(self.universe) else p.set_size,
            )
            if p not in seen:
                seen.add(p)
                yield p

    def run_phase(self, phase: Phase) -> tuple[Key | None, bool]:
        """Root key of a model found under the phase caps, and whether any cap pruned the search."""
        self.phase = phase
        self.phase_failed = {}
        cut = False
        for alpha in self.universe:
            below, pruned = self.subsets_below(alpha)
            cut |= pruned
            for down, down_plus in below:
                self.tick()
                if not self.ctx.phi_consistent(FullType.build(alpha, DOWN=down, DOWN_PLUS=down_plus)):
                    continue
                key = (alpha, frozenset(), frozenset(), down, down_plus)
                ok, pruned = self.realize(key, phase.depth)
                if ok:
                    return key, cut
                cut |= pruned
        return None, cut

    def cap(self, n: int) -> int:
        return n if self.phase.set_size is None else min(self.phase.set_size, n)

    def subsets(self, pool: list[OneType], smallest: int) -> Iterator[frozenset]:
        for r in range(smallest, self.cap(len(pool)) + 1):
            for combo in itertools.combinations(pool, r):
                yield frozenset(combo)

    def subsets_below(self, alpha: OneType, within: frozenset | None = None) -> tuple[Iterator[tuple], bool]:
        """
        Candidate (DOWN, DOWN_PLUS) pairs for a node of 1-type alpha, smaller
        sets first, and whether the phase's set-size cap hides some of them.
        """
        pool = self.universe if within is None else sorted(within, key=self.rank.__getitem__)
        ok = self.ctx.ok
        firsts = [b for b in pool if ok(alpha, b, Theta.DOWN)]
        seconds = [b for b in pool if ok(alpha, b, Theta.DOWN_PLUS)]
        cut = bool(firsts) and (self.cap(len(firsts)) < len(firsts) or self.cap(len(seconds)) < len(seconds))

        def pairs() -> Iterator[tuple]:
            yield frozenset(), frozenset()
            for down in self.subsets(firsts, 1):
                for down_plus in self.subsets(seconds, 0):
                    yield down, down_plus

        return pairs(), cut

    def down_witnessed(self, alpha: OneType, down: frozenset, down_plus: frozenset) -> bool:
        """Witnesses of alpha that can only lie below it are present in down or down_plus."""
        for _, eta, psi, _ in self.ctx.triggered(alpha):
            if not eta <= _DOWN_SLOTS:
                continue
            if not any(psi(alpha, b, t) for t in eta for b in (down if t is Theta.DOWN else down_plus)):
                return False
        return True

    def realize(self, key: Key, depth: int) -> tuple[bool, bool]:
        """Whether some subtree of height at most depth realises key, and whether a cap was hit."""
        height = self.success.get(key)
        if height is not None and height <= depth:
            self.cache_hits += 1
            return True, False
        if self.failed.get(key, -1) >= depth:
            self.cache_hits += 1
            return False, False
        if self.phase_failed.get(key, -1) >= depth:
            self.cache_hits += 1
            return False, True
        self.tick()

        alpha, above, outside, down, down_plus = key
        if not down:
            self.success[key] = 0
            self.choice[key] = []
            return True, False
        if depth == 0:
            cut = self.phase.depth < self.bounds.max_depth
        else:
            ok, cut = self.expand(key, depth)
            if ok:
                return True, False
        failures = self.phase_failed if cut else self.failed
        failures[key] = max(failures.get(key, -1), depth)
        return False, cut

    def expand(self, key: Key, depth: int) -> tuple[bool, bool]:
        alpha, above, outside, down, down_plus = key
        options: list[tuple] = []
        cut = False
        for beta in sorted(down, key=self.rank.__getitem__):
            pairs, pruned = self.subsets_below(beta, down_plus)
            cut |= pruned
            mine = []
            for d1, d2 in pairs:
                self.tick()
                if self.down_witnessed(beta, d1, d2):
                    mine.append((beta, d1, d2))
            if not mine:
                return False, cut
            options.extend(mine)

        repeat = self.phase.degree if self.ordered else 2
        most = min(self.phase.degree, len(options) * repeat)
        if most < min(self.bounds.max_degree, len(options) * repeat):
            cut = True
        ancestors = above | {alpha}
        for count in range(len(down), most + 1):
            for chosen in self.pick(options, count, repeat, down, down_plus):
                for row in self.arrangements(chosen):
                    self.tick()
                    fts = child_types(alpha, above, outside, list(row))
                    if not all(self.ctx.phi_consistent(ft) for ft in fts):
                        continue
                    keys = [(t[0], ancestors, reduce(ft).free_and_sib, t[1], t[2]) for t, ft in zip(row, fts)]
                    ok, pruned = self.realize_all(keys, depth - 1)
                    if ok:
                        self.success[key] = 1 + max(self.success[k] for k in keys)
                        self.choice[key] = keys
                        return True, False
                    cut |= pruned
        return False, cut

    def realize_all(self, keys: list[Key], depth: int) -> tuple[bool, bool]:
        for k in keys:
            ok, cut = self.realize(k, depth)
            if not ok:
                return False, cut
        return True, False

    def pick(self, options: list[tuple], count: int, repeat: int, down: frozenset, down_plus: frozenset):
        """Multisets of count options covering every 1-type of down and every 1-type of down_plus."""

        def walk(start: int, left: int, chosen: list[tuple], last_used: int):
            if left == 0:
                if {t[0] for t in chosen} == down and frozenset().union(*(t[1] | t[2] for t in chosen)) == down_plus:
                    yield tuple(chosen)
                return
            if len(down - {t[0] for t in chosen}) > left:
                return
            for i in range(start, len(options)):
                used = last_used + 1 if i == start and chosen and chosen[-1] is options[i] else 1
                if used > repeat:
                    continue
                chosen.append(options[i])
                yield from walk(i, left - 1, chosen, used)
                chosen.pop()

        yield from walk(0, count, [], 0)

    def arrangements(self, chosen: tuple) -> Iterator[tuple]:
        if not self.ordered or len(chosen) < 2:
            yield chosen
            return
        yield from dict.fromkeys(itertools.permutations(chosen))

    def build(self, key: Key) -> tuple:
        return (key[0], [self.build(k) for k in self.choice[key]])

    def stats(self) -> dict[str, Any]:
        return {
            "expansions": self.expansions,
            "cache_hits": self.cache_hits,
            "types": len(self.universe),
            "ordered": self.ordered,
            "phase": {"depth": self.phase.depth, "degree": self.phase.degree, "set_size": self.phase.set_size},
        }


def decide_sat(
    f: Formula,
    sig: Signature,
    mode: Mode | str = Mode.GENERAL,
    bounds: SolverBounds | None = None,
    settings: SolverSettings | None = None,
) -> Verdict:
    """
    # Decide whether the sentence f has a finite tree model.

        The sentence is brought into normal form; the search then guesses a
        root full type with empty non-down slots and, level by level, the
        children of each node as (1-type, DOWN slot, DOWN_PLUS slot)
        triples. All other slots of a child follow from its parent and
        siblings. Iterative deepening runs the configured phases before the
        theoretical bounds.

    Parameters
    ----------
    > f : Formula

        A sentence over sig.

    > sig : Signature

    > mode : 'general' or 'singular'

    >> default : 'general'

        Singular mode only admits 1-types with exactly one predicate of
        sig's singular core.

    > bounds : SolverBounds

    >> default : the theoretical bounds

    > settings : SolverSettings

    >> default : SolverSettings()

    Returns
    -------
    > Verdict

        Sat carries a witness over sig that model-checks true against f.
        Unsat is only reported when the search was exhaustive under the
        theoretical bounds; anything else is Unknown with a reason.

    Example
    -------
    > f = exists x. a(x), sig.unary = ('a',)

        return

            Verdict(SAT) with a single node labelled {a}
    #
    """
    if free_vars(f):
        raise NotASentenceError(f"decide_sat needs a sentence; free variables {sorted(free_vars(f))}")
    mode = Mode(mode)
    settings = settings or SolverSettings()
    nf = scott_normal_form(f, sig)
    m = len(nf.extended_signature)
    if m > settings.max_extended_predicates:
        reason = f"normal form has {m} unary predicates, more than the configured {settings.max_extended_predicates}"
        log.warning(reason)
        return Verdict(Outcome.UNKNOWN, reason=reason, stats={"predicates": m})
    bounds = bounds or default_bounds(nf, mode, size(f))
    return solve_normal_form(nf, f, mode, bounds, settings)


def solve_normal_form(
    nf: NormalFormFormula, f: Formula, mode: Mode, bounds: SolverBounds, settings: SolverSettings
) -> Verdict:
    """Run the search on nf; a model found is projected to f's signature and checked against f."""
    search = _Search(nf, mode is Mode.SINGULAR, bounds, settings)
    stats = search.stats
    if not search.universe:
        log.info("no admissible 1-types: unsatisfiable")
        return Verdict(Outcome.UNSAT, reason="no admissible 1-types", stats=stats())
    log.debug("%d admissible 1-types, sibling order %s", len(search.universe), "visible" if search.ordered else "invisible")

    exact = False
    try:
        for phase in search.phases():
            log.debug("phase depth=%d degree=%d set_size=%s", phase.depth, phase.degree, phase.set_size)
            root, cut = search.run_phase(phase)
            if root is not None:
                return _witness_verdict(search, root, nf, f, mode)
            if not cut:
                exact = True
                break
    except _BudgetExhausted:
        log.info("search budget of %d expansions exhausted", settings.search_budget)
        return Verdict(Outcome.UNKNOWN, reason="search budget exhausted", stats=stats())
    except RecursionError:
        return Verdict(Outcome.UNKNOWN, reason="search too deep for the interpreter stack", stats=stats())

    if exact and bounds.source is BoundsSource.THEORETICAL:
        return Verdict(Outcome.UNSAT, stats=stats())
    return Verdict(Outcome.UNKNOWN, reason="bounds exhausted", stats=stats())


def _witness_verdict(search: _Search, root: Key, nf: NormalFormFormula, f: Formula, mode: Mode) -> Verdict:
    full = Tree.from_nested(nf.extended_signature, search.build(root))
    witness = full.project(nf.original_signature)
    stats = search.stats() | {"nodes": len(witness), "depth": witness.depth(), "degree": witness.degree()}
    if not model_check(witness, f) or (mode is Mode.SINGULAR and not is_singular(witness)):
        log.error("witness failed verification against the input sentence")
        return Verdict(Outcome.UNKNOWN, reason="witness failed verification", stats=stats)
    log.info("model with %d nodes found", len(witness))
    return Verdict(Outcome.SAT, witness, stats=stats)
