"""Brute-force bounded satisfiability over all small labelled trees."""

from __future__ import annotations

import itertools
import logging
import random
from functools import lru_cache
from typing import Iterator

from fo2_trees.checks import NotASentenceError, PreconditionError
from fo2_trees.formula import (
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
    Unary,
    free_vars,
    validate_formula,
)
from fo2_trees.model import Tree, model_check

log = logging.getLogger(__name__)

# A shape is the tuple of its children's shapes.
Shape = tuple


@lru_cache(maxsize=None)
def _forests(n: int) -> tuple[tuple[Shape, ...], ...]:
    if n == 0:
        return ((),)
    found = []
    for k in range(1, n + 1):
        for first in _trees(k):
            for rest in _forests(n - k):
                found.append((first,) + rest)
    return tuple(found)


@lru_cache(maxsize=None)
def _trees(n: int) -> tuple[Shape, ...]:
    return _forests(n - 1)


def enumerate_shapes(max_nodes: int) -> Iterator[Shape]:
    """Every ordered rooted tree shape with at most max_nodes nodes, smaller shapes first."""
    if max_nodes < 1:
        raise PreconditionError("max_nodes must be at least 1")
    for n in range(1, max_nodes + 1):
        yield from _trees(n)


def shape_size(shape: Shape) -> int:
    return 1 + sum(shape_size(c) for c in shape)


def node_labels(sig: Signature, singular: bool) -> list[int]:
    """The 1-types a node may carry: all of them, or one core predicate plus any non-core ones."""
    if not singular:
        return list(range(1 << len(sig)))
    core = [1 << sig.index(name) for name in sig.core]
    rest = [1 << i for i, name in enumerate(sig.unary) if name not in sig.core]
    extras = [sum(combo) for r in range(len(rest) + 1) for combo in itertools.combinations(rest, r)]
    return sorted(c | e for c in core for e in extras)


def _nested(shape: Shape, labels: Iterator[int]) -> tuple:
    label = next(labels)
    return (label, [_nested(c, labels) for c in shape])


def enumerate_trees(max_nodes: int, sig: Signature, singular: bool = False) -> Iterator[Tree]:
    """
    # Every labelled ordered tree with at most max_nodes nodes, each exactly once.

        Shapes come in canonical order and every shape is crossed with
        every labelling, nodes labelled in preorder.

    Parameters
    ----------
    > max_nodes : integer

    > sig : Signature

    > singular : boolean

    >> default : False

        Label each node with exactly one predicate of the singular core.

    Returns
    -------
    > iterator of Tree

    Example
    -------
    > max_nodes = 2, sig.unary = ('a',), singular = False

        return

            6 trees: 2 one-node trees and 4 two-node chains
    #
    """
    labels = node_labels(sig, singular)
    for shape in enumerate_shapes(max_nodes):
        n = shape_size(shape)
        for labelling in itertools.product(labels, repeat=n):
            yield Tree.from_nested(sig, _nested(shape, iter(labelling)))


def count_trees(max_nodes: int, sig: Signature, singular: bool = False) -> int:
    """Closed-form number of trees enumerate_trees yields."""
    per_node = len(node_labels(sig, singular))
    return sum(len(_trees(n)) * per_node**n for n in range(1, max_nodes + 1))


def brute_force_sat(f: Formula, sig: Signature, max_nodes: int, singular: bool = False) -> Tree | None:
    """The first enumerated tree satisfying the sentence f, or None."""
    if free_vars(f):
        raise NotASentenceError(f"brute force needs a sentence; free variables {sorted(free_vars(f))}")
    validate_formula(f, sig)
    checked = 0
    for t in enumerate_trees(max_nodes, sig, singular):
        checked += 1
        if model_check(t, f):
            log.debug("oracle found a %d-node model after %d trees", len(t), checked)
            return t
    log.debug("oracle checked %d trees without a model", checked)
    return None


# ---------------------------------------------------------------- corpora


def _random_formula(rng: random.Random, sig: Signature, depth: int, scope: frozenset, guarded: bool) -> Formula:
    binary = sorted(sig.binary)
    vars_ = sorted(scope)
    if depth <= 0 or (vars_ and rng.random() < 0.25):
        if not vars_:
            return Const(rng.random() < 0.5)
        choice = rng.random()
        if choice < 0.6 or not binary and choice < 0.9:
            return Unary(rng.choice(sig.unary), rng.choice(vars_))
        if choice < 0.9:
            return Order(rng.choice(binary), rng.choice(vars_), rng.choice(vars_))
        return Order("=", rng.choice(vars_), rng.choice(vars_))

    if not vars_ or rng.random() < 0.4:
        var = rng.choice(("x", "y"))
        inner = frozenset(scope | {var})
        body = _random_formula(rng, sig, depth - 1, inner, guarded)
        kind = rng.choice((Exists, Forall))
        if guarded:
            guard = _random_guard(rng, sig, inner)
            body = And(guard, body) if kind is Exists else Implies(guard, body)
        return kind(var, body)

    kind = rng.choice((Not, And, Or, Implies, Iff))
    if kind is Not:
        return Not(_random_formula(rng, sig, depth - 1, scope, guarded))
    return kind(
        _random_formula(rng, sig, depth - 1, scope, guarded),
        _random_formula(rng, sig, depth - 1, scope, guarded),
    )


def _random_guard(rng: random.Random, sig: Signature, scope: frozenset) -> Formula:
    if len(scope) == 1:
        (var,) = scope
        return Unary(rng.choice(sig.unary), var)
    return rng.choice((Order("D", "x", "y"), Order("D", "y", "x"), Order("=", "x", "y")))


def random_sentences(seed: int, count: int, sig: Signature, depth: int = 3, guarded: bool = False) -> list[Formula]:
    """
    # A reproducible corpus of random sentences over sig.

        With guarded=True every quantifier is relativised by a guard (a
        unary atom for one variable, D or = for two), which needs D in
        sig.binary.
    #
    """
    if guarded and "D" not in sig.binary:
        raise PreconditionError("guarded corpora need the descendant relation")
    rng = random.Random(seed)
    return [_random_formula(rng, sig, depth, frozenset(), guarded) for _ in range(count)]
