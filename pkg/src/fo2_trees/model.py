"""Finite labelled ordered trees, model checking and full-type extraction."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Sequence

from fo2_trees.checks import NotASentenceError, PreconditionError, SignatureMismatch
from fo2_trees.formula import (
    RELATION_SLOTS,
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
    Theta,
    Unary,
    free_vars,
    predicates,
)
from fo2_trees.typesys import FullType, ReducedFullType, reduce

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tree:
    """
    # A finite unranked ordered tree whose nodes carry 1-types over sig.

        Nodes are numbered 0..n-1 with 0 the root; children[v] lists the
        children of v from left to right. Trees are never mutated:
        surgery and projection build new ones.
    #
    """

    sig: Signature
    labels: tuple[int, ...]
    children: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "children", tuple(tuple(c) for c in self.children))
        n = len(self.labels)
        if n == 0:
            raise PreconditionError("a tree has at least one node")
        if len(self.children) != n:
            raise PreconditionError("labels and children lists differ in length")
        limit = 1 << len(self.sig)
        for label in self.labels:
            if not 0 <= label < limit:
                raise SignatureMismatch(f"label {label:#x} uses predicates outside {self.sig.unary}")
        seen = [False] * n
        seen[0] = True
        stack = [0]
        while stack:
            v = stack.pop()
            for c in self.children[v]:
                if not 0 <= c < n or seen[c]:
                    raise PreconditionError(f"node {c} is not a fresh child of node {v}")
                seen[c] = True
                stack.append(c)
        if not all(seen):
            raise PreconditionError("some nodes are not reachable from the root")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def root(self) -> int:
        return 0

    @cached_property
    def parent(self) -> tuple[int | None, ...]:
        parent: list[int | None] = [None] * len(self)
        for v, kids in enumerate(self.children):
            for c in kids:
                parent[c] = v
        return tuple(parent)

    @cached_property
    def sibling_index(self) -> tuple[int, ...]:
        index = [0] * len(self)
        for kids in self.children:
            for i, c in enumerate(kids):
                index[c] = i
        return tuple(index)

    @cached_property
    def ancestors(self) -> tuple[frozenset[int], ...]:
        result: list[frozenset[int]] = [frozenset()] * len(self)
        for v in self.preorder():
            p = self.parent[v]
            if p is not None:
                result[v] = result[p] | {p}
        return tuple(result)

    @cached_property
    def slot_matrix(self) -> tuple[tuple[Theta, ...], ...]:
        """slot_matrix[v][w] is the order formula θ with θ[v, w]."""
        n = len(self)
        return tuple(tuple(self._position(v, w) for w in range(n)) for v in range(n))

    def _position(self, v: int, w: int) -> Theta:
        if v == w:
            return Theta.SAME
        parent, ancestors = self.parent, self.ancestors
        if v in ancestors[w]:
            return Theta.DOWN if parent[w] == v else Theta.DOWN_PLUS
        if w in ancestors[v]:
            return Theta.UP if parent[v] == w else Theta.UP_PLUS
        if parent[v] is not None and parent[v] == parent[w]:
            gap = self.sibling_index[w] - self.sibling_index[v]
            if gap == 1:
                return Theta.RIGHT
            if gap == -1:
                return Theta.LEFT
            return Theta.RIGHT_PLUS if gap > 0 else Theta.LEFT_PLUS
        return Theta.FREE

    def position(self, v: int, w: int) -> Theta:
        return self.slot_matrix[v][w]

    def preorder(self, start: int = 0) -> list[int]:
        order, stack = [], [start]
        while stack:
            v = stack.pop()
            order.append(v)
            stack.extend(reversed(self.children[v]))
        return order

    def depth(self) -> int:
        """Length in edges of the longest root-to-leaf path."""
        return max((len(a) for a in self.ancestors), default=0)

    def degree(self) -> int:
        return max(len(kids) for kids in self.children)

    def label_names(self, v: int) -> tuple[str, ...]:
        return self.sig.names(self.labels[v])

    def check_node(self, v: int) -> None:
        if not isinstance(v, int) or not 0 <= v < len(self):
            raise PreconditionError(f"node {v!r} is not in a tree of {len(self)} nodes")

    def subtree(self, v: int) -> tuple:
        """Nested (label, [children]) form of the subtree rooted at v."""
        return (self.labels[v], [self.subtree(c) for c in self.children[v]])

    def project(self, sig: Signature) -> Tree:
        """The same tree with labels restricted to the predicates of sig."""
        missing = set(sig.unary) - set(self.sig.unary)
        if missing:
            raise SignatureMismatch(f"predicates {sorted(missing)} are not in the tree's signature")
        positions = [(self.sig.index(name), i) for i, name in enumerate(sig.unary)]
        labels = [sum(1 << i for j, i in positions if label >> j & 1) for label in self.labels]
        return Tree(sig, labels, self.children)

    def render(self) -> str:
        lines = []

        def walk(v: int, indent: int) -> None:
            lines.append("  " * indent + "{" + ",".join(self.label_names(v)) + "}")
            for c in self.children[v]:
                walk(c, indent + 1)

        walk(0, 0)
        return "\n".join(lines)

    # ------------------------------------------------------------ construction

    @classmethod
    def from_nested(cls, sig: Signature, nested: tuple) -> Tree:
        """
        # Build a tree from (label, [children]) pairs, numbering nodes in preorder.

            A label is a 1-type bitmask or an iterable of predicate names.

        Example
        -------
        > Tree.from_nested(sig, ({"a"}, [({"b"}, []), ({"c"}, [])]))

            return

                a root labelled {a} with two leaf children {b} and {c}
        #
        """
        labels: list[int] = []
        children: list[list[int]] = []
        stack = [(nested, None)]
        while stack:
            (label, kids), parent = stack.pop()
            v = len(labels)
            labels.append(_as_mask(sig, label))
            children.append([])
            if parent is not None:
                children[parent].append(v)
            stack.extend((kid, v) for kid in reversed(list(kids)))
        return cls(sig, labels, children)

    @classmethod
    def chain(cls, sig: Signature, labels: Sequence) -> Tree:
        """A path whose i-th node (from the root) carries labels[i]."""
        if not labels:
            raise PreconditionError("a chain has at least one node")
        n = len(labels)
        return cls(sig, [_as_mask(sig, l) for l in labels], [[i + 1] if i + 1 < n else [] for i in range(n)])

    # ------------------------------------------------------------ JSON

    def to_dict(self) -> dict[str, Any]:
        sig: dict[str, Any] = {"unary": list(self.sig.unary), "bin": sorted(self.sig.binary)}
        if self.sig.singular_core is not None:
            sig["core"] = list(self.sig.singular_core)

        def node(v: int) -> dict[str, Any]:
            return {"label": sorted(self.label_names(v)), "children": [node(c) for c in self.children[v]]}

        return {"sig": sig, "root": node(0)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Tree:
        try:
            raw = data["sig"]
            sig = Signature(tuple(raw["unary"]), frozenset(raw.get("bin", ["D"])), raw.get("core"))

            def nested(node: dict[str, Any]) -> tuple:
                return (node["label"], [nested(c) for c in node.get("children", [])])

            return cls.from_nested(sig, nested(data["root"]))
        except (KeyError, TypeError) as exc:
            raise PreconditionError(f"malformed tree document: {exc}") from exc


def _as_mask(sig: Signature, label) -> int:
    if isinstance(label, int):
        return label
    return sig.mask(label)


# ---------------------------------------------------------------- model checking


class _Checker:
    """Evaluates formulas on one tree, caching quantified subformulas per relevant assignment."""

    def __init__(self, t: Tree):
        self.t = t
        self.matrix = t.slot_matrix
        self.labels = t.labels
        self.nodes = range(len(t))
        self.index = t.sig._index
        self._cache: dict = {}
        self._free: dict = {}

    def free(self, f: Formula) -> frozenset[str]:
        key = id(f)
        found = self._free.get(key)
        if found is None:
            found = free_vars(f)
            self._free[key] = found
        return found

    def holds(self, f: Formula, x: int | None, y: int | None) -> bool:
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Unary):
            node = x if f.var == "x" else y
            return bool(self.labels[node] >> self.index[f.pred] & 1)
        if isinstance(f, (Order, Position)):
            a = x if f.left == "x" else y
            b = x if f.right == "x" else y
            slots = RELATION_SLOTS[f.rel] if isinstance(f, Order) else f.slots
            return self.matrix[a][b] in slots
        if isinstance(f, Not):
            return not self.holds(f.body, x, y)
        if isinstance(f, And):
            return self.holds(f.left, x, y) and self.holds(f.right, x, y)
        if isinstance(f, Or):
            return self.holds(f.left, x, y) or self.holds(f.right, x, y)
        if isinstance(f, Implies):
            return not self.holds(f.left, x, y) or self.holds(f.right, x, y)
        if isinstance(f, Iff):
            return self.holds(f.left, x, y) == self.holds(f.right, x, y)

        free = self.free(f)
        key = (id(f), x if "x" in free else None, y if "y" in free else None)
        found = self._cache.get(key)
        if found is not None:
            return found
        if f.var == "x":
            values = (self.holds(f.body, v, y) for v in self.nodes)
        else:
            values = (self.holds(f.body, x, v) for v in self.nodes)
        found = any(values) if isinstance(f, Exists) else all(values)
        self._cache[key] = found
        return found


def _check_signature(t: Tree, f: Formula) -> None:
    missing = predicates(f) - set(t.sig.unary)
    if missing:
        raise SignatureMismatch(f"predicates {sorted(missing)} do not occur in the tree's signature")


def model_check(t: Tree, f: Formula) -> bool:
    """
    # Whether the tree t satisfies the sentence f.

        Quantified subformulas are cached per assignment of their free
        variables, so the cost stays within |f|·|t|² evaluations.

    Parameters
    ----------
    > t : Tree

    > f : Formula

        A sentence over t's unary predicates.

    Returns
    -------
    > boolean

    Example
    -------
    > a single node labelled {a}, f = exists x. a(x)

        return

            True
    #
    """
    if free_vars(f):
        raise NotASentenceError(f"model_check needs a sentence; free variables {sorted(free_vars(f))}")
    _check_signature(t, f)
    return _Checker(t).holds(f, None, None)


def satisfies(t: Tree, f: Formula, x: int | None = None, y: int | None = None) -> bool:
    """Truth of an open formula under the node assignment x, y."""
    for var, node in (("x", x), ("y", y)):
        if var in free_vars(f):
            if node is None:
                raise NotASentenceError(f"free variable {var} is unassigned")
            t.check_node(node)
    _check_signature(t, f)
    return _Checker(t).holds(f, x, y)


# ---------------------------------------------------------------- full types


def ftp(t: Tree, v: int) -> FullType:
    """The full type realised by node v: for each θ, the 1-types of the nodes w with θ[v, w]."""
    t.check_node(v)
    slots: list[set[int]] = [set() for _ in Theta]
    row = t.slot_matrix[v]
    for w, theta in enumerate(row):
        slots[theta].add(t.labels[w])
    return FullType(tuple(frozenset(s) for s in slots))


def rftp(t: Tree, v: int) -> ReducedFullType:
    return reduce(ftp(t, v))


def realized_types(t: Tree) -> list[FullType]:
    return [ftp(t, v) for v in range(len(t))]


def surgery(t: Tree, v: int, w: int) -> Tree:
    """
    # Replace the subtree rooted at v by the subtree rooted at w.

        w must be a proper descendant of v with the same reduced full type;
        the result has strictly fewer nodes and keeps every normal-form
        sentence t satisfies.

    Parameters
    ----------
    > t : Tree

    > v, w : integer

        Node ids of t.

    Returns
    -------
    > Tree
    #
    """
    return _splice(t, v, w)[0]


def merge_node(t: Tree, v: int, w: int) -> int:
    """Id in surgery(t, v, w) of the node that took v's place, a copy of w."""
    return _splice(t, v, w)[1]


def _splice(t: Tree, v: int, w: int) -> tuple[Tree, int]:
    t.check_node(v)
    t.check_node(w)
    if v not in t.ancestors[w]:
        raise PreconditionError(f"node {w} is not a proper descendant of node {v}")
    if rftp(t, v) != rftp(t, w):
        raise PreconditionError(f"nodes {v} and {w} realise different reduced full types")

    # from_nested numbers nodes in preorder, so count them in the same order
    numbered = 0
    merged = 0

    def rebuild(u: int) -> tuple:
        nonlocal numbered, merged
        if u == v:
            merged = numbered
            numbered += len(t.preorder(w))
            return t.subtree(w)
        numbered += 1
        return (t.labels[u], [rebuild(c) for c in t.children[u]])

    result = Tree.from_nested(t.sig, rebuild(0))
    log.debug("surgery at (%d, %d): %d -> %d nodes", v, w, len(t), len(result))
    return result, merged


def is_singular(t: Tree, sig: Signature | None = None) -> bool:
    """Whether exactly one predicate of the singular core holds at every node."""
    sig = sig or t.sig
    core = [t.sig.index(name) for name in sig.core if name in t.sig]
    if len(core) != len(sig.core):
        return False
    mask = sum(1 << i for i in core)
    return all((label & mask).bit_count() == 1 for label in t.labels)
