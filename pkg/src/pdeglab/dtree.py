"""Decision trees: minimum-depth search, reduction and evaluation."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

import numpy as np

from .boolfn import ArityError, BooleanFunction

MIN_DEPTH_CAP = 12


@dataclass(frozen=True)
class Leaf:
    value: int


@dataclass(frozen=True)
class Node:
    var: int
    lo: "Tree"
    hi: "Tree"


Tree = Union[Leaf, Node]


@dataclass(frozen=True)
class DecisionTree:
    arity: int
    root: Tree

    def __post_init__(self):
        self._check(self.root, frozenset())

    def _check(self, node: Tree, seen: frozenset) -> None:
        if isinstance(node, Leaf):
            if node.value not in (0, 1):
                raise ValueError(f"leaf value {node.value!r} is not a bit")
            return
        if not 0 <= node.var < self.arity:
            raise ValueError(f"variable {node.var} outside arity {self.arity}")
        if node.var in seen:
            raise ValueError(f"variable {node.var} queried twice on one path")
        self._check(node.lo, seen | {node.var})
        self._check(node.hi, seen | {node.var})

    @property
    def depth(self) -> int:
        return _depth(self.root)

    @property
    def size(self) -> int:
        """Number of leaves."""
        return sum(1 for _ in _leaves(self.root))

    def variables(self) -> frozenset[int]:
        return frozenset(_variables(self.root))

    def evaluate(self, a: int) -> int:
        node = self.root
        while isinstance(node, Node):
            node = node.hi if (a >> node.var) & 1 else node.lo
        return node.value

    def path(self, a: int) -> tuple[tuple[int, int], ...]:
        """The ``(variable, value)`` queries made on input ``a``."""
        out = []
        node = self.root
        while isinstance(node, Node):
            bit = (a >> node.var) & 1
            out.append((node.var, bit))
            node = node.hi if bit else node.lo
        return tuple(out)

    def to_function(self) -> BooleanFunction:
        return BooleanFunction(self.arity, subtree_table(self.root, self.arity))

    def to_json(self) -> dict:
        return {"arity": self.arity, "root": _node_json(self.root)}

    @classmethod
    def from_json(cls, data: dict) -> "DecisionTree":
        return cls(int(data["arity"]), _node_from_json(data["root"]))


def _depth(node: Tree) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(_depth(node.lo), _depth(node.hi))


def _leaves(node: Tree) -> Iterator[Leaf]:
    if isinstance(node, Leaf):
        yield node
    else:
        yield from _leaves(node.lo)
        yield from _leaves(node.hi)


def _variables(node: Tree) -> Iterator[int]:
    if isinstance(node, Node):
        yield node.var
        yield from _variables(node.lo)
        yield from _variables(node.hi)


def _node_json(node: Tree):
    if isinstance(node, Leaf):
        return node.value
    return {"var": node.var, "lo": _node_json(node.lo), "hi": _node_json(node.hi)}


def _node_from_json(data) -> Tree:
    if isinstance(data, int):
        return Leaf(data)
    return Node(int(data["var"]), _node_from_json(data["lo"]), _node_from_json(data["hi"]))


def subtree_table(node: Tree, arity: int) -> np.ndarray:
    """Truth table (over all ``arity`` variables) of the function computed at ``node``."""
    if arity > 26:
        raise ArityError(f"cannot tabulate a tree over {arity} variables")
    x = np.arange(1 << arity, dtype=np.int64)

    def walk(nd: Tree) -> np.ndarray:
        if isinstance(nd, Leaf):
            return np.full(x.shape, nd.value, dtype=np.uint8)
        return np.where((x >> nd.var) & 1, walk(nd.hi), walk(nd.lo)).astype(np.uint8)

    return walk(node)


# --- minimum depth ----------------------------------------------------------

def _split(table: np.ndarray, k: int, j: int) -> tuple[bytes, bytes]:
    cube = table.reshape((2,) * k)
    axis = k - 1 - j
    return (np.take(cube, 0, axis=axis).tobytes(), np.take(cube, 1, axis=axis).tobytes())


@lru_cache(maxsize=1 << 20)
def _min_depth(k: int, table: bytes) -> tuple[int, int]:
    """``(D, j)`` for the subfunction on ``k`` local variables; ``j`` = best local split (-1 at leaves)."""
    arr = np.frombuffer(table, dtype=np.uint8)
    if arr.min() == arr.max():
        return 0, -1
    best, best_j = k + 1, -1
    for j in range(k):
        t0, t1 = _split(arr, k, j)
        if t0 == t1:
            continue
        d = 1 + max(_min_depth(k - 1, t0)[0], _min_depth(k - 1, t1)[0])
        if d < best:
            best, best_j = d, j
            if best == 1:
                break
    return best, best_j


def decision_tree_depth(f: BooleanFunction) -> int:
    if f.arity > MIN_DEPTH_CAP:
        raise ArityError(f"minimum-depth search capped at arity {MIN_DEPTH_CAP}, got {f.arity}")
    return _min_depth(f.arity, f.table.tobytes())[0]


def min_depth_tree(f: BooleanFunction) -> DecisionTree:
    """A minimum-depth tree for ``f``; ties go to the lowest variable index.

    The search is memoised on subfunction tables, so restrictions that induce
    the same subfunction on the same number of free variables share one entry.
    """
    if f.arity > MIN_DEPTH_CAP:
        raise ArityError(f"minimum-depth search capped at arity {MIN_DEPTH_CAP}, got {f.arity}")

    def build(free: tuple[int, ...], table: bytes) -> Tree:
        k = len(free)
        d, j = _min_depth(k, table)
        if d == 0:
            return Leaf(int(table[0]))
        t0, t1 = _split(np.frombuffer(table, dtype=np.uint8), k, j)
        rest = free[:j] + free[j + 1:]
        return Node(free[j], build(rest, t0), build(rest, t1))

    return DecisionTree(f.arity, build(tuple(range(f.arity)), f.table.tobytes()))


def reduced_tree(tree: DecisionTree) -> DecisionTree:
    """Collapse every node whose two children compute the same function."""

    def walk(node: Tree) -> tuple[Tree, np.ndarray]:
        if isinstance(node, Leaf):
            return node, subtree_table(node, tree.arity)
        lo, t_lo = walk(node.lo)
        hi, t_hi = walk(node.hi)
        if np.array_equal(t_lo, t_hi):
            return lo, t_lo
        x = np.arange(1 << tree.arity, dtype=np.int64)
        return Node(node.var, lo, hi), np.where((x >> node.var) & 1, t_hi, t_lo).astype(np.uint8)

    return DecisionTree(tree.arity, walk(tree.root)[0])


def is_reduced(tree: DecisionTree) -> bool:
    def ok(node: Tree) -> bool:
        if isinstance(node, Leaf):
            return True
        if np.array_equal(subtree_table(node.lo, tree.arity), subtree_table(node.hi, tree.arity)):
            return False
        return ok(node.lo) and ok(node.hi)

    return ok(tree.root)
