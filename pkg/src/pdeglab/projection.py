"""Projecting a truly n-variate function onto a pseudo-addressing function.

Pipeline: a reduced minimum-depth tree, one pair of diverging paths per
variable, an independent set in the resulting conflict graph, and a random
map of the remaining variables into ``r = 10 d^2`` addressing variables.
Variable ``k`` of the projected function is an addressing variable when
``k < r`` and the addressed variable ``z_{k - r}`` otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .boolfn import BooleanFunction, Projection, is_truly_n_variate, project
from .dtree import DecisionTree, Leaf, Node, Tree, min_depth_tree, reduced_tree, subtree_table
from .probpoly import mix, rng_for

RETRY_CAP = 64
COMPACT_CAP = 24

Path = tuple[tuple[int, int], ...]


class DegenerateProjection(RuntimeError):
    """No addressed variable survived the sampled projection."""


@dataclass(frozen=True)
class PathPair:
    """Two root-to-leaf paths through the first node ``w`` querying ``var``, diverging there.

    ``prefix`` is the root-to-``w`` path.  ``swapped`` records that the path
    through ``w``'s 0-child is the one ending in 1.
    """

    var: int
    prefix: Path
    path0: Path
    path1: Path
    swapped: bool

    @property
    def others(self) -> frozenset[int]:
        return frozenset(v for v, _ in self.path0 + self.path1 if v != self.var)

    def consistent(self) -> bool:
        vals0 = dict(self.path0)
        vals1 = dict(self.path1)
        if vals0.get(self.var) == vals1.get(self.var) or self.var not in vals0:
            return False
        return all(vals0[v] == vals1[v] for v in vals0.keys() & vals1.keys() if v != self.var)

    def to_json(self) -> dict:
        return {"var": self.var, "path0": [list(q) for q in self.path0], "path1": [list(q) for q in self.path1],
                "swapped": self.swapped}


def _follow(node: Tree, a: int) -> tuple[Path, int]:
    out = []
    while isinstance(node, Node):
        bit = (a >> node.var) & 1
        out.append((node.var, bit))
        node = node.hi if bit else node.lo
    return tuple(out), node.value


def _first_queries(tree: DecisionTree) -> dict[int, tuple[Path, Node]]:
    found: dict[int, tuple[Path, Node]] = {}

    def walk(node: Tree, prefix: Path) -> None:
        if isinstance(node, Leaf):
            return
        found.setdefault(node.var, (prefix, node))
        walk(node.lo, prefix + ((node.var, 0),))
        walk(node.hi, prefix + ((node.var, 1),))

    walk(tree.root, ())
    return found


def path_pairs(tree: DecisionTree) -> dict[int, PathPair]:
    """One :class:`PathPair` per queried variable, taking the first query of it in preorder."""
    out = {}
    for var, (prefix, w) in sorted(_first_queries(tree).items()):
        t0 = subtree_table(w.lo, tree.arity)
        t1 = subtree_table(w.hi, tree.arity)
        diff = np.flatnonzero(t0 != t1)
        if diff.size == 0:
            raise ValueError(f"tree is not reduced: both children of the query of x{var} agree")
        a = int(diff[0])
        tail0, out0 = _follow(w.lo, a)
        tail1, _ = _follow(w.hi, a)
        lo_path = prefix + ((var, 0),) + tail0
        hi_path = prefix + ((var, 1),) + tail1
        swapped = out0 == 1
        p0, p1 = (hi_path, lo_path) if swapped else (lo_path, hi_path)
        out[var] = PathPair(var, prefix, p0, p1, swapped)
    return out


def conflict_graph(pairs: dict[int, PathPair], n: int) -> list[set[int]]:
    adj = [set() for _ in range(n)]
    for i, pp in pairs.items():
        for j in pp.others:
            if j != i:
                adj[i].add(j)
                adj[j].add(i)
    return adj


def independent_set(pairs: dict[int, PathPair], n: int, depth: int) -> tuple[int, ...]:
    """Greedy minimum-degree independent set in the conflict graph, at least ``n / (4 depth + 1)`` large."""
    adj = conflict_graph(pairs, n)
    alive = set(range(n))
    chosen = []
    while alive:
        v = min(alive, key=lambda u: (len(adj[u] & alive), u))
        chosen.append(v)
        alive -= adj[v] | {v}
    if len(chosen) * (4 * depth + 1) < n:
        raise AssertionError(f"independent set of size {len(chosen)} is below n/(4d+1) for n={n}, d={depth}")
    return tuple(sorted(chosen))


@dataclass(frozen=True)
class SampledProjection:
    nu: Projection
    good: tuple[int, ...]
    r: int
    attempts: int

    @property
    def t(self) -> int:
        return len(self.good)


def sample_projection(independent: Sequence[int], pairs: dict[int, PathPair], n: int, depth: int, seed: int,
                      retry_cap: int = RETRY_CAP) -> SampledProjection:
    """Draw maps of the non-independent variables into ``[10 d^2]`` until half the independent set is good."""
    r = 10 * depth * depth
    indep = set(independent)
    rest = [i for i in range(n) if i not in indep]
    need = math.ceil(len(indep) / 2)
    for attempt in range(retry_cap):
        images = rng_for(mix(seed, attempt)).integers(0, r, len(rest))
        inner = dict(zip(rest, (int(v) for v in images)))
        good = tuple(i for i in sorted(indep)
                     if len({inner[j] for j in pairs[i].others}) == len(pairs[i].others))
        if len(good) >= need:
            if not good:
                raise DegenerateProjection("no addressed variable survived")
            slot = {i: r + k for k, i in enumerate(good)}
            mapping = [inner[i] if i in inner else slot.get(i, 0) for i in range(n)]
            return SampledProjection(Projection(tuple(mapping), r + len(good)), good, r, attempt + 1)
    raise RuntimeError(f"no projection with {need} good variables after {retry_cap} draws")


def project_tree(tree: DecisionTree, nu: Projection) -> DecisionTree:
    """Relabel queries through ``nu``; a re-query of a fixed target variable follows its value."""
    if len(nu) != tree.arity:
        raise ValueError("projection does not match the tree's arity")

    def walk(node: Tree, fixed: dict[int, int]) -> Tree:
        if isinstance(node, Leaf):
            return node
        u = nu.mapping[node.var]
        if u in fixed:
            return walk(node.hi if fixed[u] else node.lo, fixed)
        return Node(u, walk(node.lo, {**fixed, u: 0}), walk(node.hi, {**fixed, u: 1}))

    return DecisionTree(nu.target_arity, walk(tree.root, {}))


def project_path(path: Path, nu: Projection) -> Path:
    return tuple((nu.mapping[v], b) for v, b in path)


@dataclass(frozen=True)
class PseudoaddressingCertificate:
    """An ``(r, t)`` pseudo-addressing tree together with everything that produced it."""

    source: BooleanFunction
    source_depth: int
    r: int
    t: int
    tree: DecisionTree
    paths: tuple[tuple[Path, Path], ...]   # per addressed variable z_j, the 0- and 1-paths
    nu: Projection
    good: tuple[int, ...]
    independent: tuple[int, ...]
    attempts: int

    def to_json(self) -> dict:
        return {
            "source": {"arity": self.source.arity, "table": self.source.to_hex()},
            "depth": self.source_depth,
            "r": self.r,
            "t": self.t,
            "tree": self.tree.to_json(),
            "paths": [{"z": j, "path0": [list(q) for q in p0], "path1": [list(q) for q in p1]}
                      for j, (p0, p1) in enumerate(self.paths)],
            "nu": list(self.nu.mapping),
            "good": list(self.good),
            "independent": list(self.independent),
            "attempts": self.attempts,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PseudoaddressingCertificate":
        src = BooleanFunction.from_hex(int(data["source"]["arity"]), data["source"]["table"])
        r, t = int(data["r"]), int(data["t"])
        paths = tuple((tuple((int(v), int(b)) for v, b in p["path0"]), tuple((int(v), int(b)) for v, b in p["path1"]))
                      for p in data["paths"])
        return cls(src, int(data["depth"]), r, t, DecisionTree.from_json(data["tree"]), paths,
                   Projection(tuple(data["nu"]), r + t), tuple(data["good"]), tuple(data["independent"]),
                   int(data["attempts"]))


def extract_pseudoaddressing(f: BooleanFunction, seed: int, tree: DecisionTree | None = None,
                             retry_cap: int = RETRY_CAP) -> PseudoaddressingCertificate:
    """Run the whole pipeline; ``tree`` overrides the minimum-depth tree (it is reduced first)."""
    if not is_truly_n_variate(f):
        raise ValueError("function does not depend on every variable")
    base = reduced_tree(tree if tree is not None else min_depth_tree(f))
    if base.arity != f.arity or not np.array_equal(base.to_function().table, f.table):
        raise ValueError("tree does not compute the function")
    d = base.depth
    pairs = path_pairs(base)
    indep = independent_set(pairs, f.arity, d)
    sp = sample_projection(indep, pairs, f.arity, d, seed, retry_cap)
    projected = project_tree(base, sp.nu)
    paths = tuple((project_path(pairs[i].path0, sp.nu), project_path(pairs[i].path1, sp.nu)) for i in sp.good)
    return PseudoaddressingCertificate(f, d, sp.r, sp.t, projected, paths, sp.nu, sp.good, indep, sp.attempts)


# --- verification ----------------------------------------------------------------------------

def _walks_to_leaf(tree: DecisionTree, path: Path, leaf: int) -> bool:
    node = tree.root
    for v, b in path:
        if not isinstance(node, Node) or node.var != v or b not in (0, 1):
            return False
        node = node.hi if b else node.lo
    return isinstance(node, Leaf) and node.value == leaf


def _relabel(node: Tree, to: dict[int, int]) -> Tree:
    if isinstance(node, Leaf):
        return node
    return Node(to[node.var], _relabel(node.lo, to), _relabel(node.hi, to))


def tree_matches_projection(cert: PseudoaddressingCertificate) -> bool:
    """Exhaustive check of the tree against ``project(f, nu)``, on the image of ``nu``.

    Both sides depend only on the image variables, so the comparison runs in
    the compacted space.
    """
    image = sorted(set(cert.nu.mapping) | cert.tree.variables())
    if len(image) > COMPACT_CAP:
        raise ValueError(f"image of {len(image)} variables is too large to check exhaustively")
    pos = {u: k for k, u in enumerate(image)}
    compact_nu = Projection(tuple(pos[u] for u in cert.nu.mapping), len(image))
    compact_tree = DecisionTree(len(image), _relabel(cert.tree.root, pos))
    return bool(np.array_equal(compact_tree.to_function().table, project(cert.source, compact_nu).table))


def check_paths(cert: PseudoaddressingCertificate, j: int) -> bool:
    """Both properties for ``z_j``: diverge at a ``z_j`` node with leaves 0/1; otherwise only equal y-queries."""
    z = cert.r + j
    p0, p1 = cert.paths[j]
    if not (_walks_to_leaf(cert.tree, p0, 0) and _walks_to_leaf(cert.tree, p1, 1)):
        return False
    k = next((i for i, (a, b) in enumerate(zip(p0, p1)) if a != b), None)
    if k is None or p0[k][0] != z or p1[k][0] != z:
        return False
    for v, _ in p0 + p1:
        if v != z and v >= cert.r:
            return False
    vals0, vals1 = dict(p0), dict(p1)
    return all(vals0[v] == vals1[v] for v in vals0.keys() & vals1.keys() if v != z)


def verify_certificate(cert: PseudoaddressingCertificate) -> bool:
    if cert.t != len(cert.paths) or cert.tree.arity != cert.r + cert.t:
        return False
    if not tree_matches_projection(cert):
        return False
    return all(check_paths(cert, j) for j in range(cert.t))


# --- the random function on the addressing variables -------------------------------------

@dataclass(frozen=True)
class RestrictedRandomFunction:
    """The tree with every ``z_j`` fixed to ``b_j``; ``F(points[j]) = b_j xor polarity[j]``."""

    r: int
    tree: DecisionTree
    points: tuple[int, ...]
    assignment: tuple[int, ...]
    polarity: tuple[int, ...]

    def __call__(self, a: int) -> int:
        return self.tree.evaluate(a)

    def values(self) -> tuple[int, ...]:
        return tuple(self.tree.evaluate(a) for a in self.points)


def addressing_points(cert: PseudoaddressingCertificate) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Per ``z_j``: the y-assignment shared by both paths (unqueried y's set to 0) and ``z_j``'s value on the 0-path."""
    points, polarity = [], []
    for j, (p0, _) in enumerate(cert.paths):
        z = cert.r + j
        a = 0
        for v, b in cert.paths[j][0] + cert.paths[j][1]:
            if v != z and b:
                a |= 1 << v
        points.append(a)
        polarity.append(dict(p0)[z])
    if len(set(points)) != len(points):
        raise AssertionError("addressing points are not distinct")
    return tuple(points), tuple(polarity)


def random_restriction_F(cert: PseudoaddressingCertificate, seed: int) -> RestrictedRandomFunction:
    if not all(check_paths(cert, j) for j in range(cert.t)):
        raise ValueError("certificate paths fail verification")
    b = tuple(int(v) for v in rng_for(seed).integers(0, 2, cert.t))
    fixed = {cert.r + j: v for j, v in enumerate(b)}

    def walk(node: Tree) -> Tree:
        if isinstance(node, Leaf):
            return node
        if node.var in fixed:
            return walk(node.hi if fixed[node.var] else node.lo)
        return Node(node.var, walk(node.lo), walk(node.hi))

    points, polarity = addressing_points(cert)
    return RestrictedRandomFunction(cert.r, DecisionTree(cert.r, walk(cert.tree.root)), points, b, polarity)


def example_tree() -> DecisionTree:
    """Depth-4 tree on ``y_0..y_4`` (variables 0-4) and ``z_0..z_4`` (variables 5-9); each ``z`` leaf outputs ``z``."""
    y = range(5)
    z = [5 + k for k in range(5)]

    def out(v: int) -> Node:
        return Node(v, Leaf(0), Leaf(1))

    left = Node(y[1],
                Node(y[2], out(z[0]), Leaf(0)),
                Node(y[2], out(z[1]), out(z[2])))
    right = Node(y[2],
                 Node(y[3], out(z[3]), Leaf(0)),
                 Node(y[4], out(z[4]), Leaf(1)))
    return DecisionTree(10, Node(y[0], left, right))
