"""Labelled rooted trees and vertex permutations.

A tree is stored as a sorted tuple of (vertex, parent) pairs with parent 0
marking the root.  Vertex labels are positive integers and need not be
contiguous, so grafting constructions with shifted labels stay first-class;
operations that need the vertex set {1..n} say so.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

from .errors import MismatchError, PreconditionError, SizeLimitError

ROOT = 0

# n^(n-1) growth; 8^7 = 2,097,152 trees is the most we ever want in memory.
MAX_ENUM_VERTICES = 8


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..n}, stored as the tuple of images of 1, 2, ..., n."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise PreconditionError(f"not a bijection of 1..{len(self.images)}: {self.images!r}")

    @staticmethod
    def identity(n: int) -> Permutation:
        return Permutation(tuple(range(1, n + 1)))

    @staticmethod
    def from_cycles(n: int, *cycles) -> Permutation:
        """Permutation of [n] from disjoint cycles, e.g. from_cycles(5, (1,2), (3,4))."""
        images = list(range(1, n + 1))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a - 1] = b
        return Permutation(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, v: int) -> int:
        return self.images[v - 1]

    def compose(self, other: Permutation) -> Permutation:
        """self after other: compose(self, other)(v) = self(other(v))."""
        if self.degree != other.degree:
            raise MismatchError("permutation degree mismatch")
        return Permutation(tuple(self.images[w - 1] for w in other.images))

    def inverse(self) -> Permutation:
        out = [0] * self.degree
        for v, w in enumerate(self.images, start=1):
            out[w - 1] = v
        return Permutation(tuple(out))

    def cycle_type(self) -> tuple[int, ...]:
        """Cycle lengths including fixed points, longest first."""
        seen = set()
        lengths = []
        for v in range(1, self.degree + 1):
            if v in seen:
                continue
            length = 0
            w = v
            while w not in seen:
                seen.add(w)
                w = self(w)
                length += 1
            lengths.append(length)
        return tuple(sorted(lengths, reverse=True))

    def sign(self) -> int:
        return -1 if (self.degree - len(self.cycle_type())) % 2 else 1

    def fixed_points(self) -> int:
        return sum(1 for v in range(1, self.degree + 1) if self(v) == v)


def all_permutations(n: int) -> list[Permutation]:
    if n > MAX_ENUM_VERTICES:
        raise SizeLimitError(f"refusing to enumerate S_{n}")
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]


@dataclass(frozen=True)
class Tree:
    """Rooted tree as sorted (vertex, parent) pairs; the root's parent is 0."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        vs = [v for v, _ in self.entries]
        if not vs:
            raise PreconditionError("tree needs at least one vertex")
        if list(self.entries) != sorted(self.entries) or len(set(vs)) != len(vs):
            raise PreconditionError("entries must be sorted with unique vertices")
        if vs[0] <= 0:
            raise PreconditionError("vertex labels must be positive")
        vset = set(vs)
        pmap = dict(self.entries)
        roots = [v for v, p in self.entries if p == ROOT]
        if len(roots) != 1:
            raise PreconditionError(f"need exactly one root, got {len(roots)}")
        for v, p in self.entries:
            if p != ROOT and p not in vset:
                raise PreconditionError(f"parent {p} of vertex {v} is not a vertex")
        for v in vs:
            seen = set()
            w = v
            while pmap[w] != ROOT:
                if w in seen:
                    raise PreconditionError("parent map has a cycle")
                seen.add(w)
                w = pmap[w]

    @staticmethod
    def from_parent_map(pmap: dict) -> Tree:
        return Tree(tuple(sorted(pmap.items())))

    @staticmethod
    def from_parents(parents) -> Tree:
        """parents[i] is the parent of vertex i+1; 0 marks the root."""
        return Tree(tuple((i + 1, p) for i, p in enumerate(parents)))

    @cached_property
    def parent_map(self) -> dict:
        return dict(self.entries)

    @cached_property
    def vertices(self) -> tuple[int, ...]:
        return tuple(v for v, _ in self.entries)

    @cached_property
    def root(self) -> int:
        return next(v for v, p in self.entries if p == ROOT)

    @cached_property
    def children_map(self) -> dict:
        cm = {v: [] for v in self.vertices}
        for v, p in self.entries:
            if p != ROOT:
                cm[p].append(v)
        return {v: tuple(sorted(ws)) for v, ws in cm.items()}

    def children(self, v: int) -> tuple[int, ...]:
        return self.children_map[v]

    @property
    def size(self) -> int:
        return len(self.entries)

    def is_contiguous(self) -> bool:
        return self.vertices == tuple(range(1, self.size + 1))

    def parent_list(self) -> list[int]:
        """[parent of 1, parent of 2, ...]; vertex set must be {1..n}."""
        if not self.is_contiguous():
            raise PreconditionError("parent_list needs vertex set {1..n}")
        return [p for _, p in self.entries]

    def edges(self) -> tuple[tuple[int, int], ...]:
        """(parent, child) pairs, sorted."""
        return tuple(sorted((p, v) for v, p in self.entries if p != ROOT))

    def to_json_dict(self) -> dict:
        return {"n": self.size, "parent": self.parent_list()}


def enumerate_trees(n: int) -> list[Tree]:
    """All rooted trees on vertex set {1..n}; there are n^(n-1) of them."""
    if n < 1:
        raise PreconditionError("need n >= 1")
    if n > MAX_ENUM_VERTICES:
        raise SizeLimitError(f"n={n} exceeds the enumeration guard ({MAX_ENUM_VERTICES})")
    verts = list(range(1, n + 1))
    out = []
    for root in verts:
        others = [v for v in verts if v != root]
        for parents in itertools.product(verts, repeat=n - 1):
            pmap = dict(zip(others, parents))
            pmap[root] = ROOT
            # a parent assignment is a tree iff every vertex walks down to the root
            ok = True
            for v in others:
                seen = set()
                w = v
                while pmap[w] != ROOT:
                    if w in seen:
                        ok = False
                        break
                    seen.add(w)
                    w = pmap[w]
                if not ok:
                    break
            if ok:
                out.append(Tree.from_parent_map(pmap))
    return out


def relabel(tree: Tree, sigma: Permutation) -> Tree:
    """Rename every vertex v to sigma(v), parents and root included."""
    if any(v > sigma.degree for v in tree.vertices):
        raise MismatchError("permutation degree below a vertex label")
    return Tree(tuple(sorted(
        (sigma(v), ROOT if p == ROOT else sigma(p)) for v, p in tree.entries
    )))


@dataclass(frozen=True)
class RetargetResult:
    """Outcome of moving edge targets through a permutation.

    The move can break treeness (the rewired edges may close a cycle), so the
    raw graph is always reported and `tree` is only set when it survived.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    root: int
    is_tree: bool
    tree: Tree | None


def retarget_edges(edges, sigma: Permutation) -> tuple[tuple[int, int], ...]:
    """Send each (source, target) edge to (source, sigma(target))."""
    return tuple(sorted((a, sigma(b)) for a, b in edges))


def retarget(tree: Tree, sigma: Permutation) -> RetargetResult:
    """Move every edge's child endpoint through sigma, keeping sources fixed.

    Every vertex except sigma(root) ends up with exactly one incoming parent
    edge, so the only possible failure is a cycle.
    """
    if not tree.is_contiguous() or sigma.degree != tree.size:
        raise MismatchError("retarget needs vertex set {1..n} and a matching permutation")
    new_edges = retarget_edges(tree.edges(), sigma)
    new_root = sigma(tree.root)
    pmap = {sigma(v): p for v, p in tree.entries if p != ROOT}
    pmap[new_root] = ROOT
    is_tree = True
    for v in tree.vertices:
        seen = set()
        w = v
        while pmap[w] != ROOT:
            if w in seen:
                is_tree = False
                break
            seen.add(w)
            w = pmap[w]
        if not is_tree:
            break
    return RetargetResult(
        vertices=tree.vertices,
        edges=new_edges,
        root=new_root,
        is_tree=is_tree,
        tree=Tree.from_parent_map(pmap) if is_tree else None,
    )


def find_sigma(src: Tree, dst: Tree) -> Permutation:
    """The permutation retargeting src onto dst, children matched in ascending order.

    Requires the two trees to have the same arity at every vertex (same
    multi-index); anything else cannot be connected by retargeting.
    """
    if not src.is_contiguous() or not dst.is_contiguous() or src.size != dst.size:
        raise MismatchError("find_sigma needs two trees on the same vertex set {1..n}")
    images = {}
    for v in src.vertices:
        cs, cd = src.children(v), dst.children(v)
        if len(cs) != len(cd):
            raise PreconditionError(f"arity mismatch at vertex {v}: {len(cs)} vs {len(cd)}")
        for a, b in zip(cs, cd):
            images[a] = b
    images[src.root] = dst.root
    return Permutation(tuple(images[v] for v in range(1, src.size + 1)))


def bplus(root: int, parts) -> Tree:
    """New root vertex adopting the given trees' roots as its children."""
    if root <= 0:
        raise PreconditionError("root label must be positive")
    entries = [(root, ROOT)]
    seen = {root}
    for part in parts:
        overlap = seen.intersection(part.vertices)
        if overlap:
            raise MismatchError(f"vertex labels shared: {sorted(overlap)}")
        seen.update(part.vertices)
        for v, p in part.entries:
            entries.append((v, root if p == ROOT else p))
    return Tree(tuple(sorted(entries)))


def subtree_above(tree: Tree, v: int) -> Tree:
    """The subtree rooted at v, keeping original labels."""
    keep = set()
    stack = [v]
    while stack:
        w = stack.pop()
        keep.add(w)
        stack.extend(tree.children(w))
    return Tree(tuple(sorted(
        (w, ROOT if w == v else p) for w, p in tree.entries if w in keep
    )))


def graft_sum(scion: Tree, stock: Tree) -> list[Tree]:
    """All single-edge attachments of scion's root below a vertex of stock."""
    if set(scion.vertices) & set(stock.vertices):
        raise MismatchError("vertex labels shared between the two trees")
    out = []
    for v in stock.vertices:
        entries = list(stock.entries)
        for w, p in scion.entries:
            entries.append((w, v if p == ROOT else p))
        out.append(Tree(tuple(sorted(entries))))
    return out


def canonical_code(tree: Tree) -> str:
    """Label-independent shape code: child codes sorted and parenthesised."""
    def code(v):
        return "(" + "".join(sorted(code(w) for w in tree.children(v))) + ")"
    return code(tree.root)


def chain_tree(order) -> Tree:
    """Single descending path: order[0] is the root, each entry parents the next."""
    order = list(order)
    if not order or len(set(order)) != len(order):
        raise PreconditionError("order must be nonempty distinct labels")
    entries = [(order[0], ROOT)]
    for a, b in zip(order, order[1:]):
        entries.append((b, a))
    return Tree(tuple(sorted(entries)))


def is_linear(tree: Tree) -> bool:
    return all(len(tree.children(v)) <= 1 for v in tree.vertices)
