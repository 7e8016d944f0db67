"""Batanin trees and the free strict omega-category monad over a constant colour set.

A tree is a tuple of child trees; the leaf is the empty tuple.  A tree of
height at most ``n`` is the shape of an ``n``-dimensional pasting diagram.
Over a constant globular set every labelling of a pasting scheme is constant,
so a cell of ``T(G)`` is just ``(tree, colour, dim)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Mapping, NamedTuple, Tuple

Tree = Tuple["Tree", ...]

LEAF: Tree = ()


class TreeError(ValueError):
    """Raised for ill-formed tree operations (boundary mismatch, bad labels...)."""


def height(t: Tree) -> int:
    if not t:
        return 0
    return 1 + max(height(c) for c in t)


def size(t: Tree) -> int:
    """Number of nodes, root included."""
    return 1 + sum(size(c) for c in t)


def linear(n: int) -> Tree:
    """The linear tree U_n of height n: the shape of an identity n-cell."""
    t = LEAF
    for _ in range(n):
        t = (t,)
    return t


def prune(t: Tree, n: int) -> Tree:
    if n <= 0:
        return LEAF
    return tuple(prune(c, n - 1) for c in t)


def compose(t: Tree, u: Tree, p: int) -> Tree:
    """p-composite of two pasting shapes sharing their p-boundary."""
    if prune(t, p) != prune(u, p):
        raise TreeError(f"boundary mismatch composing {to_json(t)} and {to_json(u)} along {p}")
    if p == 0:
        return t + u
    return tuple(compose(a, b, p - 1) for a, b in zip(t, u))


def comp_shape(n: int, p: int) -> Tree:
    """D(n, p): two n-globes glued along a common p-cell."""
    if not 0 <= p < n:
        raise TreeError(f"comp_shape needs 0 <= p < n, got n={n} p={p}")
    arm = linear(n - p - 1)
    t: Tree = (arm, arm)
    for _ in range(p):
        t = (t,)
    return t


def subtree(t: Tree, path: Iterable[int]) -> Tree:
    for i in path:
        t = t[i]
    return t


def to_json(t: Tree) -> list:
    return [to_json(c) for c in t]


def from_json(data) -> Tree:
    if not isinstance(data, list):
        raise TreeError(f"tree must be a nested list, got {data!r}")
    return tuple(from_json(c) for c in data)


# -- cells of T(G) ----------------------------------------------------------


@dataclass(frozen=True, order=True)
class TreeCell:
    tree: Tree
    colour: str
    dim: int

    def __post_init__(self):
        if self.dim < 0:
            raise TreeError(f"negative dimension {self.dim}")
        if height(self.tree) > self.dim:
            raise TreeError(
                f"tree {to_json(self.tree)} of height {height(self.tree)} "
                f"does not fit in dimension {self.dim}")

    def to_json(self) -> dict:
        return {"tree": to_json(self.tree), "colour": self.colour, "dim": self.dim}

    @classmethod
    def from_json(cls, data) -> "TreeCell":
        return cls(from_json(data["tree"]), str(data["colour"]), int(data["dim"]))

    def __str__(self):
        return f"({_compact(self.tree)}, {self.colour}, {self.dim})"


def _compact(t: Tree) -> str:
    if not t:
        return "•"
    return "[" + ",".join(_compact(c) for c in t) + "]"


def boundary(tc: TreeCell) -> TreeCell:
    """Source (= target) of a T(G)-cell."""
    if tc.dim == 0:
        raise TreeError("a 0-cell has no boundary")
    return TreeCell(prune(tc.tree, tc.dim - 1), tc.colour, tc.dim - 1)


def reflexivity(tc: TreeCell, m: int) -> TreeCell:
    if m < tc.dim:
        raise TreeError(f"cannot raise a {tc.dim}-cell to dimension {m}")
    return TreeCell(tc.tree, tc.colour, m)


def is_root_arity(tc: TreeCell) -> bool:
    """True for the iterated reflexivities 1^0_n(g(0)) with n >= 1."""
    return tc.tree == LEAF and tc.dim >= 1


# -- positions of the pasting scheme ------------------------------------------


class Position(NamedTuple):
    """A cell of a pasting scheme.

    ``path`` holds the block indices leading to a node followed by a gap
    index at that node; its length is ``dim + 1``.
    """

    path: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.path) - 1

    def __str__(self):
        return ".".join(map(str, self.path))

    @classmethod
    def parse(cls, text: str) -> "Position":
        try:
            return cls(tuple(int(p) for p in text.split(".")))
        except ValueError:
            raise TreeError(f"bad position {text!r}") from None


@lru_cache(maxsize=4096)
def positions(t: Tree, p: int) -> Tuple[Position, ...]:
    """All p-positions of ``t`` in block-major order."""
    if p < 0:
        return ()
    if p == 0:
        return tuple(Position((j,)) for j in range(len(t) + 1))
    return tuple(Position((i,) + q.path) for i, c in enumerate(t) for q in positions(c, p - 1))


@lru_cache(maxsize=4096)
def all_positions(t: Tree, max_dim: int) -> Tuple[Position, ...]:
    out: List[Position] = []
    for p in range(max_dim + 1):
        out.extend(positions(t, p))
    return tuple(out)


def position_source(pos: Position) -> Position:
    if pos.dim == 0:
        raise TreeError(f"0-position {pos} has no source")
    return Position(pos.path[:-1])


def position_target(pos: Position) -> Position:
    if pos.dim == 0:
        raise TreeError(f"0-position {pos} has no target")
    *head, last = pos.path[:-1]
    return Position(tuple(head) + (last + 1,))


def is_position(t: Tree, pos: Position) -> bool:
    node = t
    for i in pos.path[:-1]:
        if not 0 <= i < len(node):
            return False
        node = node[i]
    return 0 <= pos.path[-1] <= len(node)


@lru_cache(maxsize=4096)
def maximal_positions(t: Tree) -> Tuple[Position, ...]:
    """Positions that bound nothing: one per leaf, in depth-first leaf order."""
    out: List[Position] = []

    def walk(node, path):
        if not node:
            out.append(Position(path + (0,)))
        for i, c in enumerate(node):
            walk(c, path + (i,))

    walk(t, ())
    return tuple(out)


def cofaces(t: Tree, pos: Position) -> Iterator[Tuple[Position, str]]:
    """Positions one dimension up having ``pos`` as source or target."""
    *node_path, j = pos.path
    node = subtree(t, node_path)
    if j < len(node):
        for q in range(len(node[j]) + 1):
            yield Position(pos.path + (q,)), "source"
    if j >= 1:
        for q in range(len(node[j - 1]) + 1):
            yield Position(tuple(node_path) + (j - 1, q)), "target"


def boundary_embedding(t: Tree, n: int, side: str) -> Dict[Position, Position]:
    """Inclusion of the positions of ``prune(t, n-1)`` into those of ``t``.

    The (n-1)-positions of the pruned tree sit at former depth-(n-1) nodes;
    the source side picks their leftmost gap, the target side the rightmost.
    """
    b = prune(t, n - 1)
    emb = {}
    for pos in all_positions(b, n - 1):
        if pos.dim < n - 1:
            emb[pos] = pos
        else:
            node = subtree(t, pos.path[:-1])
            gap = 0 if side == "source" else len(node)
            emb[pos] = Position(pos.path[:-1] + (gap,))
    return emb


# -- substitution: the multiplication of T --------------------------------------


Embedding = Dict[Tuple[Position, Position], Position]


def _sub(t: Tree, labels: Mapping[Position, Tree]) -> Tuple[Tree, Embedding]:
    # labels: every position of t -> label tree; all dims implicit in the paths
    blocks: List[Tree] = []
    emb: Embedding = {}
    offset = 0
    for i, child in enumerate(t):
        block_pos = [q for q in labels if q.path[0] == i and q.dim >= 1]
        chain = labels[Position((i, 0))]
        width = len(chain)
        comps = []
        for r in range(width):
            local = {Position(q.path[1:]): labels[q][r] for q in block_pos}
            u, sub_emb = _sub(child, local)
            comps.append(u)
            for (inner, rho), target in sub_emb.items():
                emb[(Position((i,) + inner.path), Position((r,) + rho.path))] = \
                    Position((offset + r,) + target.path)
        for q in block_pos:
            for j in range(width + 1):
                emb[(q, Position((j,)))] = Position((offset + j,))
        blocks.extend(comps)
        emb[(Position((i,)), Position((0,)))] = Position((offset,))
        offset += width
    emb[(Position((len(t),)), Position((0,)))] = Position((offset,))
    return tuple(blocks), emb


def _check_labels(base: TreeCell, labels: Mapping[Position, TreeCell]) -> None:
    expected = set(all_positions(base.tree, base.dim))
    for pos in expected:
        if pos not in labels:
            raise TreeError(f"missing label at position {pos}")
    for pos, lab in labels.items():
        if pos not in expected:
            raise TreeError(f"label at {pos} which is not a position of {_compact(base.tree)}")
        if lab.dim != pos.dim:
            raise TreeError(f"label at {pos} has dim {lab.dim}, expected {pos.dim}")
        if lab.colour != base.colour:
            raise TreeError(f"colour mismatch at {pos}: {lab.colour} != {base.colour}")
        if pos.dim >= 1:
            b = boundary(lab)
            for face in (position_source(pos), position_target(pos)):
                if labels[face] != b:
                    raise TreeError(
                        f"incoherent boundaries: label {lab} at {pos} vs {labels[face]} at {face}")


def substitute_with_embedding(base: TreeCell, labels: Mapping[Position, TreeCell]
                              ) -> Tuple[TreeCell, Embedding]:
    """Paste a labelled pasting diagram.

    Returns the composite together with the map sending ``(pi, rho)`` -- a
    position ``rho`` of the label at ``pi`` -- to the position of the result
    it lands on.
    """
    _check_labels(base, labels)
    tree, emb = _sub(base.tree, {pos: lab.tree for pos, lab in labels.items()})
    return TreeCell(tree, base.colour, base.dim), emb


def substitute(base: TreeCell, labels: Mapping[Position, TreeCell]) -> TreeCell:
    return substitute_with_embedding(base, labels)[0]


def unit_labels(base: TreeCell) -> Dict[Position, TreeCell]:
    """Label every p-position by the identity shape U_p."""
    return {pos: TreeCell(linear(pos.dim), base.colour, pos.dim)
            for pos in all_positions(base.tree, base.dim)}


def comp_shape_labels(t: TreeCell, u: TreeCell, p: int) -> Dict[Position, TreeCell]:
    """Labels of D(n, p) placing ``t`` on the left globe and ``u`` on the right."""
    n = t.dim
    labels = {}
    for pos in all_positions(comp_shape(n, p), n):
        src = u if pos.dim > p and pos.path[p] == 1 else t
        labels[pos] = TreeCell(prune(src.tree, pos.dim), t.colour, pos.dim)
    return labels


# -- enumeration ----------------------------------------------------------------


@lru_cache(maxsize=None)
def _forests(max_height: int, nodes: int) -> Tuple[Tuple[Tree, ...], ...]:
    # ordered forests with exactly ``nodes`` nodes, every tree of height <= max_height
    if nodes == 0:
        return ((),)
    out = []
    for first in range(1, nodes + 1):
        for t in _trees_exact(max_height, first):
            for rest in _forests(max_height, nodes - first):
                out.append((t,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _trees_exact(max_height: int, nodes: int) -> Tuple[Tree, ...]:
    if nodes == 1:
        return (LEAF,)
    if max_height == 0:
        return ()
    return _forests(max_height - 1, nodes - 1)


def enumerate_trees(max_height: int, max_nodes: int) -> List[Tree]:
    """All planar trees within the bounds, ordered by node count then structure."""
    out: List[Tree] = []
    for n in range(1, max_nodes + 1):
        out.extend(_trees_exact(max_height, n))
    return out
