"""Contractions on T-graphs with the root-cell loop restriction.

For k >= 1 the domain of the k-th bracket consists of ordered pairs of
parallel k-cells with equal arity; when both cells are root cells (arity a
reflexivity of a bare colour) they must also form a loop, i.e. the 0-source
of the left cell equals the 0-target of the right one.  ``Mode.LEGACY``
drops that clause and reproduces the older, larger domain.
"""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Tuple

from .collection import (
    SOURCE, TARGET, Cell, Provenance, TGraph, Violation, iterated_boundary, parallel,
    validate_tgraph,
)
from .trees import is_root_arity, reflexivity


class Mode(str, enum.Enum):
    CORRECTED = "corrected"
    LEGACY = "legacy"


class ContractionError(ValueError):
    pass


class Entry(NamedTuple):
    k: int
    left: str
    right: str
    cell: str


@dataclass(frozen=True)
class Contraction:
    entries: Tuple[Entry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(sorted(set(self.entries))))
        index = {}
        for e in self.entries:
            key = (e.k, e.left, e.right)
            if key in index and index[key] != e.cell:
                raise ContractionError(f"pair ({e.left},{e.right}) at level {e.k} filled twice")
            index[key] = e.cell
        object.__setattr__(self, "_index", index)

    def get(self, k: int, left: str, right: str) -> Optional[str]:
        return self._index.get((k, left, right))

    def __contains__(self, key) -> bool:
        return key in self._index

    def __len__(self):
        return len(self.entries)

    def level(self, k: int) -> Dict[Tuple[str, str], str]:
        return {(e.left, e.right): e.cell for e in self.entries if e.k == k}

    def extend(self, entries: Iterable[Entry]) -> "Contraction":
        return Contraction(self.entries + tuple(entries))

    def to_json(self) -> list:
        return [e._asdict() for e in self.entries]

    @classmethod
    def from_json(cls, data) -> "Contraction":
        return cls(tuple(Entry(int(d["k"]), str(d["left"]), str(d["right"]), str(d["cell"]))
                         for d in data))


def is_root_cell(x: Cell) -> bool:
    return x.dim >= 1 and is_root_arity(x.arity)


def loop_property(g: TGraph, x: Cell, y: Cell) -> bool:
    """All four iterated 0-boundaries of x and y coincide."""
    if x.dim != y.dim or x.dim < 1:
        raise ContractionError(f"loop property needs two cells of equal dim >= 1, "
                               f"got {x.id}:{x.dim} and {y.id}:{y.dim}")
    n = x.dim
    ends = {iterated_boundary(g, c, side, n).id for c in (x, y) for side in (SOURCE, TARGET)}
    return len(ends) == 1


def loop_clause(g: TGraph, x: Cell, y: Cell) -> bool:
    """The single equation s^k_0(x) = t^k_0(y) used in the domain definition."""
    k = x.dim
    return iterated_boundary(g, x, SOURCE, k).id == iterated_boundary(g, y, TARGET, k).id


def in_domain(g: TGraph, x: Cell, y: Cell, k: int, mode: Mode = Mode.CORRECTED) -> bool:
    if x.dim != k or y.dim != k:
        return False
    if k == 0:
        return x.id == y.id
    if not parallel(x, y) or x.arity != y.arity:
        return False
    if Mode(mode) is Mode.CORRECTED and is_root_cell(x) and is_root_cell(y):
        return loop_clause(g, x, y)
    return True


def contraction_domain(g: TGraph, k: int, mode: Mode = Mode.CORRECTED) -> List[Tuple[str, str]]:
    """The ordered pairs of C~(k), sorted by (left id, right id)."""
    mode = Mode(mode)
    cells = g.cells_of_dim(k)
    if k == 0:
        return [(x.id, x.id) for x in cells]
    groups = defaultdict(list)
    for x in cells:
        groups[(x.src, x.tgt, x.arity)].append(x)
    pairs = []
    for members in groups.values():
        for x in members:
            for y in members:
                if mode is Mode.CORRECTED and is_root_cell(x) and is_root_cell(y) \
                        and not loop_clause(g, x, y):
                    continue
                pairs.append((x.id, y.id))
    return sorted(pairs)


def filler_id(k: int, left: str, right: str) -> str:
    return f"[{left},{right}]_{k}"


def validate_contraction(g: TGraph, c: Contraction, mode: Mode = Mode.CORRECTED) -> List[Violation]:
    out: List[Violation] = []
    for e in c.entries:
        name = filler_id(e.k, e.left, e.right)
        a, b, f = g.get(e.left), g.get(e.right), g.get(e.cell)
        missing = [cid for cid, cell in ((e.left, a), (e.right, b), (e.cell, f)) if cell is None]
        if missing:
            out.append(Violation(name, "unresolved reference", ",".join(missing)))
            continue
        if not in_domain(g, a, b, e.k, mode):
            out.append(Violation(name, "pair not in domain", f"mode {Mode(mode).value}"))
        if f.dim != e.k + 1:
            out.append(Violation(e.cell, "dim axiom", f"{f.dim} != {e.k + 1}"))
        if f.src != a.id:
            out.append(Violation(e.cell, "s axiom", f"src {f.src} != {a.id}"))
        if f.tgt != b.id:
            out.append(Violation(e.cell, "t axiom", f"tgt {f.tgt} != {b.id}"))
        if a.arity.dim <= e.k + 1 and f.arity != reflexivity(a.arity, e.k + 1):
            out.append(Violation(e.cell, "d axiom", f"{f.arity} vs {a.arity}"))
        if f.out != a.out:
            out.append(Violation(e.cell, "c axiom"))
    return sorted(set(out))


def uncovered_pairs(g: TGraph, c: Contraction, max_dim: int, mode: Mode = Mode.CORRECTED,
                    among: Optional[set] = None) -> List[Tuple[int, str, str]]:
    gaps = []
    for k in range(max_dim):
        for left, right in contraction_domain(g, k, mode):
            if among is not None and (left not in among or right not in among):
                continue
            if (k, left, right) not in c:
                gaps.append((k, left, right))
    return gaps


def is_contractible(g: TGraph, c: Contraction, max_dim: int, mode: Mode = Mode.CORRECTED,
                    among: Optional[set] = None) -> List[Violation]:
    """Report every pair of C~(k), k < max_dim, that has no filler.

    ``among`` restricts the check to pairs of the given cell ids.
    """
    return [Violation(filler_id(k, left, right), "uncovered pair", f"k={k}")
            for k, left, right in uncovered_pairs(g, c, max_dim, mode, among)]


def adjoin_contractions(g: TGraph, c: Contraction, max_dim: int,
                        mode: Mode = Mode.CORRECTED, stage: Optional[int] = None
                        ) -> Tuple[TGraph, Contraction]:
    """One stage of the free contraction: fill every open pair of ``g``."""
    problems = validate_tgraph(g)
    if problems:
        raise ContractionError(f"invalid input graph: {problems[0]}")
    b = g.builder()
    new = []
    for k, left, right in uncovered_pairs(g, c, max_dim, mode):
        a = g[left]
        cid = filler_id(k, left, right)
        if cid in b:
            raise ContractionError(f"filler id {cid} already taken")
        b.cell(cid, reflexivity(a.arity, k + 1), a.out, left, right,
               Provenance("filler", left=left, right=right, k=k, stage=stage))
        new.append(Entry(k, left, right, cid))
    return b.build(), c.extend(new)
