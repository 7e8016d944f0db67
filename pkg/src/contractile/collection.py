"""Coloured T-graphs (C, d, c) over a constant colour set, with pointing.

Cells carry explicit source/target ids; the arity ``d(x)`` is a TreeCell and
the output colour ``c(x)`` a colour id.  Graphs are immutable once built;
:class:`TGraphBuilder` is the single-writer way to make them.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple

from .trees import TreeCell, boundary, linear

SOURCE = "source"
TARGET = "target"


class GraphError(ValueError):
    pass


class Violation(NamedTuple):
    entity: str
    law: str
    detail: str = ""

    def __str__(self):
        return f"{self.entity}: {self.law}" + (f" ({self.detail})" if self.detail else "")


@dataclass(frozen=True)
class Provenance:
    """Where a cell came from.

    ``kind`` is one of generator, unit, composite, filler, contraction-witness.
    Composites keep their normal-form term; fillers keep the pair they fill.
    """

    kind: str = "generator"
    term: Any = None
    left: Optional[str] = None
    right: Optional[str] = None
    k: Optional[int] = None
    stage: Optional[int] = None

    def without_stage(self) -> "Provenance":
        return replace(self, stage=None)


KINDS = ("generator", "unit", "composite", "filler", "contraction-witness")


@dataclass(frozen=True)
class Cell:
    id: str
    dim: int
    src: Optional[str]
    tgt: Optional[str]
    arity: TreeCell
    out: str
    provenance: Provenance = field(default_factory=Provenance)

    def sort_key(self):
        return (self.dim, self.id)

    def structure(self):
        """Everything but the creating stage; used to compare runs cell-for-cell."""
        return (self.id, self.dim, self.src, self.tgt, self.arity, self.out,
                self.provenance.without_stage())


def unit_arity(colour: str, n: int) -> TreeCell:
    return TreeCell(linear(n), colour, n)


class TGraph:
    """An immutable pointed T-graph over a constant colour set."""

    def __init__(self, colours: Iterable[str], cells: Iterable[Cell],
                 pointing: Optional[Mapping[Tuple[str, int], str]] = None):
        self.colours: Tuple[str, ...] = tuple(sorted(set(colours)))
        ordered = sorted(cells, key=Cell.sort_key)
        self.cells: Tuple[Cell, ...] = tuple(ordered)
        self._index: Dict[str, Cell] = {}
        self.duplicates: List[str] = []
        for c in ordered:
            if c.id in self._index:
                self.duplicates.append(c.id)
            self._index[c.id] = c
        self.pointing: Optional[Dict[Tuple[str, int], str]] = (
            None if pointing is None else dict(sorted(pointing.items())))
        self._units = frozenset(self.pointing.values()) if self.pointing else frozenset()

    def __contains__(self, cid: str) -> bool:
        return cid in self._index

    def __getitem__(self, cid: str) -> Cell:
        try:
            return self._index[cid]
        except KeyError:
            raise GraphError(f"unknown cell {cid!r}") from None

    def __len__(self):
        return len(self.cells)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells)

    def __eq__(self, other):
        if not isinstance(other, TGraph):
            return NotImplemented
        return (self.colours, self.cells, self.pointing) == (other.colours, other.cells, other.pointing)

    def __repr__(self):
        return f"TGraph(colours={list(self.colours)}, cells={len(self.cells)})"

    def get(self, cid: str) -> Optional[Cell]:
        return self._index.get(cid)

    def cells_of_dim(self, n: int) -> List[Cell]:
        return [c for c in self.cells if c.dim == n]

    @property
    def max_dim(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    @property
    def is_pointed(self) -> bool:
        return self.pointing is not None

    def unit(self, colour: str, n: int) -> Optional[str]:
        if self.pointing is None:
            return None
        return self.pointing.get((colour, n))

    def is_unit(self, cid: str) -> bool:
        return cid in self._units

    def builder(self) -> "TGraphBuilder":
        b = TGraphBuilder(self.colours, pointed=self.pointing is not None)
        for c in self.cells:
            b.add(c)
        if self.pointing:
            b.pointing.update(self.pointing)
        return b


class TGraphBuilder:
    """Mutable accumulator for a TGraph."""

    def __init__(self, colours: Iterable[str], pointed: bool = True):
        self.colours = list(colours)
        self.cells: Dict[str, Cell] = {}
        self.pointing: Optional[Dict[Tuple[str, int], str]] = {} if pointed else None

    def __contains__(self, cid):
        return cid in self.cells

    def add(self, cell: Cell) -> Cell:
        if cell.id in self.cells:
            raise GraphError(f"duplicate cell id {cell.id!r}")
        self.cells[cell.id] = cell
        return cell

    def cell(self, cid: str, arity: TreeCell, out: str, src: Optional[str] = None,
             tgt: Optional[str] = None, provenance: Optional[Provenance] = None) -> Cell:
        return self.add(Cell(cid, arity.dim, src, tgt, arity, out, provenance or Provenance()))

    def add_units(self, colour: str, max_dim: int, stage: Optional[int] = None) -> None:
        """Add the unit cells iota_g(n) for n <= max_dim and point them."""
        if self.pointing is None:
            self.pointing = {}
        prev = None
        for n in range(max_dim + 1):
            cid = f"iota[{colour},{n}]"
            if cid not in self.cells:
                self.cell(cid, unit_arity(colour, n), colour, prev, prev,
                          Provenance("unit", stage=stage))
            self.pointing[(colour, n)] = cid
            prev = cid

    def build(self) -> TGraph:
        return TGraph(self.colours, self.cells.values(), self.pointing)


# -- queries --------------------------------------------------------------------


def iterated_boundary(g: TGraph, x: Cell, side: str, q: int) -> Cell:
    """Apply src (or tgt) ``q`` times; ``q = x.dim`` gives s^n_0 / t^n_0."""
    if q > x.dim:
        raise GraphError(f"cannot take a {q}-fold boundary of the {x.dim}-cell {x.id}")
    for _ in range(q):
        x = g[x.src if side == SOURCE else x.tgt]
    return x


def parallel(x: Cell, y: Cell) -> bool:
    if x.dim != y.dim:
        return False
    return x.dim == 0 or (x.src == y.src and x.tgt == y.tgt)


# -- validation -----------------------------------------------------------------


def validate_tgraph(g: TGraph) -> List[Violation]:
    out: List[Violation] = []
    for cid in g.duplicates:
        out.append(Violation(cid, "duplicate id"))
    colours = set(g.colours)
    if not colours:
        out.append(Violation("<graph>", "empty colour set"))
    for x in g.cells:
        if x.arity.dim != x.dim:
            out.append(Violation(x.id, "arity dimension", f"{x.arity.dim} != {x.dim}"))
        if x.arity.colour not in colours:
            out.append(Violation(x.id, "unknown colour", x.arity.colour))
        if x.out not in colours:
            out.append(Violation(x.id, "unknown colour", x.out))
        if x.provenance.kind not in KINDS:
            out.append(Violation(x.id, "unknown provenance", x.provenance.kind))
        if x.dim == 0:
            if x.src is not None or x.tgt is not None:
                out.append(Violation(x.id, "0-cell with boundary"))
            continue
        faces = []
        for ref in (x.src, x.tgt):
            f = g.get(ref) if ref is not None else None
            if f is None:
                out.append(Violation(x.id, "unresolved reference", str(ref)))
            elif f.dim != x.dim - 1:
                out.append(Violation(x.id, "boundary dimension", f"{ref} has dim {f.dim}"))
            else:
                faces.append(f)
        if len(faces) != 2:
            continue
        s, t = faces
        if x.dim >= 2 and (s.src != t.src or s.tgt != t.tgt):
            out.append(Violation(x.id, "not globular", "src/tgt of boundaries disagree"))
        if x.arity.dim == x.dim and x.dim >= 1:
            b = boundary(x.arity)
            if s.arity != b or t.arity != b:
                out.append(Violation(x.id, "d not globular",
                                     f"boundary arity {b} vs {s.arity} / {t.arity}"))
        if s.out != x.out or t.out != x.out:
            out.append(Violation(x.id, "c not globular"))
    out.extend(_validate_pointing(g))
    return sorted(set(out))


def _validate_pointing(g: TGraph) -> List[Violation]:
    out = []
    if not g.pointing:
        return out
    for (colour, n), cid in g.pointing.items():
        name = f"pointing {colour}:{n}"
        if colour not in g.colours:
            out.append(Violation(name, "unknown colour", colour))
        x = g.get(cid)
        if x is None:
            out.append(Violation(name, "unresolved reference", cid))
            continue
        if x.dim != n:
            out.append(Violation(cid, "unit dimension", f"{x.dim} != {n}"))
            continue
        if x.arity != unit_arity(colour, n):
            out.append(Violation(cid, "unit arity must be linear", str(x.arity)))
        if x.out != colour:
            out.append(Violation(cid, "unit colour", x.out))
        if n >= 1:
            below = g.pointing.get((colour, n - 1))
            if below is None:
                out.append(Violation(name, "pointing not downward closed"))
            elif x.src != below or x.tgt != below:
                out.append(Violation(cid, "unit boundary", f"expected {below}"))
    return out


# -- morphisms --------------------------------------------------------------------


@dataclass
class TGraphMorphism:
    source: TGraph
    target: TGraph
    cell_map: Dict[str, str]
    colour_map: Optional[Dict[str, str]] = None
    source_contraction: Any = None
    target_contraction: Any = None

    def colour(self, c: str) -> str:
        return self.colour_map.get(c, c) if self.colour_map else c

    def then(self, other: "TGraphMorphism") -> "TGraphMorphism":
        """Composite ``other . self``."""
        colours = None
        if self.colour_map or other.colour_map:
            colours = {c: other.colour(self.colour(c)) for c in self.source.colours}
        return TGraphMorphism(
            self.source, other.target,
            {k: other.cell_map.get(v, v) for k, v in self.cell_map.items()},
            colours, self.source_contraction, other.target_contraction)


def identity_morphism(g: TGraph, contraction=None) -> TGraphMorphism:
    return TGraphMorphism(g, g, {c.id: c.id for c in g.cells},
                          source_contraction=contraction, target_contraction=contraction)


def validate_morphism(m: TGraphMorphism) -> List[Violation]:
    out: List[Violation] = []
    src, tgt = m.source, m.target
    for x in src.cells:
        if x.id not in m.cell_map:
            out.append(Violation(x.id, "unmapped cell"))
            continue
        y = tgt.get(m.cell_map[x.id])
        if y is None:
            out.append(Violation(x.id, "unresolved reference", m.cell_map[x.id]))
            continue
        if y.dim != x.dim:
            out.append(Violation(x.id, "dimension not preserved"))
            continue
        if x.dim >= 1:
            if m.cell_map.get(x.src) != y.src:
                out.append(Violation(x.id, "src not preserved"))
            if m.cell_map.get(x.tgt) != y.tgt:
                out.append(Violation(x.id, "tgt not preserved"))
        image = TreeCell(x.arity.tree, m.colour(x.arity.colour), x.arity.dim)
        if image != y.arity:
            out.append(Violation(x.id, "d not preserved", f"{image} != {y.arity}"))
        if m.colour(x.out) != y.out:
            out.append(Violation(x.id, "c not preserved"))
    if src.pointing:
        for (colour, n), cid in src.pointing.items():
            want = tgt.unit(m.colour(colour), n)
            if want is None or m.cell_map.get(cid) != want:
                out.append(Violation(cid, "pointing not preserved"))
    if m.source_contraction is not None:
        theirs = m.target_contraction
        for e in m.source_contraction.entries:
            l, r, c = (m.cell_map.get(e.left), m.cell_map.get(e.right), m.cell_map.get(e.cell))
            if theirs is None or theirs.get(e.k, l, r) != c:
                out.append(Violation(e.cell, "contraction not preserved",
                                     f"[{e.left},{e.right}]_{e.k}"))
    return sorted(set(out))
