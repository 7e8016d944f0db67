"""Formal composites in the free T-category on a pointed T-graph.

A term grafts argument terms onto the maximal positions (the leaves) of its
head's arity tree; lower positions are the boundaries of the arguments and
are never stored.  A missing argument stands for the unit of the right
dimension.  Normal forms have basic heads (neither unit nor composite cell),
normal non-unit arguments, and no composite cell names inside: composite
cells are expanded back into the terms they name.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

from .collection import (
    Cell, GraphError, Provenance, TGraph, TGraphBuilder, Violation, validate_tgraph,
)
from .trees import (
    Embedding, Position, TreeCell, all_positions, boundary, boundary_embedding, comp_shape,
    cofaces, maximal_positions, positions, prune, substitute, substitute_with_embedding,
)


class TermError(ValueError):
    pass


class CoherenceError(TermError):
    pass


@dataclass(frozen=True)
class Term:
    head: str
    args: Tuple[Tuple[Position, "Term"], ...] = ()

    @classmethod
    def make(cls, head: str, args: Optional[Mapping[Position, "Term"]] = None) -> "Term":
        return cls(head, tuple(sorted((args or {}).items())))

    @property
    def argmap(self) -> Dict[Position, "Term"]:
        return dict(self.args)

    def generators(self) -> Iterable[str]:
        yield self.head
        for _, a in self.args:
            yield from a.generators()

    def text(self) -> str:
        if not self.args:
            return self.head
        inner = ";".join(f"{pos}={arg.text()}" for pos, arg in self.args)
        return self.head + "{" + inner + "}"

    def __str__(self):
        return self.text()

    def to_json(self) -> dict:
        return {"head": self.head,
                "args": {str(pos): (a.head if not a.args else a.to_json()) for pos, a in self.args}}

    @classmethod
    def from_json(cls, data: Union[str, dict]) -> "Term":
        if isinstance(data, str):
            return cls(data)
        if not isinstance(data, dict) or "head" not in data:
            raise TermError(f"bad term {data!r}")
        args = {Position.parse(k): cls.from_json(v) for k, v in data.get("args", {}).items()}
        return cls.make(str(data["head"]), args)


def gen(cid: str) -> Term:
    return Term(cid)


def _top(n: int) -> Position:
    return Position((0,) * (n + 1))


class Terms:
    """Term algebra over one T-graph: normal forms, arities, boundaries.

    Results are memoised per instance; the graph is immutable so the
    caches never go stale.
    """

    def __init__(self, g: TGraph):
        if not g.is_pointed:
            raise TermError("the free T-category needs a pointed T-graph")
        self.g = g
        self._norm: Dict[Term, Term] = {}
        self._labels: Dict[Term, Dict[Position, Term]] = {}
        self._arity: Dict[Term, Tuple[TreeCell, Optional[Embedding]]] = {}
        self._bd: Dict[Tuple[Term, str], Term] = {}
        self.cell_of: Dict[Term, str] = {}
        for c in g.cells:
            if c.provenance.kind == "composite":
                self.cell_of[c.provenance.term] = c.id
            else:
                self.cell_of[gen(c.id)] = c.id

    # -- basic predicates

    def cell(self, cid: str) -> Cell:
        try:
            return self.g[cid]
        except GraphError:
            raise TermError(f"unknown cell {cid!r}") from None

    def is_composite(self, cid: str) -> bool:
        return self.cell(cid).provenance.kind == "composite"

    def is_basic(self, cid: str) -> bool:
        return not self.g.is_unit(cid) and not self.is_composite(cid)

    def is_unit_term(self, t: Term) -> bool:
        return not t.args and self.g.is_unit(t.head)

    def unit(self, colour: str, n: int) -> Term:
        cid = self.g.unit(colour, n)
        if cid is None:
            raise TermError(f"no unit for colour {colour} in dimension {n}")
        return gen(cid)

    def dim(self, t: Term) -> int:
        return self.cell(t.head).dim

    def out(self, t: Term) -> str:
        return self.cell(t.head).out

    def size(self, t: Term) -> int:
        """Generator occurrences of a normal form, units excluded."""
        if self.is_unit_term(t):
            return 0
        return 1 + sum(self.size(a) for _, a in t.args)

    # -- normal forms

    def normalize(self, t: Term) -> Term:
        hit = self._norm.get(t)
        if hit is None:
            args = {pos: self.normalize(a) for pos, a in t.args}
            hit = self._assemble(t.head, args)
            self._norm[t] = hit
        return hit

    def _assemble(self, head: str, args: Dict[Position, Term]) -> Term:
        # args are normal and keyed by maximal positions of the head's arity tree
        h = self.cell(head)
        self._check_args(h, args)
        if self.g.is_unit(head):
            return args.get(_top(h.dim), gen(head))
        if h.provenance.kind == "composite":
            return self.compose_term(h.provenance.term, args)
        kept = {pos: a for pos, a in args.items() if not self.is_unit_term(a)}
        t = Term.make(head, kept)
        if t not in self._labels:
            self._labels[t] = self._fill(h.arity.tree, h.dim, h.arity.colour, kept)
        return t

    def _check_args(self, h: Cell, args: Mapping[Position, Term]) -> None:
        maximal = set(maximal_positions(h.arity.tree))
        for pos, a in args.items():
            if pos not in maximal:
                raise TermError(f"shape mismatch: {pos} is not a maximal position of {h.id}")
            if self.dim(a) != pos.dim:
                raise TermError(f"shape mismatch at {pos} of {h.id}: "
                                f"argument {a.text()} has dim {self.dim(a)}")
            if self.out(a) != h.arity.colour:
                raise TermError(f"colour mismatch at {pos} of {h.id}: argument {a.text()} "
                                f"outputs {self.out(a)}, expected {h.arity.colour}")

    def compose_term(self, b: Term, a: Mapping[Position, Term]) -> Term:
        """Graft normal terms ``a`` (on maximal positions of arity(b)) onto normal ``b``."""
        if not b.args:
            return self._assemble(b.head, dict(a))
        h = self.cell(b.head)
        shape, emb = self.arity_with_embedding(b)
        full_a = self._fill(shape.tree, shape.dim, shape.colour, a)
        inner = b.argmap
        new = {}
        for pi in maximal_positions(h.arity.tree):
            b_pi = inner.get(pi) or self.unit(h.arity.colour, pi.dim)
            sub_shape = self.arity(b_pi).tree
            a_pi = {rho: full_a[emb[(pi, rho)]] for rho in maximal_positions(sub_shape)}
            r = self.compose_term(b_pi, a_pi)
            if not self.is_unit_term(r):
                new[pi] = r
        return self._assemble(h.id, new)

    # -- labels, arities, boundaries

    def _fill(self, tree, n: int, colour: str, args: Mapping[Position, Term]) -> Dict[Position, Term]:
        """Label every position of ``tree``: arguments on leaves, boundaries below."""
        labels: Dict[Position, Term] = {}
        for pos in maximal_positions(tree):
            labels[pos] = args.get(pos) or self.unit(colour, pos.dim)
        for p in range(n - 1, -1, -1):
            for pos in positions(tree, p):
                if pos in labels:
                    continue
                seen = None
                for up, side in cofaces(tree, pos):
                    cand = self.boundary(labels[up], side)
                    if seen is None:
                        seen = cand
                    elif cand != seen:
                        raise CoherenceError(
                            f"incoherent boundaries at position {pos}: {seen.text()} vs {cand.text()}")
                labels[pos] = seen
        return labels

    def labels(self, t: Term) -> Dict[Position, Term]:
        """All position labels of a normal term."""
        hit = self._labels.get(t)
        if hit is None:
            h = self.cell(t.head)
            hit = self._fill(h.arity.tree, h.dim, h.arity.colour, t.argmap)
            self._labels[t] = hit
        return hit

    def arity_with_embedding(self, t: Term) -> Tuple[TreeCell, Optional[Embedding]]:
        hit = self._arity.get(t)
        if hit is None:
            h = self.cell(t.head)
            if not t.args:
                hit = (h.arity, None)
            else:
                labels = self.labels(t)
                arities = {pos: self.arity(lab) for pos, lab in labels.items()}
                colour = arities[Position((0,))].colour
                base = TreeCell(h.arity.tree, colour, h.dim)
                hit = substitute_with_embedding(base, arities)
            self._arity[t] = hit
        return hit

    def arity(self, t: Term) -> TreeCell:
        return self.arity_with_embedding(t)[0]

    def boundary(self, t: Term, side: str) -> Term:
        key = (t, side)
        hit = self._bd.get(key)
        if hit is None:
            h = self.cell(t.head)
            if h.dim == 0:
                raise TermError(f"the 0-dimensional term {t.text()} has no boundary")
            face = h.src if side == "source" else h.tgt
            if not t.args:
                hit = self.normalize(gen(face))
            else:
                labels = self.labels(t)
                emb = boundary_embedding(h.arity.tree, h.dim, side)
                pruned = prune(h.arity.tree, h.dim - 1)
                args = {rho: labels[emb[rho]] for rho in maximal_positions(pruned)}
                hit = self._assemble(face, {k: v for k, v in args.items()
                                            if not self.is_unit_term(v)})
            self._bd[key] = hit
        return hit

    def src(self, t: Term) -> Term:
        return self.boundary(self.normalize(t), "source")

    def tgt(self, t: Term) -> Term:
        return self.boundary(self.normalize(t), "target")

    def raw_arity(self, t: Term) -> TreeCell:
        """Arity by direct substitution, without normalising first."""
        h = self.cell(t.head)
        if not t.args:
            return h.arity
        tree = h.arity.tree
        args = t.argmap
        arities: Dict[Position, TreeCell] = {}
        for pos in maximal_positions(tree):
            a = args.get(pos)
            arities[pos] = self.raw_arity(a) if a else self.cell(
                self.unit(h.arity.colour, pos.dim).head).arity
        for p in range(h.dim - 1, -1, -1):
            for pos in positions(tree, p):
                if pos not in arities:
                    up, _ = next(cofaces(tree, pos))
                    arities[pos] = boundary(arities[up])
        colour = arities[Position((0,))].colour
        return substitute(TreeCell(tree, colour, h.dim), arities)


def graft(g: Union[TGraph, Terms], head: str,
          args: Mapping[Position, Union[Term, str]]) -> Term:
    """Build the raw term ``head(args)``.

    ``args`` may label any positions of the head's arity tree; labels on
    non-maximal positions must match the boundaries of the maximal ones.
    Missing maximal positions take units.
    """
    ctx = g if isinstance(g, Terms) else Terms(g)
    h = ctx.cell(head)
    tree = h.arity.tree
    every = set(all_positions(tree, h.dim))
    maximal = set(maximal_positions(tree))
    terms = {pos: (gen(a) if isinstance(a, str) else a) for pos, a in args.items()}
    for pos, a in terms.items():
        if pos not in every:
            raise TermError(f"shape mismatch: {pos} is not a position of {head}")
        if ctx.dim(a) != pos.dim:
            raise TermError(f"shape mismatch at {pos}: argument has dim {ctx.dim(a)}")
        if ctx.out(a) != h.arity.colour:
            raise TermError(f"colour mismatch at {pos}: argument outputs {ctx.out(a)}, "
                            f"{head} expects {h.arity.colour}")
    top = {pos: ctx.normalize(a) for pos, a in terms.items() if pos in maximal}
    full = ctx._fill(tree, h.dim, h.arity.colour, top)
    for pos, a in terms.items():
        if pos not in maximal and ctx.normalize(a) != full[pos]:
            raise CoherenceError(f"incoherent boundaries at {pos}: given {ctx.normalize(a).text()}, "
                                 f"arguments force {full[pos].text()}")
    return Term.make(head, {pos: terms[pos] for pos in maximal if pos in terms})


def normalize(g: Union[TGraph, Terms], t: Term) -> Term:
    ctx = g if isinstance(g, Terms) else Terms(g)
    return ctx.normalize(t)


# -- the composition system ---------------------------------------------------------


def mu_id(colour: str, n: int, p: int) -> str:
    return f"mu[{colour},{n},{p}]"


def composition_system(colours: Iterable[str], max_dim: int) -> TGraph:
    """Units and binary compositions mu[g,n,p] with arity D(n,p), per colour."""
    if max_dim < 1:
        raise TermError("a composition system needs max_dim >= 1")
    colours = list(colours)
    b = TGraphBuilder(colours)
    for g in colours:
        b.add_units(g, max_dim)
        for n in range(1, max_dim + 1):
            for p in range(n):
                face = mu_id(g, n - 1, p) if p < n - 1 else b.pointing[(g, n - 1)]
                b.cell(mu_id(g, n, p), TreeCell(comp_shape(n, p), g, n), g, face, face)
    return b.build()


# -- one stage of the free T-category ------------------------------------------------


def normal_forms(ctx: Terms, max_dim: int, max_size: int) -> Dict[int, List[Term]]:
    """Every normal form of size 1..max_size and dim <= max_dim, by size."""
    basic = [c for c in ctx.g.cells if c.dim <= max_dim and ctx.is_basic(c.id)]
    by_size: Dict[int, List[Term]] = {1: [gen(c.id) for c in basic]}
    pool: Dict[Tuple[int, str, int], List[Term]] = {}

    def index(s):
        for t in by_size[s]:
            pool.setdefault((ctx.dim(t), ctx.out(t), s), []).append(t)

    index(1)
    for s in range(2, max_size + 1):
        found = []
        for h in basic:
            slots = maximal_positions(h.arity.tree)
            for sizes in _distributions(len(slots), s - 1):
                choices = []
                for pos, k in zip(slots, sizes):
                    choices.append([None] if k == 0 else
                                   pool.get((pos.dim, h.arity.colour, k), []))
                for combo in itertools.product(*choices):
                    args = {pos: a for pos, a in zip(slots, combo) if a is not None}
                    try:
                        found.append(ctx._assemble(h.id, args))
                    except CoherenceError:
                        continue
        by_size[s] = found
        index(s)
    return by_size


def _distributions(slots: int, total: int):
    # ordered ways to spread ``total`` over ``slots`` non-negative parts
    if slots == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _distributions(slots - 1, total - first):
            yield (first,) + rest


def _representable(ctx: Terms, candidates: Dict[Term, str]):
    """Drop candidates whose boundaries are neither cells nor kept candidates."""
    keep = dict(candidates)
    changed = True
    while changed:
        changed = False
        for t in list(keep):
            if ctx.dim(t) == 0:
                continue
            for side in ("source", "target"):
                bt = ctx.boundary(t, side)
                if bt not in ctx.cell_of and bt not in keep:
                    del keep[t]
                    changed = True
                    break
    return keep


def adjoin_composites(g: TGraph, max_dim: int, max_term_size: int,
                      stage: Optional[int] = None) -> TGraph:
    """Add a cell for every new normal form within the budget.

    A normal form is kept only when both of its boundary terms are cells
    already or are kept themselves, so the result is again a T-graph.
    """
    if not g.is_pointed:
        raise TermError("adjoin_composites needs a pointed T-graph")
    problems = validate_tgraph(g)
    if problems:
        raise TermError(f"invalid input graph: {problems[0]}")
    ctx = Terms(g)
    fresh: Dict[Term, str] = {}
    for s, terms in normal_forms(ctx, max_dim, max_term_size).items():
        if s < 2:
            continue
        for t in terms:
            if t not in ctx.cell_of:
                fresh[t] = t.text()
    fresh = _representable(ctx, fresh)
    b = g.builder()

    def cell_id(t):
        return ctx.cell_of.get(t) or fresh[t]

    for t in sorted(fresh, key=lambda t: (ctx.dim(t), fresh[t])):
        n = ctx.dim(t)
        src = tgt = None
        if n >= 1:
            src, tgt = cell_id(ctx.boundary(t, "source")), cell_id(ctx.boundary(t, "target"))
        if fresh[t] in b:
            raise TermError(f"composite id {fresh[t]} clashes with an existing cell")
        b.cell(fresh[t], ctx.arity(t), ctx.out(t), src, tgt,
               Provenance("composite", term=t, stage=stage))
    return b.build()


def check_composites(g: TGraph) -> List[Violation]:
    """Coherence of every composite cell with the term it names."""
    out: List[Violation] = []
    if not g.is_pointed:
        return [Violation("<graph>", "unpointed graph")]
    ctx = Terms(g)
    for c in g.cells:
        if c.provenance.kind != "composite":
            continue
        t = c.provenance.term
        try:
            nf = ctx.normalize(t)
        except TermError as exc:
            out.append(Violation(c.id, "ill-formed term", str(exc)))
            continue
        if nf != t:
            out.append(Violation(c.id, "term not in normal form"))
        if ctx.size(nf) < 2:
            out.append(Violation(c.id, "composite of size < 2"))
        if ctx.arity(nf) != c.arity:
            out.append(Violation(c.id, "composite arity", f"{ctx.arity(nf)} != {c.arity}"))
        if ctx.out(nf) != c.out:
            out.append(Violation(c.id, "composite colour"))
        if c.dim >= 1:
            for side, face in (("source", c.src), ("target", c.tgt)):
                if ctx.boundary(nf, side) != ctx.normalize(gen(face)):
                    out.append(Violation(c.id, f"composite {side}",
                                         f"{ctx.boundary(nf, side).text()} vs {face}"))
    return sorted(set(out))
