"""Helpers shared by the unit tests and the acceptance suite."""
from __future__ import annotations

from contractile import trees
from contractile.collection import TGraphBuilder
from contractile.trees import Position, TreeCell

import oracles


def coherent_labellings(base: TreeCell, pool):
    """Every labelling of ``base``'s positions by cells drawn from ``pool``.

    ``pool`` is an iterable of trees; a p-position may take any pool tree
    of height <= p whose boundary matches the labels already placed on its
    source and target.  0-positions always carry the point.
    """
    order = list(trees.all_positions(base.tree, base.dim))
    by_dim = {}
    for t in pool:
        for p in range(trees.height(t), base.dim + 1):
            by_dim.setdefault(p, []).append(TreeCell(t, base.colour, p))
    labels = {}

    def go(i):
        if i == len(order):
            yield dict(labels)
            return
        pos = order[i]
        if pos.dim == 0:
            labels[pos] = TreeCell(trees.LEAF, base.colour, 0)
            yield from go(i + 1)
            return
        s = labels[trees.position_source(pos)]
        t = labels[trees.position_target(pos)]
        if s != t:
            return
        for cand in by_dim.get(pos.dim, []):
            if trees.boundary(cand) == s:
                labels[pos] = cand
                yield from go(i + 1)
        labels.pop(pos, None)

    yield from go(0)


def scheme_mismatches(t):
    """Compare positions + boundary maps of ``t`` with the globe-glued scheme.

    Maximal positions are matched to the globes' top cells leaf by leaf;
    everything else is forced through source/target.  Returns a list of
    human-readable mismatches (empty when isomorphic).
    """
    cells, src, tgt, top = oracles.glued_scheme(t)
    h = trees.height(t)
    problems = []
    for d in range(h + 2):
        mine = len(trees.positions(t, d))
        theirs = len(cells.get(d, []))
        if mine != theirs:
            problems.append(f"dim {d}: {mine} positions vs {theirs} glued cells")
    phi = {}
    stack = list(zip(trees.maximal_positions(t), top))
    while stack:
        pos, rep = stack.pop()
        if pos in phi:
            if phi[pos] != rep:
                problems.append(f"{pos} maps to both {phi[pos]} and {rep}")
            continue
        phi[pos] = rep
        if pos.dim >= 1:
            stack.append((trees.position_source(pos), src[rep]))
            stack.append((trees.position_target(pos), tgt[rep]))
    everything = set(trees.all_positions(t, h))
    if set(phi) != everything:
        problems.append(f"unreached positions {sorted(everything - set(phi))}")
    for d in range(h + 1):
        images = [phi[p] for p in trees.positions(t, d) if p in phi]
        if len(set(images)) != len(images):
            problems.append(f"dim {d}: not injective")
    return problems


def composed_labels(outer, embedding, inner):
    """Pull a labelling of the pasted tree back onto each outer label."""
    out = {}
    for pi, lab in outer.items():
        sub = {rho: inner[embedding[(pi, rho)]]
               for rho in trees.all_positions(lab.tree, lab.dim)}
        out[pi] = trees.substitute(lab, sub)
    return out


def associativity_failures(base: TreeCell, outer_pool, inner_pool):
    """Check both routes of T T T -> T on every nested labelling.

    Returns ``(checked, failures)``.
    """
    checked, failures = 0, []
    for outer in coherent_labellings(base, outer_pool):
        mid, emb = trees.substitute_with_embedding(base, outer)
        for inner in coherent_labellings(mid, inner_pool):
            checked += 1
            left = trees.substitute(mid, inner)
            right = trees.substitute(base, composed_labels(outer, emb, inner))
            if left != right:
                failures.append((base, outer, inner, left, right))
    return checked, failures


def scheme_positions(t, p):
    return [Position(x.path) for x in trees.positions(t, p)]


# -- small T-graphs ---------------------------------------------------------------

def loop_graph():
    """One 0-cell a and two parallel root loops x, y: a -> a, plus a 2-cell."""
    b = TGraphBuilder(["g"])
    b.add_units("g", 2)
    point = TreeCell(trees.LEAF, "g", 0)
    b.cell("a", point, "g")
    b.cell("x", trees.reflexivity(point, 1), "g", "a", "a")
    b.cell("y", trees.reflexivity(point, 1), "g", "a", "a")
    b.cell("z", trees.reflexivity(point, 2), "g", "x", "y")
    return b.build()


def mixed_graph():
    """Root and non-root cells over two colours, several parallel families."""
    b = TGraphBuilder(["g", "h"])
    for colour in ("g", "h"):
        b.add_units(colour, 2)
    point = TreeCell(trees.LEAF, "g", 0)
    arrow = TreeCell(((),), "g", 1)
    pair = TreeCell(((), ()), "g", 1)
    b.cell("a", point, "h")
    b.cell("b", point, "h")
    b.cell("f", arrow, "h", "a", "b")
    b.cell("f2", arrow, "h", "a", "b")
    b.cell("m", pair, "h", "a", "b")
    b.cell("r", trees.reflexivity(point, 1), "h", "a", "b")
    b.cell("r2", trees.reflexivity(point, 1), "h", "a", "b")
    b.cell("l", trees.reflexivity(point, 1), "h", "a", "a")
    b.cell("l2", trees.reflexivity(point, 1), "h", "a", "a")
    b.cell("al", trees.reflexivity(arrow, 2), "h", "f", "f2")
    b.cell("ar", trees.reflexivity(arrow, 2), "h", "f", "f2")
    b.cell("lz", trees.reflexivity(point, 2), "h", "l", "l2")
    return b.build()


def fixture_graphs():
    from contractile.composition import composition_system
    from contractile.freegen import joyal_fixture
    return {
        "joyal": joyal_fixture(),
        "loops": loop_graph(),
        "mixed": mixed_graph(),
        "comp2": composition_system(["c0", "c1"], 2),
    }


def generated_fragments():
    from contractile.contraction import Mode
    from contractile.freegen import Budget, batanin_b0_fragment, free_contractible_tcategory
    out = {}
    for mode in Mode:
        for name, g in fixture_graphs().items():
            out[f"{name}-{mode.value}"] = free_contractible_tcategory(g, Budget(2, 4, 2), mode)
        out[f"b0-{mode.value}"] = batanin_b0_fragment(Budget(2, 4, 2), mode)
    return out


# -- fragment checks shared with the acceptance suite -----------------------------------


def graph_at(frag, stage):
    from contractile.collection import TGraph
    keep = frag.cells_up_to(stage)
    return TGraph(frag.graph.colours, [c for c in frag.graph.cells if c.id in keep],
                  frag.graph.pointing)


def contraction_at(frag, stage):
    from contractile.contraction import Contraction
    keep = frag.cells_up_to(stage)
    return Contraction(tuple(e for e in frag.contraction.entries if e.cell in keep))


def coverage_gaps(frag, max_dim):
    """Pairs present before a filler stage that the stage left unfilled."""
    from contractile.contraction import uncovered_pairs
    gaps = []
    for r in frag.stage_log:
        if r.kind != "filler":
            continue
        before = frag.cells_up_to(r.stage - 1)
        g, c = graph_at(frag, r.stage), contraction_at(frag, r.stage)
        gaps += [(r.stage,) + p for p in uncovered_pairs(g, c, max_dim, frag.mode, among=before)]
    return gaps


def embeds(small, large):
    """Cells of ``small`` reappear in ``large`` under the same id and structure."""
    missing = []
    for c in small.graph.cells:
        other = large.graph.get(c.id)
        if other is None or other.structure() != c.structure():
            missing.append(c.id)
    if not set(small.contraction.entries) <= set(large.contraction.entries):
        missing.append("<contraction>")
    return missing


def b0_oracle_counts(max_size, stages, colours=1):
    """Per-stage additions for the one-dimensional B0 fragment, computed by hand.

    Stage 1: normal forms over the binary generator.  Stage 2: the diagonal
    pair on each colour's unit 0-cell.  Stage 3: normal forms that now may
    also use that filler (a generator with no slots).  Later stages add
    nothing: no new 0-cells appear, and no new generators.
    """
    two = sum(oracles.count_planar_terms([2], s) for s in range(2, max_size + 1))
    both = sum(oracles.count_planar_terms([2, 0], s) for s in range(2, max_size + 1))
    counts = [two * colours, colours, (both - two) * colours]
    counts += [0] * max(0, stages - 3)
    return counts[:stages]
