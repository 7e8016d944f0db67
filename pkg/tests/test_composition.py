import itertools

import pytest
from hypothesis import given, settings, strategies as st

from contractile import trees
from contractile.collection import TGraph, TGraphBuilder, validate_tgraph
from contractile.composition import (
    CoherenceError, Term, TermError, Terms, adjoin_composites, check_composites,
    composition_system, gen, graft, mu_id, normal_forms, normalize,
)
from contractile.trees import Position, TreeCell

MU = mu_id("c0", 1, 0)
I0, I1, I2 = "iota[c0,0]", "iota[c0,1]", "iota[c0,2]"
L, R = Position((0, 0)), Position((1, 0))   # the two slots of D(1,0)


def laws(violations):
    return {v.law for v in violations}


@pytest.fixture(scope="module")
def comp1():
    return composition_system(["c0"], 1)


@pytest.fixture(scope="module")
def comp2():
    return composition_system(["c0"], 2)


@pytest.fixture(scope="module")
def stage1(comp2):
    return adjoin_composites(comp2, 2, 2, stage=1)


def arrows():
    """One colour: two unary cells f, h and a binary m, all on the unit 0-cell."""
    b = TGraphBuilder(["g"])
    b.add_units("g", 1)
    b.cell("f", TreeCell(((),), "g", 1), "g", "iota[g,0]", "iota[g,0]")
    b.cell("h", TreeCell(((),), "g", 1), "g", "iota[g,0]", "iota[g,0]")
    b.cell("m", TreeCell(((), ()), "g", 1), "g", "iota[g,0]", "iota[g,0]")
    return b.build()


# -- the composition system -----------------------------------------------------------


@pytest.mark.parametrize("colours, max_dim, count", [
    (["c0"], 1, 3), (["c0"], 2, 6), (["c0", "c1"], 3, 20),
])
def test_composition_system_size(colours, max_dim, count):
    g = composition_system(colours, max_dim)
    assert len(g) == count
    assert validate_tgraph(g) == []


def test_composition_system_cells(comp2):
    assert comp2[MU].arity == TreeCell(((), ()), "c0", 1)
    assert (comp2[MU].src, comp2[MU].tgt) == (I0, I0)
    m20 = comp2[mu_id("c0", 2, 0)]
    assert m20.arity.tree == trees.comp_shape(2, 0)
    assert (m20.src, m20.tgt) == (MU, MU)
    m21 = comp2[mu_id("c0", 2, 1)]
    assert m21.arity.tree == trees.comp_shape(2, 1)
    assert (m21.src, m21.tgt) == (I1, I1)


def test_composition_system_needs_a_dimension():
    with pytest.raises(TermError):
        composition_system(["c0"], 0)


# -- grafting --------------------------------------------------------------------------


def test_graft_binary(comp1):
    ctx = Terms(comp1)
    t = normalize(ctx, graft(ctx, MU, {L: MU}))
    assert t.text() == "mu[c0,1,0]{0.0=mu[c0,1,0]}"
    assert ctx.arity(t) == TreeCell(((), (), ()), "c0", 1)
    assert ctx.size(t) == 2
    assert ctx.src(t) == gen(I0)


def test_graft_accepts_consistent_lower_labels(comp2):
    t = graft(comp2, mu_id("c0", 2, 1), {Position((0, 0, 0)): I2, Position((0, 1)): I1})
    assert normalize(comp2, t) == gen(mu_id("c0", 2, 1))


@pytest.mark.parametrize("args, error", [
    ({Position((2, 0)): MU}, "shape mismatch"),
    ({L: I0}, "shape mismatch"),
    ({Position((0,)): MU}, "shape mismatch"),
])
def test_graft_shape_errors(comp1, args, error):
    with pytest.raises(TermError, match=error):
        graft(comp1, MU, args)


def test_graft_colour_error():
    g = composition_system(["c0", "c1"], 1)
    with pytest.raises(TermError, match="colour mismatch"):
        graft(g, MU, {L: mu_id("c1", 1, 0)})


def test_graft_incoherent(comp2):
    with pytest.raises(CoherenceError):
        graft(comp2, mu_id("c0", 2, 1),
              {Position((0, 0, 0)): mu_id("c0", 2, 0), Position((0, 1, 0)): mu_id("c0", 2, 1)})
    with pytest.raises(CoherenceError):
        graft(comp2, mu_id("c0", 2, 1), {Position((0, 1)): MU})


def test_unknown_head(comp1):
    with pytest.raises(TermError, match="unknown cell"):
        graft(comp1, "nope", {})


def test_unpointed_graph_rejected():
    g = TGraph(["g"], [], None)
    with pytest.raises(TermError):
        Terms(g)


# -- normal forms -----------------------------------------------------------------------


def test_units_are_absorbed(comp1):
    ctx = Terms(comp1)
    assert ctx.normalize(graft(ctx, MU, {L: I1, R: I1})) == gen(MU)
    assert ctx.normalize(graft(ctx, I1, {Position((0, 0)): MU})) == gen(MU)
    assert ctx.normalize(graft(ctx, I1, {})) == gen(I1)
    assert ctx.size(gen(I1)) == 0


def test_normalize_is_idempotent(stage1):
    ctx = Terms(stage1)
    for terms in normal_forms(ctx, 2, 3).values():
        for t in terms:
            assert ctx.normalize(t) == t


def test_free_composition_is_not_associative(comp1):
    ctx = Terms(comp1)
    left = ctx.normalize(graft(ctx, MU, {L: MU}))
    right = ctx.normalize(graft(ctx, MU, {R: MU}))
    assert left != right
    assert ctx.arity(left) == ctx.arity(right)


def test_reassociation_confluence():
    g = adjoin_composites(arrows(), 1, 2, stage=1)
    ctx = Terms(g)
    nested = ctx.normalize(graft(ctx, "m", {L: "m"}))
    cid = ctx.cell_of[nested]
    slots = trees.maximal_positions(g[cid].arity.tree)
    assert len(slots) == 3
    pool = ["f", "h", "m", "iota[g,1]", cid]
    for x, y, z in itertools.product(pool, repeat=3):
        flat = ctx.normalize(graft(ctx, cid, dict(zip(slots, (x, y, z)))))
        inner = graft(ctx, "m", {L: x, R: y})
        deep = ctx.normalize(Term.make("m", {L: inner, R: gen(z)}))
        assert flat == deep
        assert ctx.arity(flat) == ctx.raw_arity(graft(ctx, cid, dict(zip(slots, (x, y, z)))))


def test_boundaries_are_globular(stage1):
    ctx = Terms(stage1)
    for terms in normal_forms(ctx, 2, 3).values():
        for t in terms:
            if ctx.dim(t) >= 1:
                for side in ("source", "target"):
                    b = ctx.boundary(t, side)
                    assert ctx.arity(b) == trees.boundary(ctx.arity(t))
                    assert ctx.out(b) == ctx.out(t)
            if ctx.dim(t) >= 2:
                s, e = ctx.src(t), ctx.tgt(t)
                assert ctx.src(s) == ctx.src(e)
                assert ctx.tgt(s) == ctx.tgt(e)


@st.composite
def raw_terms(draw, g, depth=2, dim=None, colour=None):
    cells = [c for c in g.cells
             if (dim is None or c.dim == dim) and (colour is None or c.out == colour)]
    head = draw(st.sampled_from(cells))
    args = {}
    if depth > 0:
        for pos in trees.maximal_positions(head.arity.tree):
            if draw(st.booleans()):
                args[pos] = draw(raw_terms(g, depth - 1, pos.dim, head.arity.colour))
    return Term.make(head.id, args)


_STAGE1 = adjoin_composites(composition_system(["c0"], 2), 2, 2, stage=1)
_ARROWS1 = adjoin_composites(arrows(), 1, 2, stage=1)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([_STAGE1, _ARROWS1]).flatmap(lambda g: st.tuples(st.just(g), raw_terms(g))))
def test_arity_is_functorial(case):
    g, t = case
    ctx = Terms(g)
    try:
        nf = ctx.normalize(t)
    except CoherenceError:
        return
    assert ctx.raw_arity(t) == ctx.arity(nf)
    assert ctx.out(nf) == g[t.head].out
    assert ctx.dim(nf) == g[t.head].dim
    assert ctx.normalize(nf) == nf


def test_term_json_round_trip(comp1):
    t = normalize(comp1, graft(comp1, MU, {L: MU}))
    assert Term.from_json(t.to_json()) == t
    assert t.to_json() == {"head": MU, "args": {"0.0": MU}}
    with pytest.raises(TermError):
        Term.from_json(42)


# -- adjoining composites -----------------------------------------------------------------


def brute_normal_forms(g, max_dim, max_size, slack=1):
    """Normalise every raw term with at most max_size + slack generator nodes."""
    ctx = Terms(g)
    cells = [c for c in g.cells if c.dim <= max_dim]
    memo = {}

    def exact(n, dim, colour):
        # raw terms with exactly n nodes, optionally constrained in dim/colour
        key = (n, dim, colour)
        if key not in memo:
            out = []
            for c in cells:
                if (dim is not None and c.dim != dim) or (colour is not None and c.out != colour):
                    continue
                slots = trees.maximal_positions(c.arity.tree)
                out.extend(Term.make(c.id, args) for args in fill(c, slots, 0, n - 1))
            memo[key] = out
        return memo[key]

    def fill(head, slots, i, n):
        if i == len(slots):
            if n == 0:
                yield {}
            return
        for rest in fill(head, slots, i + 1, n):
            yield rest
        for used in range(1, n + 1):
            for sub in exact(used, slots[i].dim, head.arity.colour):
                for rest in fill(head, slots, i + 1, n - used):
                    yield {slots[i]: sub, **rest}

    found = set()
    for n in range(1, max_size + slack + 1):
        for t in exact(n, None, None):
            try:
                nf = ctx.normalize(t)
            except CoherenceError:
                continue
            if 2 <= ctx.size(nf) <= max_size:
                found.add(nf)
    return ctx, found


def cascade(ctx, terms):
    keep = set(terms)
    while True:
        drop = {t for t in keep if ctx.dim(t) >= 1 and any(
            ctx.boundary(t, side) not in keep and ctx.boundary(t, side) not in ctx.cell_of
            for side in ("source", "target"))}
        if not drop:
            return keep
        keep -= drop


@pytest.mark.parametrize("make, max_dim, max_size, slack", [
    (lambda: composition_system(["c0"], 1), 1, 3, 1),
    (lambda: composition_system(["c0"], 2), 2, 2, 1),
    (arrows, 1, 3, 1),
    (lambda: adjoin_composites(arrows(), 1, 2, stage=1), 1, 3, 0),
])
def test_adjoin_matches_brute_force(make, max_dim, max_size, slack):
    g = make()
    ctx, found = brute_normal_forms(g, max_dim, max_size, slack)
    want = cascade(ctx, {t for t in found if t not in ctx.cell_of})
    g2 = adjoin_composites(g, max_dim, max_size, stage=9)
    got = {c.provenance.term for c in g2.cells if c.id not in g}
    assert got == want
    assert validate_tgraph(g2) == []
    assert check_composites(g2) == []
    for c in g2.cells:
        if c.id not in g:
            assert c.id == c.provenance.term.text()
            assert c.provenance.stage == 9


def test_adjoin_twice_adds_nothing_new(stage1):
    again = adjoin_composites(stage1, 2, 2, stage=3)
    assert {c.id for c in again.cells} == {c.id for c in stage1.cells}


def test_check_composites_flags_tampering(stage1):
    comp = next(c for c in stage1.cells if c.provenance.kind == "composite" and c.dim == 1)
    from dataclasses import replace
    bad_arity = replace(comp, arity=TreeCell(((),), "c0", 1))
    cells = [bad_arity if c.id == comp.id else c for c in stage1.cells]
    assert "composite arity" in laws(check_composites(TGraph(stage1.colours, cells, stage1.pointing)))
    raw = graft(stage1, MU, {L: I1})
    odd = replace(comp, provenance=replace(comp.provenance, term=raw))
    cells = [odd if c.id == comp.id else c for c in stage1.cells]
    found = laws(check_composites(TGraph(stage1.colours, cells, stage1.pointing)))
    assert "term not in normal form" in found
