"""Staged free contractible T-categories.

Composite stages (odd) and filler stages (even) alternate, so the result
carries a T-category fragment and a contraction on the same carrier.  The
stage budget truncates the colimit that the two finitary free constructions
would otherwise reach.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

from . import trees
from .collection import TGraph, TGraphBuilder, Violation, validate_tgraph
from .composition import adjoin_composites, check_composites, composition_system
from .contraction import (
    Contraction, Mode, adjoin_contractions, contraction_domain, filler_id, is_root_cell,
    validate_contraction,
)
from .trees import TreeCell


class FreegenError(ValueError):
    pass


@dataclass(frozen=True)
class Budget:
    max_dim: int = 2
    stages: int = 2
    max_term_size: int = 2

    def __post_init__(self):
        for name in ("max_dim", "stages", "max_term_size"):
            if getattr(self, name) < 0:
                raise FreegenError(f"budget field {name} must be >= 0")


class StageRecord(NamedTuple):
    stage: int
    kind: str
    cells: Tuple[str, ...]


@dataclass(frozen=True)
class Fragment:
    graph: TGraph
    contraction: Contraction = field(default_factory=Contraction)
    stage_log: Tuple[StageRecord, ...] = ()
    mode: Mode = Mode.CORRECTED

    def cells_up_to(self, stage: int) -> set:
        """Ids present once ``stage`` has committed (stage 0 = the input)."""
        later = {cid for r in self.stage_log if r.stage > stage for cid in r.cells}
        return {c.id for c in self.graph.cells} - later


def stage_kind(stage: int) -> str:
    return "composite" if stage % 2 == 1 else "filler"


def free_contractible_tcategory(x: TGraph, b: Budget, mode: Mode = Mode.CORRECTED,
                                contraction: Optional[Contraction] = None) -> Fragment:
    if not x.is_pointed:
        raise FreegenError("free_contractible_tcategory needs a pointed T-graph")
    mode = Mode(mode)
    problems = validate_tgraph(x)
    if problems:
        raise FreegenError(f"invalid input graph: {problems[0]}")
    g, c = x, contraction or Contraction()
    log: List[StageRecord] = []
    for stage in range(1, b.stages + 1):
        before = {cell.id for cell in g.cells}
        if stage_kind(stage) == "composite":
            g = adjoin_composites(g, b.max_dim, b.max_term_size, stage=stage)
        else:
            g, c = adjoin_contractions(g, c, b.max_dim, mode, stage=stage)
        added = tuple(cell.id for cell in g.cells if cell.id not in before)
        log.append(StageRecord(stage, stage_kind(stage), added))
    return Fragment(g, c, tuple(log), mode)


def batanin_b0_fragment(b: Budget, mode: Mode = Mode.CORRECTED) -> Fragment:
    """Truncation of the free contractible operad with a composition system on one colour."""
    return free_contractible_tcategory(composition_system(["c0"], max(b.max_dim, 1)), b, mode)


JOYAL_COLOURS = ("g", "h")


def joyal_fixture() -> TGraph:
    """Two distinct 0-cells a, b and two parallel root 1-cells x, y: a -> b.

    Reconstruction of the over-generation the loop restriction removes:
    x and y live over the bare colour g, so they are root cells whose
    0-source and 0-target differ.
    """
    g, h = JOYAL_COLOURS
    b = TGraphBuilder(JOYAL_COLOURS)
    for colour in JOYAL_COLOURS:
        b.add_units(colour, 2)
    point = TreeCell(trees.LEAF, g, 0)
    b.cell("a", point, h)
    b.cell("b", point, h)
    root = trees.reflexivity(point, 1)
    b.cell("x", root, h, "a", "b")
    b.cell("y", root, h, "a", "b")
    return b.build()


def validate_fragment(f: Fragment) -> List[Violation]:
    """Both structures on one carrier, plus the stage bookkeeping."""
    out = list(validate_tgraph(f.graph))
    out += validate_contraction(f.graph, f.contraction, f.mode)
    out += check_composites(f.graph)
    logged = {}
    for r in f.stage_log:
        for cid in r.cells:
            logged[cid] = r.stage
    for c in f.graph.cells:
        stage = c.provenance.stage
        if c.id in logged and stage != logged[c.id]:
            out.append(Violation(c.id, "provenance stage", f"{stage} != {logged[c.id]}"))
        elif c.id not in logged and stage not in (None, 0):
            out.append(Violation(c.id, "provenance stage", f"unlogged stage {stage}"))
    return sorted(set(out))


def fragment_stats(f: Fragment) -> Dict:
    """Cumulative per-stage counts, arity histogram and root-cell counts."""
    stages = [0] + [r.stage for r in f.stage_log]
    kinds = {0: "input", **{r.stage: r.kind for r in f.stage_log}}
    added = {0: len(f.cells_up_to(0)), **{r.stage: len(r.cells) for r in f.stage_log}}
    rows = []
    for s in stages:
        present = f.cells_up_to(s)
        cells = [c for c in f.graph.cells if c.id in present]
        by_dim = Counter(str(c.dim) for c in cells)
        rows.append({
            "stage": s,
            "kind": kinds[s],
            "added": added[s],
            "cells": len(cells),
            "cells_by_dim": dict(sorted(by_dim.items(), key=lambda kv: int(kv[0]))),
            "root_cells": sum(1 for c in cells if is_root_cell(c)),
            "fillers": sum(1 for c in cells if c.provenance.kind == "filler"),
            "composites": sum(1 for c in cells if c.provenance.kind == "composite"),
        })
    hist = Counter(f"{trees._compact(c.arity.tree)}@{c.dim}" for c in f.graph.cells)
    return {
        "mode": Mode(f.mode).value,
        "stages": rows,
        "arity_histogram": dict(sorted(hist.items())),
        "contraction_entries": len(f.contraction),
    }


def joyal_regression(b: Budget = Budget(max_dim=2, stages=4, max_term_size=2)) -> Dict:
    """Run the fixture through both modes and check the root pair (x, y).

    The corrected run must never fill (x, y) at any stage; the legacy
    domain must already contain it after stage 1 and the legacy run must
    fill it at its first filler stage.
    """
    x = joyal_fixture()
    corrected = free_contractible_tcategory(x, b, Mode.CORRECTED)
    legacy = free_contractible_tcategory(x, b, Mode.LEGACY)
    pair = ("x", "y")
    bad = filler_id(1, *pair)

    def domain_at(f, stage, mode):
        keep = f.cells_up_to(stage)
        cells = [c for c in f.graph.cells if c.id in keep]
        g = TGraph(f.graph.colours, cells, f.graph.pointing)
        return pair in contraction_domain(g, 1, mode)

    corrected_rows = []
    for s in range(0, b.stages + 1):
        corrected_rows.append({
            "stage": s,
            "pair_in_domain": domain_at(corrected, s, Mode.CORRECTED),
            "filler_present": bad in corrected.cells_up_to(s),
        })
    first_filler = next((r.stage for r in legacy.stage_log if r.kind == "filler"), None)
    legacy_row = {
        "stage": 1,
        "pair_in_domain": b.stages >= 1 and domain_at(legacy, 1, Mode.LEGACY),
        "filled_at_stage": next((r.stage for r in legacy.stage_log if bad in r.cells), None),
    }
    excluded = all(not r["pair_in_domain"] and not r["filler_present"] for r in corrected_rows)
    included = bool(legacy_row["pair_in_domain"]) and first_filler is not None \
        and legacy_row["filled_at_stage"] == first_filler
    return {
        "pair": list(pair),
        "budget": {"max_dim": b.max_dim, "stages": b.stages, "max_term_size": b.max_term_size},
        "corrected": corrected_rows,
        "legacy": legacy_row,
        "corrected_excludes": excluded,
        "legacy_includes": included,
        "ok": excluded and included,
    }
