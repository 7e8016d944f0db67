"""Canonical JSON artifacts.

Every file is ``{"version", "kind", "payload"}`` printed with sorted keys,
two-space indent and a trailing newline, so ``dumps(loads(text)) == text``
for any file this module wrote.
"""
from __future__ import annotations

import json
from typing import Any, Dict, List, NamedTuple

from .collection import Cell, Provenance, TGraph, Violation
from .composition import Term, TermError
from .contraction import Contraction, ContractionError, Mode
from .freegen import Fragment, StageRecord
from .trees import TreeCell, TreeError

FORMAT_VERSION = "contractile/1"
KINDS = ("tgraph", "contraction", "fragment", "report", "stats", "term")


class ArtifactError(ValueError):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location
        self.message = message


class Artifact(NamedTuple):
    kind: str
    payload: Any


# -- encoding ----------------------------------------------------------------------


def provenance_to_json(p: Provenance) -> dict:
    d: Dict[str, Any] = {"kind": p.kind}
    if p.term is not None:
        d["term"] = p.term.to_json()
    if p.left is not None:
        d["left"], d["right"], d["k"] = p.left, p.right, p.k
    if p.stage is not None:
        d["stage"] = p.stage
    return d


def cell_to_json(c: Cell) -> dict:
    return {
        "id": c.id,
        "dim": c.dim,
        "src": c.src,
        "tgt": c.tgt,
        "arity": c.arity.to_json(),
        "out": c.out,
        "provenance": provenance_to_json(c.provenance),
    }


def tgraph_to_json(g: TGraph) -> dict:
    pointing = None
    if g.pointing is not None:
        pointing = {f"{colour}:{n}": cid for (colour, n), cid in g.pointing.items()}
    return {"colours": list(g.colours), "cells": [cell_to_json(c) for c in g.cells],
            "pointing": pointing}


def fragment_to_json(f: Fragment) -> dict:
    return {
        "graph": tgraph_to_json(f.graph),
        "contraction": f.contraction.to_json(),
        "stage_log": [{"stage": r.stage, "kind": r.kind, "cells": list(r.cells)}
                      for r in f.stage_log],
        "mode": Mode(f.mode).value,
    }


def report_to_json(violations: List[Violation], **extra) -> dict:
    d = {"ok": not violations,
         "violations": [v._asdict() for v in violations]}
    d.update(extra)
    return d


def encode(obj) -> Artifact:
    if isinstance(obj, Artifact):
        if isinstance(obj.payload, (dict, list)):
            return obj
        return Artifact(obj.kind, encode(obj.payload).payload)
    if isinstance(obj, TGraph):
        return Artifact("tgraph", tgraph_to_json(obj))
    if isinstance(obj, Fragment):
        return Artifact("fragment", fragment_to_json(obj))
    if isinstance(obj, Contraction):
        return Artifact("contraction", obj.to_json())
    if isinstance(obj, Term):
        return Artifact("term", obj.to_json())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    art = encode(obj)
    doc = {"version": FORMAT_VERSION, "kind": art.kind, "payload": art.payload}
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


# -- decoding ----------------------------------------------------------------------


def _need(d: dict, key: str, where: str, types=None):
    if not isinstance(d, dict):
        raise ArtifactError(where, "expected an object")
    if key not in d:
        raise ArtifactError(where, f"missing {key!r} field")
    v = d[key]
    if types is not None and not isinstance(v, types):
        raise ArtifactError(where, f"field {key!r} has the wrong type")
    return v


CELL_KEYS = {"id", "dim", "src", "tgt", "arity", "out", "provenance"}


def provenance_from_json(d, where: str) -> Provenance:
    kind = _need(d, "kind", where, str)
    term = None
    if "term" in d:
        try:
            term = Term.from_json(d["term"])
        except (TermError, TreeError) as exc:
            raise ArtifactError(where, f"bad term: {exc}") from None
    return Provenance(kind, term, d.get("left"), d.get("right"), d.get("k"), d.get("stage"))


def cell_from_json(d, where: str) -> Cell:
    cid = _need(d, "id", where, str)
    where = f"{where} (cell {cid})"
    unknown = set(d) - CELL_KEYS
    if unknown:
        raise ArtifactError(where, f"unknown fields {sorted(unknown)}")
    dim = _need(d, "dim", where, int)
    arity = _need(d, "arity", where, dict)
    try:
        arity = TreeCell.from_json(arity)
    except (KeyError, TreeError, TypeError, ValueError) as exc:
        raise ArtifactError(where, f"bad arity: {exc}") from None
    for key in ("src", "tgt"):
        if key in d and d[key] is not None and not isinstance(d[key], str):
            raise ArtifactError(where, f"field {key!r} has the wrong type")
    out = _need(d, "out", where, str)
    prov = provenance_from_json(d.get("provenance", {"kind": "generator"}), where)
    return Cell(cid, dim, d.get("src"), d.get("tgt"), arity, out, prov)


def tgraph_from_json(d, where: str = "payload") -> TGraph:
    colours = _need(d, "colours", where, list)
    raw = _need(d, "cells", where, list)
    cells = [cell_from_json(c, f"{where}.cells[{i}]") for i, c in enumerate(raw)]
    pointing = d.get("pointing")
    parsed = None
    if pointing is not None:
        if not isinstance(pointing, dict):
            raise ArtifactError(f"{where}.pointing", "expected an object")
        parsed = {}
        for key, cid in pointing.items():
            colour, sep, n = key.rpartition(":")
            if not sep or not n.isdigit():
                raise ArtifactError(f"{where}.pointing", f"bad key {key!r}, expected 'colour:n'")
            parsed[(colour, int(n))] = cid
    return TGraph([str(c) for c in colours], cells, parsed)


def contraction_from_json(d, where: str = "payload") -> Contraction:
    if not isinstance(d, list):
        raise ArtifactError(where, "expected a list of entries")
    for i, e in enumerate(d):
        for key in ("k", "left", "right", "cell"):
            _need(e, key, f"{where}[{i}]")
    try:
        return Contraction.from_json(d)
    except (ContractionError, ValueError) as exc:
        raise ArtifactError(where, str(exc)) from None


def fragment_from_json(d, where: str = "payload") -> Fragment:
    g = tgraph_from_json(_need(d, "graph", where, dict), f"{where}.graph")
    c = contraction_from_json(_need(d, "contraction", where, list), f"{where}.contraction")
    log = []
    for i, r in enumerate(_need(d, "stage_log", where, list)):
        loc = f"{where}.stage_log[{i}]"
        log.append(StageRecord(_need(r, "stage", loc, int), _need(r, "kind", loc, str),
                               tuple(_need(r, "cells", loc, list))))
    try:
        mode = Mode(d.get("mode", "corrected"))
    except ValueError:
        raise ArtifactError(f"{where}.mode", f"unknown mode {d.get('mode')!r}") from None
    return Fragment(g, c, tuple(log), mode)


def parse(text) -> Artifact:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"line {exc.lineno} column {exc.colno}", f"malformed JSON: {exc.msg}") from None
    version = _need(doc, "version", "document", str)
    if version != FORMAT_VERSION:
        raise ArtifactError("document.version", f"unknown version {version!r}")
    kind = _need(doc, "kind", "document", str)
    payload = _need(doc, "payload", "document")
    if kind == "tgraph":
        return Artifact(kind, tgraph_from_json(payload))
    if kind == "fragment":
        return Artifact(kind, fragment_from_json(payload))
    if kind == "contraction":
        return Artifact(kind, contraction_from_json(payload))
    if kind == "term":
        try:
            return Artifact(kind, Term.from_json(payload))
        except (TermError, TreeError) as exc:
            raise ArtifactError("payload", str(exc)) from None
    if kind in ("report", "stats"):
        return Artifact(kind, payload)
    raise ArtifactError("document.kind", f"unknown kind {kind!r}")


def loads(text):
    return parse(text).payload


def load(path) -> Artifact:
    with open(path, "rb") as fh:
        return parse(fh.read())


def dump(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
