"""Command-line entry point.

Exit codes: 0 success or empty report, 1 violations found, 2 usage or
input errors.
"""
from __future__ import annotations

import argparse
import sys
from collections import Counter

from . import serialize
from .collection import validate_tgraph
from .composition import adjoin_composites, check_composites, composition_system
from .contraction import (
    Contraction, Mode, adjoin_contractions, contraction_domain, is_contractible,
    validate_contraction,
)
from .freegen import (
    Budget, Fragment, StageRecord, batanin_b0_fragment, fragment_stats,
    free_contractible_tcategory, joyal_regression, validate_fragment,
)
from .trees import enumerate_trees, size


class UsageError(Exception):
    pass


def _emit(obj, out=None, kind=None):
    text = serialize.dumps(serialize.Artifact(kind, obj) if kind else obj)
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_graph_and_contraction(path):
    art = serialize.load(path)
    if art.kind == "tgraph":
        return art.payload, Contraction(), None
    if art.kind == "fragment":
        return art.payload.graph, art.payload.contraction, art.payload
    raise UsageError(f"{path}: expected a tgraph or fragment, got {art.kind}")


def _next_stage(frag):
    if frag is None or not frag.stage_log:
        return 1
    return max(r.stage for r in frag.stage_log) + 1


def cmd_validate(args):
    art = serialize.load(args.file)
    if art.kind == "tgraph":
        violations = validate_tgraph(art.payload)
        if art.payload.is_pointed and not violations:
            violations = check_composites(art.payload)
    elif art.kind == "fragment":
        violations = validate_fragment(art.payload)
    else:
        raise UsageError(f"{args.file}: cannot validate a {art.kind}")
    _emit(serialize.report_to_json(violations), args.out, "report")
    return 1 if violations else 0


def cmd_domain(args):
    g, _, _ = _load_graph_and_contraction(args.file)
    problems = validate_tgraph(g)
    if problems:
        _emit(serialize.report_to_json(problems), args.out, "report")
        return 1
    pairs = contraction_domain(g, args.k, Mode(args.mode))
    _emit({"k": args.k, "mode": args.mode, "pairs": [list(p) for p in pairs]}, args.out, "report")
    return 0


def cmd_check_contraction(args):
    g, c, frag = _load_graph_and_contraction(args.file)
    if args.contraction:
        art = serialize.load(args.contraction)
        if art.kind != "contraction":
            raise UsageError(f"{args.contraction}: expected a contraction")
        c = art.payload
    mode = Mode(args.mode or (frag.mode if frag else "corrected"))
    violations = validate_contraction(g, c, mode)
    if args.max_dim is not None:
        violations += is_contractible(g, c, args.max_dim, mode)
    _emit(serialize.report_to_json(violations), args.out, "report")
    return 1 if violations else 0


def cmd_contract(args):
    g, c, frag = _load_graph_and_contraction(args.file)
    stage = _next_stage(frag)
    g2, c2 = adjoin_contractions(g, c, args.max_dim, Mode(args.mode), stage=stage)
    added = tuple(x.id for x in g2.cells if x.id not in g)
    log = (frag.stage_log if frag else ()) + (StageRecord(stage, "filler", added),)
    _emit(Fragment(g2, c2, log, Mode(args.mode)), args.out)
    return 0


def cmd_comp_system(args):
    colours = [f"c{i}" for i in range(args.colours)]
    _emit(composition_system(colours, args.max_dim), args.out)
    return 0


def cmd_compose(args):
    g, c, frag = _load_graph_and_contraction(args.file)
    stage = _next_stage(frag)
    g2 = adjoin_composites(g, args.max_dim, args.max_size, stage=stage)
    added = tuple(x.id for x in g2.cells if x.id not in g)
    log = (frag.stage_log if frag else ()) + (StageRecord(stage, "composite", added),)
    _emit(Fragment(g2, c, log, frag.mode if frag else Mode.CORRECTED), args.out)
    return 0


def cmd_generate(args):
    budget = Budget(args.max_dim, args.stages, args.max_size)
    mode = Mode(args.mode)
    if args.b0:
        frag = batanin_b0_fragment(budget, mode)
    else:
        g, c, _ = _load_graph_and_contraction(args.input)
        frag = free_contractible_tcategory(g, budget, mode, c)
    _emit(frag, args.out)
    return 0


def cmd_stats(args):
    art = serialize.load(args.file)
    if art.kind == "tgraph":
        frag = Fragment(art.payload)
    elif art.kind == "fragment":
        frag = art.payload
    else:
        raise UsageError(f"{args.file}: expected a tgraph or fragment")
    _emit(fragment_stats(frag), args.out, "stats")
    return 0


def cmd_joyal(args):
    report = joyal_regression(Budget(args.max_dim, args.stages, args.max_size))
    _emit(report, args.out, "report")
    return 0 if report["ok"] else 1


def cmd_count_trees(args):
    ts = enumerate_trees(args.max_height, args.max_nodes)
    by_nodes = Counter(str(size(t)) for t in ts)
    _emit({"max_height": args.max_height, "max_nodes": args.max_nodes, "total": len(ts),
           "by_nodes": dict(sorted(by_nodes.items(), key=lambda kv: int(kv[0])))},
          args.out, "report")
    return 0


def _nat(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"{v} is negative")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="contractile", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    modes = [m.value for m in Mode]

    def command(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        sp.add_argument("--out", help="write the artifact here instead of stdout")
        return sp

    sp = command("validate", cmd_validate, "validate a T-graph or fragment file")
    sp.add_argument("file")

    sp = command("domain", cmd_domain, "list the contraction domain at level k")
    sp.add_argument("file")
    sp.add_argument("--k", type=_nat, required=True)
    sp.add_argument("--mode", choices=modes, default="corrected")

    sp = command("check-contraction", cmd_check_contraction, "check the contraction axioms")
    sp.add_argument("file")
    sp.add_argument("--contraction", help="separate contraction file")
    sp.add_argument("--mode", choices=modes)
    sp.add_argument("--max-dim", type=_nat, help="also require totality below this level")

    sp = command("contract", cmd_contract, "run one free-contraction stage")
    sp.add_argument("file")
    sp.add_argument("--max-dim", type=_nat, required=True)
    sp.add_argument("--mode", choices=modes, default="corrected")

    sp = command("comp-system", cmd_comp_system, "emit the composition-system T-graph")
    sp.add_argument("--colours", type=_nat, required=True)
    sp.add_argument("--max-dim", type=_nat, required=True)

    sp = command("compose", cmd_compose, "run one free-composite stage")
    sp.add_argument("file")
    sp.add_argument("--max-dim", type=_nat, required=True)
    sp.add_argument("--max-size", type=_nat, required=True)

    sp = command("generate", cmd_generate, "run the interleaved free construction")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--input")
    src.add_argument("--b0", action="store_true", help="start from the one-colour composition system")
    sp.add_argument("--max-dim", type=_nat, required=True)
    sp.add_argument("--stages", type=_nat, required=True)
    sp.add_argument("--max-size", type=_nat, required=True)
    sp.add_argument("--mode", choices=modes, default="corrected")

    sp = command("stats", cmd_stats, "per-stage statistics of a fragment")
    sp.add_argument("file")

    sp = command("joyal", cmd_joyal, "run the loop-restriction regression")
    sp.add_argument("--max-dim", type=_nat, default=2)
    sp.add_argument("--stages", type=_nat, default=4)
    sp.add_argument("--max-size", type=_nat, default=2)

    sp = command("count-trees", cmd_count_trees, "count planar trees within bounds")
    sp.add_argument("--max-height", type=_nat, required=True)
    sp.add_argument("--max-nodes", type=_nat, required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "comp-system" and args.colours < 1:
        print("error: --colours must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except (UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
