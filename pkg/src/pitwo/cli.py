"""Command-line front end.

Terms are given inline or as ``@path`` to read a file.  Every command prints
human-readable text by default and structured JSON with ``--json``.  Exit
codes: 0 on success or a passing verdict, 1 on a negative verdict, failed
verification, or exhausted budget, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from . import diagram as dg
from .bisim import barbs, bisimilarity_verdict
from .congruence import canonical_form, congruent
from .harness import VERIFIERS, CorpusSpec, DESK_SPEC, SMALL_SPEC
from .opsem import StateBudgetError, reachable, reduce_step
from .rewrite import (
    StaleDiagramRedexError,
    apply_comm,
    concurrent_step,
    find_diagram_redexes,
)
from .syntax import ParseError, parse, pretty, to_json
from .translate import translate, translate_top


def _read_term(arg: str):
    if arg.startswith("@"):
        with open(arg[1:], encoding="utf-8") as fh:
            return parse(fh.read())
    return parse(arg)


def _emit(args, text: str, payload) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _diagram_output(args, d) -> None:
    if getattr(args, "dot", False):
        print(dg.to_dot(d))
    elif args.json:
        print(json.dumps(dg.to_json(d), indent=2, sort_keys=True))
    else:
        print(repr(d))
        print(dg.dumps(d))


def cmd_parse(args) -> int:
    p = _read_term(args.term)
    _emit(args, pretty(p), {"term": pretty(p), "ast": to_json(p)})
    return 0


def cmd_fn(args) -> int:
    from .syntax import free_names

    p = _read_term(args.term)
    names = sorted(n.id for n in free_names(p))
    _emit(args, " ".join(names) if names else "(none)", {"free_names": names})
    return 0


def cmd_canon(args) -> int:
    p = _read_term(args.term)
    c = canonical_form(p, gc_vacuous=args.gc_vacuous)
    _emit(args, pretty(c), {"canonical": pretty(c), "ast": to_json(c)})
    return 0


def cmd_equiv(args) -> int:
    p = _read_term(args.term)
    q = _read_term(args.other)
    same = congruent(p, q, gc_vacuous=args.gc_vacuous)
    _emit(args, "congruent" if same else "not congruent", {"congruent": same})
    return 0 if same else 1


def cmd_step(args) -> int:
    p = _read_term(args.term)
    succs = sorted(reduce_step(p), key=pretty)
    text = "\n".join(pretty(s) for s in succs) if succs else "(no reductions)"
    _emit(args, text, {"term": pretty(p), "successors": [pretty(s) for s in succs]})
    return 0


def cmd_run(args) -> int:
    p = _read_term(args.term)
    graph = reachable(p, max_states=args.max_states)
    data = graph.to_json()
    lines = [f"{len(graph.states)} states, {len(graph.edges)} edges"]
    lines += [f"  [{i}] {s}" for i, s in enumerate(data["states"])]
    lines += [f"  {i} -> {j}" for i, j in data["edges"]]
    _emit(args, "\n".join(lines), data)
    return 0


def cmd_barbs(args) -> int:
    p = _read_term(args.term)
    names = sorted(n.id for n in barbs(p))
    _emit(args, " ".join(names) if names else "(none)", {"barbs": names})
    return 0


def cmd_bisim(args) -> int:
    p = _read_term(args.term)
    q = _read_term(args.other)
    same, certificate = bisimilarity_verdict(p, q, max_states=args.max_states, weak=args.weak)
    text = "bisimilar" if same else f"not bisimilar\n{certificate}"
    _emit(args, text, {"bisimilar": same, "certificate": certificate})
    return 0 if same else 1


def cmd_translate(args) -> int:
    p = _read_term(args.term)
    if args.top or args.comm_tokens != 1:
        td = translate_top(p, catalysts=args.comm_tokens, instantiate=not args.open)
        _diagram_output(args, td.diagram)
    else:
        _diagram_output(args, translate(p))
    return 0


def _redex_payload(r) -> dict:
    return {
        "output_node": r.output_node,
        "input_node": r.input_node,
        "catalyst": r.catalyst,
        "arity": r.arity,
    }


def cmd_redexes(args) -> int:
    p = _read_term(args.term)
    td = translate_top(p, catalysts=args.comm_tokens, instantiate=True)
    rs = find_diagram_redexes(td)
    lines = [
        f"[{i}] send node {r.output_node} with recv node {r.input_node} "
        f"(arity {r.arity}, permit {r.catalyst})"
        for i, r in enumerate(rs)
    ]
    _emit(args, "\n".join(lines) if lines else "(no redexes)",
          {"redexes": [_redex_payload(r) for r in rs]})
    return 0


def cmd_crewrite(args) -> int:
    p = _read_term(args.term)
    td = translate_top(p, catalysts=args.comm_tokens, instantiate=True)
    rs = find_diagram_redexes(td)
    if not 0 <= args.index < len(rs):
        print(f"error: redex index {args.index} out of range (found {len(rs)})", file=sys.stderr)
        return 1
    after = apply_comm(td, rs[args.index])
    _diagram_output(args, after.diagram)
    return 0


def cmd_concurrent(args) -> int:
    p = _read_term(args.term)
    td = translate_top(p, catalysts=args.comm_tokens, instantiate=True)
    steps = concurrent_step(td, args.comm_tokens)
    lines = []
    for i, rs in enumerate(steps):
        inner = ", ".join(f"({r.output_node},{r.input_node})@{r.catalyst}" for r in rs)
        lines.append(f"[{i}] fires {len(rs)} redexes: {inner}")
    payload = {"steps": [[_redex_payload(r) for r in rs] for rs in steps]}
    _emit(args, "\n".join(lines) if lines else "(no joint steps)", payload)
    return 0


def cmd_verify(args) -> int:
    verifier = VERIFIERS[args.lemma]
    if args.names is not None or args.max_size is not None:
        base = SMALL_SPEC if args.lemma == "congruence" else DESK_SPEC
        spec = CorpusSpec(
            name_alphabet_size=args.names if args.names is not None else base.name_alphabet_size,
            max_prefixes=args.max_size if args.max_size is not None else base.max_prefixes,
            max_arity=base.max_arity,
            max_parallel_width=base.max_parallel_width,
            allow_new=base.allow_new,
        )
        report = verifier(spec)
    else:
        report = verifier()
    _emit(args, report.summary(), report.to_json())
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pitwo",
        description="dual-semantics pi-calculus workbench (terms and diagrams)",
    )
    ap.add_argument("--json", action="store_true", help="emit JSON instead of text")
    sub = ap.add_subparsers(dest="command", required=True)

    def term_cmd(name: str, help_: str, two: bool = False) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("term", help="a term, or @path to read one from a file")
        if two:
            sp.add_argument("other", help="second term, or @path")
        return sp

    term_cmd("parse", "parse a term and print it back")
    term_cmd("fn", "free names of a term")
    sp = term_cmd("canon", "canonical form modulo structural congruence")
    sp.add_argument("--gc-vacuous", action="store_true",
                    help="also delete restrictions whose binder is unused")
    sp = term_cmd("equiv", "decide structural congruence", two=True)
    sp.add_argument("--gc-vacuous", action="store_true")
    term_cmd("step", "one-step reduction successors")
    sp = term_cmd("run", "explore the full reduction graph")
    sp.add_argument("--max-states", type=int, default=10_000)
    term_cmd("barbs", "observable output channels")
    sp = term_cmd("bisim", "barbed bisimilarity verdict", two=True)
    sp.add_argument("--max-states", type=int, default=10_000)
    sp.add_argument("--weak", action="store_true", help="reflexive-transitive matching")
    sp = term_cmd("translate", "diagram of a term")
    sp.add_argument("--top", action="store_true", help="add permits and instantiate names")
    sp.add_argument("--open", action="store_true", help="keep free names as open ports")
    sp.add_argument("--comm-tokens", type=int, default=1, metavar="K")
    sp.add_argument("--dot", action="store_true", help="emit Graphviz DOT")
    sp = term_cmd("redexes", "diagram redexes of the top form")
    sp.add_argument("--comm-tokens", type=int, default=1, metavar="K")
    sp = term_cmd("crewrite", "apply one diagram rewrite")
    sp.add_argument("--index", type=int, required=True, metavar="I")
    sp.add_argument("--comm-tokens", type=int, default=1, metavar="K")
    sp.add_argument("--dot", action="store_true")
    sp = term_cmd("concurrent", "maximal joint rewrite steps")
    sp.add_argument("--comm-tokens", type=int, default=2, metavar="K")
    sp = sub.add_parser("verify", help="run a verification suite")
    sp.add_argument("--lemma", required=True, choices=sorted(VERIFIERS))
    sp.add_argument("--names", type=int, default=None, metavar="N",
                    help="name alphabet size for the corpus")
    sp.add_argument("--max-size", type=int, default=None, metavar="S",
                    help="prefix budget for the corpus")
    sp.add_argument("--jobs", type=int, default=1, metavar="J",
                    help="accepted for interface stability; runs single-process")
    return ap


_HANDLERS = {
    "parse": cmd_parse,
    "fn": cmd_fn,
    "canon": cmd_canon,
    "equiv": cmd_equiv,
    "step": cmd_step,
    "run": cmd_run,
    "barbs": cmd_barbs,
    "bisim": cmd_bisim,
    "translate": cmd_translate,
    "redexes": cmd_redexes,
    "crewrite": cmd_crewrite,
    "concurrent": cmd_concurrent,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    seed = os.environ.get("PITWO_SEED")
    if seed is not None:
        random.seed(seed)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _HANDLERS[args.command](args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (StateBudgetError, StaleDiagramRedexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
