"""The diagram rewrite engine: locating and firing communication redexes.

A redex is a send node and a receive node of equal arity sitting in the same
top-level parallel multiset, whose subject wires trace back through copy
fan-outs to one shared name source, together with a communication permit
(comm node) in that same multiset.  Without a permit nothing fires, no matter
how many prefixes match: the permit is the control mechanism that keeps the
eager rewriting in step with the calculus.

Firing deletes the matched send/receive pair, feeds the message names and the
receiver's continuation wire into an apply node (whose beta step then inlines
the boxed continuation), and terminates the consumed subject branches with
discards.  The permit survives: it enables the rewrite but is not spent.
With k permits, up to k pairwise-disjoint redexes may fire in one parallel
step.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations

from .diagram import Diagram, Port, normalize, signature
from .translate import TopDiagram


class StaleDiagramRedexError(ValueError):
    """The redex does not (or no longer does) describe the diagram."""


@dataclass(frozen=True)
class DiagramRedex:
    """A firable send/receive pair gated by a specific permit node."""

    output_node: int
    input_node: int
    catalyst: int
    arity: int


def _spine(d: Diagram) -> tuple[int | None, list[int]]:
    """The top parallel node (if any) and the node ids of its components."""
    if len(d.cod) != 1:
        raise StaleDiagramRedexError("top diagram must have a single P output")
    prod = d.producer(("cod", 0))
    if prod[0] != "out":
        raise StaleDiagramRedexError("top output is not produced by a node")
    nid = prod[1]
    if d.nodes[nid].kind != "par":
        return None, [nid]
    comps = []
    for k in range(d.nodes[nid].arity):
        p = d.producer(("in", nid, k))
        if p[0] == "out":
            comps.append(p[1])
    return nid, comps


def trace_subject(d: Diagram, port: Port) -> Port:
    """Follow a name wire backward through copy fan-outs to its source port."""
    while port[0] == "out" and d.nodes[port[1]].kind == "copy":
        port = d.producer(("in", port[1], 0))
    return port


def find_diagram_redexes(td: TopDiagram) -> list[DiagramRedex]:
    """All (send, receive, permit) matches in the top-level multiset."""
    d = td.diagram
    _, comps = _spine(d)
    permits = sorted(c for c in comps if d.nodes[c].kind == "comm")
    if not permits:
        return []
    sends = sorted(c for c in comps if d.nodes[c].kind == "send")
    recvs = sorted(c for c in comps if d.nodes[c].kind == "recv")
    redexes = []
    for o in sends:
        for i in recvs:
            if d.nodes[o].arity != d.nodes[i].arity:
                continue
            so = trace_subject(d, d.producer(("in", o, 0)))
            si = trace_subject(d, d.producer(("in", i, 0)))
            if so == si:
                redexes.append(DiagramRedex(o, i, permits[0], d.nodes[o].arity))
    return redexes


def _check_redex(d: Diagram, r: DiagramRedex) -> None:
    _, comps = _spine(d)
    if (
        r.output_node not in d.nodes
        or r.input_node not in d.nodes
        or d.nodes[r.output_node].kind != "send"
        or d.nodes[r.input_node].kind != "recv"
        or d.nodes[r.output_node].arity != r.arity
        or d.nodes[r.input_node].arity != r.arity
        or r.output_node not in comps
        or r.input_node not in comps
        or r.catalyst not in d.nodes
        or d.nodes[r.catalyst].kind != "comm"
        or r.catalyst not in comps
    ):
        raise StaleDiagramRedexError(f"{r} does not match the diagram")
    so = trace_subject(d, d.producer(("in", r.output_node, 0)))
    si = trace_subject(d, d.producer(("in", r.input_node, 0)))
    if so != si:
        raise StaleDiagramRedexError(f"{r} subjects do not share a source")


def _fire_on(d: Diagram, r: DiagramRedex) -> None:
    """Raw surgery for one redex; caller normalizes afterwards."""
    _check_redex(d, r)
    o, i, n = r.output_node, r.input_node, r.arity
    spine, _ = _spine(d)
    assert spine is not None, "a redex needs at least send, recv and permit"

    hom_prod = d.producer(("in", i, 1))
    arg_prods = [d.producer(("in", o, 1 + t)) for t in range(n)]
    subj_o = d.producer(("in", o, 0))
    subj_i = d.producer(("in", i, 0))

    # detach the pair
    for t in range(1 + n):
        d.disconnect(("in", o, t))
    d.disconnect(("in", i, 0))
    d.disconnect(("in", i, 1))

    # collect remaining spine components, dropping the pair's outputs
    spine_node = d.nodes[spine]
    kept: list[Port] = []
    for k in range(spine_node.arity):
        p = d.producer(("in", spine, k))
        d.disconnect(("in", spine, k))
        if p not in (("out", o, 0), ("out", i, 0)):
            kept.append(p)
    out_cons = d.consumer(("out", spine, 0))
    d.disconnect(out_cons)
    d.remove(spine)
    d.remove(o)
    d.remove(i)

    # the consumed subject branches end in discards (pruned by normalization)
    for subj in (subj_o, subj_i):
        dd = d.add("discard")
        d.connect(subj, ("in", dd, 0))

    ev = d.add("apply", arity=n)
    d.connect(hom_prod, ("in", ev, 0))
    for t, pr in enumerate(arg_prods):
        d.connect(pr, ("in", ev, 1 + t))
    kept.append(("out", ev, 0))

    new_spine = d.add("par", arity=len(kept))
    for k, pr in enumerate(kept):
        d.connect(pr, ("in", new_spine, k))
    d.connect(("out", new_spine, 0), out_cons)


def apply_comm(td: TopDiagram, r: DiagramRedex) -> TopDiagram:
    """Fire one redex; the permit survives and the result is normalized."""
    d = td.diagram.copy()
    _fire_on(d, r)
    norm = normalize(d, scalar_gc=True)
    return TopDiagram(norm, td.name_order, td.catalysts, td.instantiated, signature(norm))


def comm_step(td: TopDiagram) -> list[TopDiagram]:
    """The distinct one-step rewrites of td, deduplicated by diagram equality."""
    out: list[TopDiagram] = []
    for r in find_diagram_redexes(td):
        cand = apply_comm(td, r)
        if not any(_same(cand, seen) for seen in out):
            out.append(cand)
    return out


def _same(a: TopDiagram, b: TopDiagram) -> bool:
    from .translate import top_equal

    return top_equal(a, b)


def count_permits(td: TopDiagram) -> int:
    return sum(1 for node in td.diagram.nodes.values() if node.kind == "comm")


def strip_permits(td: TopDiagram) -> TopDiagram:
    """A copy of td with every communication permit removed (for gating tests)."""
    d = td.diagram.copy()
    for nid in sorted(d.nodes):
        if nid in d.nodes and d.nodes[nid].kind == "comm":
            cons = d.consumer(("out", nid, 0))
            d.disconnect(cons)
            d.remove(nid)
            if cons[0] == "in" and d.nodes[cons[1]].kind == "par":
                _shrink_par_input(d, cons[1], cons[2])
            else:
                # the permit was the whole soup; what remains is inert
                z = d.add("stop")
                d.connect(("out", z, 0), cons)
    norm = normalize(d, scalar_gc=True)
    return TopDiagram(norm, td.name_order, 0, td.instantiated, signature(norm))


def _shrink_par_input(d: Diagram, nid: int, gone: int) -> None:
    node = d.nodes[nid]
    prods = []
    for k in range(node.arity):
        if k == gone:
            continue
        prods.append(d.producer(("in", nid, k)))
        d.disconnect(("in", nid, k))
    out_cons = d.consumer(("out", nid, 0))
    d.disconnect(out_cons)
    d.remove(nid)
    if len(prods) == 1:
        d.connect(prods[0], out_cons)
    elif not prods:
        z = d.add("stop")
        d.connect(("out", z, 0), out_cons)
    else:
        c = d.add("par", arity=len(prods))
        for k, pr in enumerate(prods):
            d.connect(pr, ("in", c, k))
        d.connect(("out", c, 0), out_cons)


def concurrent_step(td: TopDiagram, permits: int | None = None) -> list[tuple[DiagramRedex, ...]]:
    """All maximal sets of pairwise node-disjoint redexes of size <= permits.

    Each set fires jointly in one parallel step; every member is assigned a
    distinct permit node.  With one permit this degenerates to single steps.
    """
    d = td.diagram
    _, comps = _spine(d)
    permit_ids = sorted(c for c in comps if d.nodes[c].kind == "comm")
    k = min(permits if permits is not None else len(permit_ids), len(permit_ids))
    redexes = find_diagram_redexes(td)
    if not redexes or k == 0:
        return []

    def disjoint(rs: tuple[DiagramRedex, ...]) -> bool:
        nodes = [x for r in rs for x in (r.output_node, r.input_node)]
        return len(nodes) == len(set(nodes))

    candidates = []
    for size in range(1, k + 1):
        for combo in combinations(redexes, size):
            if disjoint(combo):
                candidates.append(combo)
    maximal = []
    for combo in candidates:
        extendable = any(
            len(combo) < k and disjoint(combo + (r,))
            for r in redexes
            if r not in combo
        )
        if not extendable:
            assigned = tuple(
                replace(r, catalyst=permit_ids[j]) for j, r in enumerate(combo)
            )
            maximal.append(assigned)
    return maximal


def apply_concurrent(td: TopDiagram, rs: tuple[DiagramRedex, ...]) -> TopDiagram:
    """Fire a set of disjoint redexes jointly, then normalize once."""
    d = td.diagram.copy()
    for r in rs:
        _fire_on(d, r)
    norm = normalize(d, scalar_gc=True)
    return TopDiagram(norm, td.name_order, td.catalysts, td.instantiated, signature(norm))
