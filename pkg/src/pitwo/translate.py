"""Interpretation of process terms as diagrams, and contexts as diagram contexts.

The translation is structurally recursive.  Every free name of a term becomes
one N port of the diagram's domain (in sorted name order); a name used k
times fans out through a copy node, and a name bound but unused ends in a
discard.  Input continuations are boxed into thunks whose message parameters
are designated ports and whose remaining free names enter the box as captured
wires.  Restriction plugs a fresh source into the binder's wire.

The top-level form adds a configurable number of communication permits in
parallel with the translated term and optionally instantiates every free name
with a name-constant node, closing the domain.
"""

from __future__ import annotations

from dataclasses import dataclass

from .diagram import (
    Diagram,
    InterfaceError,
    N,
    P,
    Port,
    _rebuild_fanout,
    _splice,
    isomorphic,
    normalize,
    signature,
)
from .syntax import Hole, Input, Name, New, Output, Par, Process, Stop, free_names


def _route(d: Diagram, src: Port, consumers: list[Port]) -> None:
    _rebuild_fanout(d, src, consumers)


def _merge(into: dict[Name, list[Port]], extra: dict[Name, list[Port]]) -> None:
    for name, ports in extra.items():
        into.setdefault(name, []).extend(ports)


def _emit(p: Process, d: Diagram, hole_names: tuple[Name, ...] | None = None
          ) -> tuple[Port, dict[Name, list[Port]]]:
    """Build p's nodes inside d; returns its P output and open name demands."""
    match p:
        case Stop():
            nid = d.add("stop")
            return ("out", nid, 0), {}
        case Output(subject, args):
            nid = d.add("send", arity=len(args))
            demands: dict[Name, list[Port]] = {}
            _merge(demands, {subject: [("in", nid, 0)]})
            for i, a in enumerate(args):
                _merge(demands, {a: [("in", nid, 1 + i)]})
            return ("out", nid, 0), demands
        case Par(left, right):
            lo, ld = _emit(left, d, hole_names)
            ro, rd = _emit(right, d, hole_names)
            nid = d.add("par", arity=2)
            d.connect(lo, ("in", nid, 0))
            d.connect(ro, ("in", nid, 1))
            _merge(ld, rd)
            return ("out", nid, 0), ld
        case New(binder, body):
            bo, bd = _emit(body, d, hole_names)
            nid = d.add("fresh")
            _route(d, ("out", nid, 0), bd.pop(binder, []))
            return bo, bd
        case Input(subject, params, body):
            inner = Diagram()
            bo, bd = _emit(body, inner, hole_names)
            inner.connect(bo, inner.add_cod(P))
            for y in params:
                _route(inner, inner.add_dom(N), bd.pop(y, []))
            captured = sorted(bd)
            for c in captured:
                _route(inner, inner.add_dom(N), bd.pop(c))
            n = len(params)
            tid = d.add("thunk", arity=n, cap=len(captured), inner=inner)
            rid = d.add("recv", arity=n)
            d.connect(("out", tid, 0), ("in", rid, 1))
            demands = {subject: [("in", rid, 0)]}
            for j, c in enumerate(captured):
                _merge(demands, {c: [("in", tid, j)]})
            return ("out", rid, 0), demands
        case Hole():
            if hole_names is None:
                raise ValueError("holes are only allowed in contexts")
            nid = d.add("hole", arity=len(hole_names))
            demands = {}
            for i, name in enumerate(hole_names):
                _merge(demands, {name: [("in", nid, i)]})
            return ("out", nid, 0), demands
    raise TypeError(f"not a process: {p!r}")


def translate(p: Process) -> Diagram:
    """The diagram of p: domain N^|fn(p)| (sorted name order), codomain P."""
    d = Diagram()
    out, demands = _emit(p, d)
    d.connect(out, d.add_cod(P))
    for name in sorted(free_names(p)):
        _route(d, d.add_dom(N), demands.pop(name))
    assert not demands, f"unrouted names: {sorted(demands)}"
    return d


@dataclass
class TopDiagram:
    """A normalized diagram of a whole running term, permits included."""

    diagram: Diagram
    name_order: tuple[Name, ...]
    catalysts: int
    instantiated: bool
    sig: str

    def __repr__(self) -> str:
        return (
            f"<TopDiagram permits={self.catalysts} names={[n.id for n in self.name_order]} "
            f"{self.diagram!r}>"
        )


def translate_top(p: Process, catalysts: int = 1, instantiate: bool = True) -> TopDiagram:
    """Translate p and compose it with ``catalysts`` communication permits.

    With ``instantiate`` each free name is fed by a name-constant node and the
    domain is closed; otherwise free names stay as domain ports.
    """
    if catalysts < 0:
        raise ValueError("catalyst count must be >= 0")
    d = Diagram()
    out, demands = _emit(p, d)
    parts = [out] + [("out", d.add("comm"), 0) for _ in range(catalysts)]
    if len(parts) == 1:
        top = parts[0]
    else:
        nid = d.add("par", arity=len(parts))
        for k, pr in enumerate(parts):
            d.connect(pr, ("in", nid, k))
        top = ("out", nid, 0)
    d.connect(top, d.add_cod(P))
    names = tuple(sorted(free_names(p)))
    for name in names:
        if instantiate:
            src: Port = ("out", d.add("name", label=name.id), 0)
        else:
            src = d.add_dom(N)
        _route(d, src, demands.pop(name))
    assert not demands
    norm = normalize(d, scalar_gc=True)
    return TopDiagram(norm, names, catalysts, instantiate, signature(norm))


def top_equal(a: TopDiagram, b: TopDiagram) -> bool:
    if a.sig != b.sig:
        return False
    return isomorphic(a.diagram, b.diagram)


# ---------------------------------------------------------------------------
# Contexts


def count_holes(c: Process) -> int:
    match c:
        case Hole():
            return 1
        case Input(_, _, body) | New(_, body):
            return count_holes(body)
        case Par(left, right):
            return count_holes(left) + count_holes(right)
        case _:
            return 0


def plug_term(c: Process, p: Process) -> Process:
    """Fill the hole of c with p.  Capture-permitting by design."""
    match c:
        case Hole():
            return p
        case Input(subject, params, body):
            return Input(subject, params, plug_term(body, p))
        case New(binder, body):
            return New(binder, plug_term(body, p))
        case Par(left, right):
            return Par(plug_term(left, p), plug_term(right, p))
        case _:
            return c


@dataclass
class DiagramContext:
    """A diagram with one hole slot expecting a plug of interface N^k -> P.

    The hole's k inputs are labeled by ``plug_names`` in order; plugging a
    diagram whose domain lists those names in the same order reproduces the
    translation of the syntactically plugged term.
    """

    diagram: Diagram
    plug_names: tuple[Name, ...]
    dom_names: tuple[Name, ...]


def translate_context(c: Process, plug_names: tuple[Name, ...]) -> DiagramContext:
    if count_holes(c) != 1:
        raise ValueError(f"context must contain exactly one hole, found {count_holes(c)}")
    d = Diagram()
    out, demands = _emit(c, d, hole_names=plug_names)
    d.connect(out, d.add_cod(P))
    dom_names = tuple(sorted(demands))
    for name in dom_names:
        _route(d, d.add_dom(N), demands.pop(name))
    return DiagramContext(d, plug_names, dom_names)


def _plug_into(d: Diagram, f: Diagram) -> bool:
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        if node.kind != "hole":
            continue
        k = node.arity
        if list(f.dom) != [N] * k or list(f.cod) != [P]:
            raise InterfaceError(
                f"plug interface mismatch: hole wants N^{k} -> P, got {f!r}"
            )
        prods = [d.producer(("in", nid, j)) for j in range(k)]
        out_cons = d.consumer(("out", nid, 0))
        for j in range(k):
            d.disconnect(("in", nid, j))
        d.disconnect(out_cons)
        d.remove(nid)
        _splice(d, f, prods, [out_cons])
        return True
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        if node.inner is not None and _plug_into(node.inner, f):
            return True
    return False


def plug_diagram(ctx: DiagramContext, f: Diagram) -> Diagram:
    """Apply the context functor to a diagram: splice f into the hole."""
    d = ctx.diagram.copy()
    if not _plug_into(d, f):
        raise ValueError("context diagram has no hole")
    return d
