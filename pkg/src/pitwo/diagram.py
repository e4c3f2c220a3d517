"""Typed port-graphs: the 1-morphisms of the diagrammatic process semantics.

A diagram is an acyclic graph of generator nodes with typed ports, together
with an ordered domain/codomain interface.  Wires carry one of three types:
channel names (N), processes (P), or packaged continuations (N^n -o P).  The
generators:

    copy      N -> N^k        duplicate a name (k-way fan-out)
    discard   N -> I          drop a name
    par       P^k -> P        parallel composition (multiset node)
    stop      I -> P          the inert process
    send n    N x N^n -> P    output particle: subject plus n message names
    recv n    N x (N^n -o P) -> P   input prefix: subject plus continuation
    fresh     I -> N          a private channel source
    comm      I -> P          the communication permit consumed by no rewrite
    name x    I -> N          a global channel constant
    thunk     N^c -> (N^n -o P)     a boxed continuation with c captured names
    apply n   (N^n -o P) x N^n -> P  feed message names to a continuation
    hole      N^k -> P        plug position of a diagram context

Wire crossings are not represented, so diagrams equal modulo the symmetric
monoidal equations are identical by construction.  ``normalize`` additionally
quotients by the parallel-composition monoid laws, the copy/discard comonoid
laws, the beta step (apply over thunk), and optionally deletion of closed
name sources that end in a discard.  ``equal`` compares normal forms up to
port-graph isomorphism, with an iterative-refinement hash as a fast filter.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence, Union


# ---------------------------------------------------------------------------
# Object expressions


@dataclass(frozen=True)
class NameT:
    def __str__(self) -> str:
        return "N"


@dataclass(frozen=True)
class ProcT:
    def __str__(self) -> str:
        return "P"


@dataclass(frozen=True)
class HomT:
    """The continuation type N^arity -o P."""

    arity: int

    def __str__(self) -> str:
        return f"N^{self.arity}-oP"


@dataclass(frozen=True)
class UnitT:
    def __str__(self) -> str:
        return "I"


@dataclass(frozen=True)
class TensorT:
    items: tuple["ObjectExpr", ...]

    def __str__(self) -> str:
        return "(" + " . ".join(str(i) for i in self.items) + ")"


WireType = Union[NameT, ProcT, HomT]
ObjectExpr = Union[NameT, ProcT, HomT, UnitT, TensorT]

N = NameT()
P = ProcT()
I = UnitT()


def tensor_type(*items: ObjectExpr) -> ObjectExpr:
    """Flatten a tensor of object expressions, dropping units."""
    flat: list[WireType] = []
    for it in items:
        flat.extend(interface_of(it))
    if not flat:
        return I
    if len(flat) == 1:
        return flat[0]
    return TensorT(tuple(flat))


def interface_of(obj: ObjectExpr) -> tuple[WireType, ...]:
    """The ordered atomic wire types of an object expression."""
    if isinstance(obj, UnitT):
        return ()
    if isinstance(obj, TensorT):
        out: list[WireType] = []
        for it in obj.items:
            out.extend(interface_of(it))
        return tuple(out)
    return (obj,)


# ---------------------------------------------------------------------------
# Nodes and ports


class DiagramError(ValueError):
    pass


class InterfaceError(DiagramError):
    pass


@dataclass
class Node:
    kind: str
    arity: int = 0
    cap: int = 0
    label: str = ""
    inner: "Diagram | None" = None

    def ports(self) -> tuple[tuple[WireType, ...], tuple[WireType, ...]]:
        k = self.kind
        n = self.arity
        if k == "copy":
            return (N,), (N,) * n
        if k == "discard":
            return (N,), ()
        if k == "par":
            return (P,) * n, (P,)
        if k == "stop":
            return (), (P,)
        if k == "send":
            return (N,) * (1 + n), (P,)
        if k == "recv":
            return (N, HomT(n)), (P,)
        if k == "fresh":
            return (), (N,)
        if k == "comm":
            return (), (P,)
        if k == "name":
            return (), (N,)
        if k == "thunk":
            return (N,) * self.cap, (HomT(n),)
        if k == "apply":
            return (HomT(n),) + (N,) * n, (P,)
        if k == "hole":
            return (N,) * n, (P,)
        raise DiagramError(f"unknown generator kind: {k!r}")

    def clone(self) -> "Node":
        return Node(self.kind, self.arity, self.cap, self.label,
                    self.inner.copy() if self.inner is not None else None)


# Port groups whose order is quotiented away (commutative par, cocommutative
# copy): their wires compare as multisets.
_UNORDERED = {("par", "in"), ("copy", "out")}

Port = tuple  # ('in', nid, k) | ('out', nid, k) | ('dom', k) | ('cod', k)


def _port_class(diagram: "Diagram", port: Port) -> int:
    side, a, *rest = port
    if side in ("dom", "cod"):
        return a
    nid, k = a, rest[0]
    if (diagram.nodes[nid].kind, side) in _UNORDERED:
        return -1
    return k


class Diagram:
    """A mutable builder treated as immutable once handed out.

    All public operations (compose, tensor, normalize, ...) copy their
    arguments; nothing mutates a diagram a caller still holds.
    """

    def __init__(self) -> None:
        self.nodes: dict[int, Node] = {}
        self.dom: list[WireType] = []
        self.cod: list[WireType] = []
        self._next = 0
        self._dst: dict[Port, Port] = {}
        self._src: dict[Port, Port] = {}

    # -- construction ------------------------------------------------------

    def add(self, kind: str, arity: int = 0, cap: int = 0, label: str = "",
            inner: "Diagram | None" = None) -> int:
        nid = self._next
        self._next += 1
        self.nodes[nid] = Node(kind, arity, cap, label, inner)
        return nid

    def add_dom(self, t: WireType) -> Port:
        self.dom.append(t)
        return ("dom", len(self.dom) - 1)

    def add_cod(self, t: WireType) -> Port:
        self.cod.append(t)
        return ("cod", len(self.cod) - 1)

    def port_type(self, port: Port) -> WireType:
        side = port[0]
        if side == "dom":
            return self.dom[port[1]]
        if side == "cod":
            return self.cod[port[1]]
        _, nid, k = port
        ins, outs = self.nodes[nid].ports()
        return ins[k] if side == "in" else outs[k]

    def connect(self, src: Port, dst: Port) -> None:
        if src[0] not in ("out", "dom") or dst[0] not in ("in", "cod"):
            raise DiagramError(f"bad wire direction {src} -> {dst}")
        if src in self._dst or dst in self._src:
            raise DiagramError(f"port already wired: {src} -> {dst}")
        if self.port_type(src) != self.port_type(dst):
            raise InterfaceError(
                f"type mismatch on wire {src}:{self.port_type(src)} -> {dst}:{self.port_type(dst)}"
            )
        self._dst[src] = dst
        self._src[dst] = src

    def disconnect(self, dst: Port) -> Port:
        """Remove the wire into consumer port dst; returns its producer."""
        src = self._src.pop(dst)
        del self._dst[src]
        return src

    def remove(self, nid: int) -> None:
        node = self.nodes.pop(nid)
        ins, outs = node.ports()
        for k in range(len(ins)):
            assert ("in", nid, k) not in self._src, "removing a wired node"
        for k in range(len(outs)):
            assert ("out", nid, k) not in self._dst, "removing a wired node"

    # -- queries -----------------------------------------------------------

    def producer(self, dst: Port) -> Port:
        return self._src[dst]

    def consumer(self, src: Port) -> Port:
        return self._dst[src]

    def wires(self) -> Iterator[tuple[Port, Port]]:
        return iter(sorted(self._dst.items()))

    def node_count(self) -> int:
        return len(self.nodes)

    def in_ports(self, nid: int) -> list[Port]:
        ins, _ = self.nodes[nid].ports()
        return [("in", nid, k) for k in range(len(ins))]

    def out_ports(self, nid: int) -> list[Port]:
        _, outs = self.nodes[nid].ports()
        return [("out", nid, k) for k in range(len(outs))]

    def copy(self) -> "Diagram":
        d = Diagram()
        d.nodes = {nid: node.clone() for nid, node in self.nodes.items()}
        d.dom = list(self.dom)
        d.cod = list(self.cod)
        d._next = self._next
        d._dst = dict(self._dst)
        d._src = dict(self._src)
        return d

    def validate(self) -> None:
        """Check the port-graph invariants: total wiring, typing, acyclicity."""
        for nid in self.nodes:
            for p in self.in_ports(nid):
                if p not in self._src:
                    raise DiagramError(f"unwired port {p}")
            for p in self.out_ports(nid):
                if p not in self._dst:
                    raise DiagramError(f"unwired port {p}")
        for k in range(len(self.dom)):
            if ("dom", k) not in self._dst:
                raise DiagramError(f"unwired domain port {k}")
        for k in range(len(self.cod)):
            if ("cod", k) not in self._src:
                raise DiagramError(f"unwired codomain port {k}")
        for src, dst in self._dst.items():
            if self.port_type(src) != self.port_type(dst):
                raise InterfaceError(f"ill-typed wire {src} -> {dst}")
        # acyclicity over node-to-node wires
        succ: dict[int, set[int]] = {nid: set() for nid in self.nodes}
        for src, dst in self._dst.items():
            if src[0] == "out" and dst[0] == "in":
                succ[src[1]].add(dst[1])
        seen: dict[int, int] = {}

        def visit(v: int) -> None:
            seen[v] = 1
            for w in succ[v]:
                state = seen.get(w)
                if state == 1:
                    raise DiagramError("cycle through node %d" % w)
                if state is None:
                    visit(w)
            seen[v] = 2

        for v in self.nodes:
            if v not in seen:
                visit(v)
        for node in self.nodes.values():
            if node.inner is not None:
                node.inner.validate()

    def __repr__(self) -> str:
        dom = " . ".join(str(t) for t in self.dom) or "I"
        cod = " . ".join(str(t) for t in self.cod) or "I"
        return f"<Diagram {dom} -> {cod}, {len(self.nodes)} nodes, {len(self._dst)} wires>"


# ---------------------------------------------------------------------------
# Categorical structure


def empty() -> Diagram:
    return Diagram()


def identity(types: Sequence[WireType]) -> Diagram:
    d = Diagram()
    for t in types:
        src = d.add_dom(t)
        dst = d.add_cod(t)
        d.connect(src, dst)
    return d


def permutation(types: Sequence[WireType], perm: Sequence[int]) -> Diagram:
    """Wires domain position i to codomain position perm[i]."""
    if sorted(perm) != list(range(len(types))):
        raise InterfaceError(f"not a permutation: {perm}")
    d = Diagram()
    for t in types:
        d.add_dom(t)
    out_types: list[WireType] = [N] * len(types)
    for i, j in enumerate(perm):
        out_types[j] = types[i]
    for t in out_types:
        d.add_cod(t)
    for i, j in enumerate(perm):
        d.connect(("dom", i), ("cod", j))
    return d


def generator(kind: str, arity: int = 0, cap: int = 0, label: str = "",
              inner: Diagram | None = None) -> Diagram:
    """A single generator node with its canonical interface."""
    d = Diagram()
    nid = d.add(kind, arity, cap, label, inner)
    ins, outs = d.nodes[nid].ports()
    for k, t in enumerate(ins):
        d.connect(d.add_dom(t), ("in", nid, k))
    for k, t in enumerate(outs):
        d.connect(("out", nid, k), d.add_cod(t))
    return d


def _splice(d: Diagram, sub: Diagram, dom_prods: list[Port], cod_cons: list[Port]) -> None:
    """Inline a copy of sub into d, gluing its boundary to the given ports."""
    mapping: dict[int, int] = {}
    for nid, node in sorted(sub.nodes.items()):
        mapping[nid] = d.add(node.kind, node.arity, node.cap, node.label,
                             node.inner.copy() if node.inner is not None else None)

    def msrc(p: Port) -> Port:
        if p[0] == "dom":
            return dom_prods[p[1]]
        return ("out", mapping[p[1]], p[2])

    def mdst(p: Port) -> Port:
        if p[0] == "cod":
            return cod_cons[p[1]]
        return ("in", mapping[p[1]], p[2])

    for src, dst in sub.wires():
        d.connect(msrc(src), mdst(dst))


def compose(f: Diagram, g: Diagram) -> Diagram:
    """Plug f's codomain into g's domain."""
    if f.cod != g.dom:
        raise InterfaceError(f"cannot compose {f!r} with {g!r}")
    h = f.copy()
    mid_prods = [h.disconnect(("cod", k)) for k in range(len(h.cod))]
    h.cod = []
    cod_cons = [h.add_cod(t) for t in g.cod]
    # keep the freshly added cod ports as consumer targets
    cod_ports = [("cod", k) for k in range(len(g.cod))]
    _splice(h, g, mid_prods, cod_ports)
    return h


def tensor(f: Diagram, g: Diagram) -> Diagram:
    """Place f and g side by side; interfaces concatenate."""
    h = f.copy()
    dom_prods = [h.add_dom(t) for t in g.dom]
    cod_cons = [h.add_cod(t) for t in g.cod]
    _splice(h, g, dom_prods, cod_cons)
    return h


def curry(arity: int, body: Diagram) -> Diagram:
    """Box a continuation body into a thunk of the given message arity.

    The body must produce a single P and consume N wires only; the first
    ``arity`` domain ports are the message parameters, the rest are captured
    names that become inputs of the thunk node.
    """
    if list(body.cod) != [P]:
        raise InterfaceError("thunk body must produce a single P")
    if any(t != N for t in body.dom):
        raise InterfaceError("thunk body must consume N wires only")
    if len(body.dom) < arity:
        raise InterfaceError(f"body has {len(body.dom)} ports, needs >= {arity}")
    cap = len(body.dom) - arity
    return generator("thunk", arity=arity, cap=cap, inner=body.copy())


def apply_ev(thunk: Diagram, args: Diagram) -> Diagram:
    """Feed args (producing N^n) to a continuation (producing N^n -o P)."""
    if len(thunk.cod) != 1 or not isinstance(thunk.cod[0], HomT):
        raise InterfaceError("first argument must produce a continuation wire")
    n = thunk.cod[0].arity
    if list(args.cod) != [N] * n:
        raise InterfaceError(f"arity mismatch: continuation wants {n} names")
    return compose(tensor(thunk, args), generator("apply", arity=n))


# ---------------------------------------------------------------------------
# Normalization


def _rule_beta(d: Diagram) -> bool:
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        if node.kind != "apply":
            continue
        hom = d.producer(("in", nid, 0))
        if hom[0] != "out" or d.nodes[hom[1]].kind != "thunk":
            continue
        t = hom[1]
        tnode = d.nodes[t]
        n, cap = node.arity, tnode.cap
        arg_prods = [d.producer(("in", nid, 1 + i)) for i in range(n)]
        cap_prods = [d.producer(("in", t, j)) for j in range(cap)]
        out_cons = d.consumer(("out", nid, 0))
        for i in range(n + 1):
            d.disconnect(("in", nid, i))
        for j in range(cap):
            d.disconnect(("in", t, j))
        d.disconnect(out_cons)
        d.remove(nid)
        d.remove(t)
        assert tnode.inner is not None
        _splice(d, tnode.inner, arg_prods + cap_prods, [out_cons])
        return True
    return False


def _rebuild_fanin(d: Diagram, prods: list[Port], out_cons: Port) -> None:
    """Wire a list of P producers into out_cons through a par node if needed."""
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


def _rule_par(d: Diagram) -> bool:
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        if node.kind != "par":
            continue
        prods = [d.producer(("in", nid, k)) for k in range(node.arity)]
        fold = any(
            p[0] == "out" and d.nodes[p[1]].kind in ("par", "stop") for p in prods
        )
        if not fold and node.arity >= 2:
            continue
        out_cons = d.consumer(("out", nid, 0))
        new_prods: list[Port] = []
        doomed: list[int] = []
        for p in prods:
            d.disconnect(d.consumer(p))
            if p[0] == "out" and d.nodes[p[1]].kind == "stop":
                doomed.append(p[1])
            elif p[0] == "out" and d.nodes[p[1]].kind == "par":
                sub = p[1]
                for k in range(d.nodes[sub].arity):
                    q = d.producer(("in", sub, k))
                    d.disconnect(("in", sub, k))
                    new_prods.append(q)
                doomed.append(sub)
            else:
                new_prods.append(p)
        d.disconnect(out_cons)
        d.remove(nid)
        for x in doomed:
            d.remove(x)
        _rebuild_fanin(d, new_prods, out_cons)
        return True
    return False


def _rebuild_fanout(d: Diagram, in_prod: Port, cons: list[Port]) -> None:
    """Wire a name producer to a list of N consumers through a copy if needed."""
    if len(cons) == 1:
        d.connect(in_prod, cons[0])
    elif not cons:
        dd = d.add("discard")
        d.connect(in_prod, ("in", dd, 0))
    else:
        c = d.add("copy", arity=len(cons))
        d.connect(in_prod, ("in", c, 0))
        for k, cn in enumerate(cons):
            d.connect(("out", c, k), cn)


def _rule_copy(d: Diagram) -> bool:
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        if node.kind != "copy":
            continue
        consumers = [d.consumer(("out", nid, k)) for k in range(node.arity)]
        fold = any(
            c[0] == "in" and d.nodes[c[1]].kind in ("copy", "discard") for c in consumers
        )
        if not fold and node.arity >= 2:
            continue
        in_prod = d.producer(("in", nid, 0))
        d.disconnect(("in", nid, 0))
        new_cons: list[Port] = []
        doomed = []
        for c in consumers:
            d.disconnect(c)
            if c[0] == "in" and d.nodes[c[1]].kind == "discard":
                doomed.append(c[1])
            elif c[0] == "in" and d.nodes[c[1]].kind == "copy":
                sub = c[1]
                for k in range(d.nodes[sub].arity):
                    q = d.consumer(("out", sub, k))
                    d.disconnect(q)
                    new_cons.append(q)
                doomed.append(sub)
            else:
                new_cons.append(c)
        d.remove(nid)
        for x in doomed:
            d.remove(x)
        _rebuild_fanout(d, in_prod, new_cons)
        return True
    return False


def _rule_scalar_gc(d: Diagram) -> bool:
    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        if node.kind not in ("name", "fresh"):
            continue
        cons = d.consumer(("out", nid, 0))
        if cons[0] == "in" and d.nodes[cons[1]].kind == "discard":
            d.disconnect(cons)
            d.remove(nid)
            d.remove(cons[1])
            return True
    return False


def normalize(d: Diagram, scalar_gc: bool = True) -> Diagram:
    """Confluent normal form under the diagram equations.

    Flattens par and copy trees into single multiset nodes, deletes stop
    units and discard-terminated copy branches, fires every apply-over-thunk
    beta step, and (by default) deletes closed name sources that are
    immediately discarded.  Idempotent and terminating.
    """
    h = d.copy()
    for node in h.nodes.values():
        if node.inner is not None:
            node.inner = normalize(node.inner, scalar_gc)
    progress = True
    while progress:
        progress = (
            _rule_beta(h)
            or _rule_par(h)
            or _rule_copy(h)
            or (scalar_gc and _rule_scalar_gc(h))
        )
    return h


# ---------------------------------------------------------------------------
# Canonical hashing and equality


def _hash(payload: object) -> str:
    return hashlib.sha256(repr(payload).encode()).hexdigest()[:16]


def _peer_desc(d: Diagram, colors: dict[int, str], port: Port) -> tuple:
    if port[0] in ("dom", "cod"):
        return (port[0], port[1])
    return (colors[port[1]], _port_class(d, port))


def _wl_colors(d: Diagram) -> dict[int, str]:
    colors = {
        nid: _hash(("node", node.kind, node.arity, node.cap, node.label,
                    signature(node.inner) if node.inner is not None else ""))
        for nid, node in d.nodes.items()
    }
    for _ in range(len(d.nodes) + 2):
        nxt = {}
        for nid in d.nodes:
            ins = sorted(
                (_port_class(d, p), _peer_desc(d, colors, d.producer(p)))
                for p in d.in_ports(nid)
            )
            outs = sorted(
                (_port_class(d, p), _peer_desc(d, colors, d.consumer(p)))
                for p in d.out_ports(nid)
            )
            nxt[nid] = _hash((colors[nid], tuple(ins), tuple(outs)))
        if len(set(nxt.values())) == len(set(colors.values())) and all(
            nxt[a] == nxt[b]
            for a in d.nodes
            for b in d.nodes
            if colors[a] == colors[b]
        ):
            colors = nxt
            break
        colors = nxt
    return colors


def signature(d: Diagram) -> str:
    """A run-stable canonical hash; isomorphic diagrams hash equally."""
    colors = _wl_colors(d)
    wires = sorted(
        (_peer_desc(d, colors, src), _peer_desc(d, colors, dst), str(d.port_type(src)))
        for src, dst in d.wires()
    )
    payload = (
        tuple(str(t) for t in d.dom),
        tuple(str(t) for t in d.cod),
        tuple(sorted(colors.values())),
        tuple(wires),
    )
    return _hash(payload)


def _mapped_wires(d: Diagram, mapping: dict[int, int]) -> Counter:
    def desc(port: Port) -> tuple:
        if port[0] in ("dom", "cod"):
            return (port[0], port[1])
        side, nid, k = port
        return (side, mapping[nid], _port_class(d, port))

    return Counter(
        (desc(src), desc(dst), str(d.port_type(src))) for src, dst in d.wires()
    )


def _identity_wires(d: Diagram) -> Counter:
    return _mapped_wires(d, {nid: nid for nid in d.nodes})


def isomorphic(a: Diagram, b: Diagram) -> bool:
    """Exact interfaced port-graph isomorphism (expects normalized inputs)."""
    if a.dom != b.dom or a.cod != b.cod:
        return False
    if len(a.nodes) != len(b.nodes) or len(a._dst) != len(b._dst):
        return False
    ca, cb = _wl_colors(a), _wl_colors(b)
    if sorted(ca.values()) != sorted(cb.values()):
        return False
    by_color: dict[str, list[int]] = {}
    for nid, c in cb.items():
        by_color.setdefault(c, []).append(nid)
    a_order = sorted(a.nodes, key=lambda nid: (ca[nid], nid))
    target = _identity_wires(b)

    def compatible(x: int, y: int) -> bool:
        na, nb = a.nodes[x], b.nodes[y]
        if (na.kind, na.arity, na.cap, na.label) != (nb.kind, nb.arity, nb.cap, nb.label):
            return False
        if (na.inner is None) != (nb.inner is None):
            return False
        if na.inner is not None and not isomorphic(na.inner, nb.inner):
            return False
        return True

    mapping: dict[int, int] = {}
    used: set[int] = set()

    def assign(i: int) -> bool:
        if i == len(a_order):
            return _mapped_wires(a, mapping) == target
        x = a_order[i]
        for y in by_color.get(ca[x], []):
            if y in used or not compatible(x, y):
                continue
            mapping[x] = y
            used.add(y)
            if assign(i + 1):
                return True
            del mapping[x]
            used.discard(y)
        return False

    return assign(0)


def equal(d1: Diagram, d2: Diagram, scalar_gc: bool = True) -> bool:
    """Diagram equality: isomorphism of normal forms."""
    n1 = normalize(d1, scalar_gc)
    n2 = normalize(d2, scalar_gc)
    if signature(n1) != signature(n2):
        return False
    return isomorphic(n1, n2)


# ---------------------------------------------------------------------------
# Export


def _stable_ids(d: Diagram) -> dict[int, int]:
    colors = _wl_colors(d)
    order = sorted(d.nodes, key=lambda nid: (colors[nid], nid))
    return {nid: i for i, nid in enumerate(order)}


def to_json(d: Diagram) -> dict:
    ids = _stable_ids(d)

    def end(port: Port) -> list:
        if port[0] in ("dom", "cod"):
            return [port[0], port[1]]
        return [port[0], ids[port[1]], port[2]]

    nodes = []
    for nid in sorted(d.nodes, key=lambda n: ids[n]):
        node = d.nodes[nid]
        entry: dict = {"id": ids[nid], "kind": node.kind}
        if node.arity:
            entry["arity"] = node.arity
        if node.cap:
            entry["captured"] = node.cap
        if node.label:
            entry["label"] = node.label
        if node.inner is not None:
            entry["inner"] = to_json(node.inner)
        nodes.append(entry)
    wires = [
        {"from": end(src), "to": end(dst), "type": str(d.port_type(src))}
        for src, dst in sorted(d.wires(), key=lambda w: (end(w[0]), end(w[1])))
    ]
    return {
        "dom": [str(t) for t in d.dom],
        "cod": [str(t) for t in d.cod],
        "nodes": nodes,
        "wires": wires,
    }


_DOT_LABELS = {
    "copy": "copy", "discard": "discard", "par": "|", "stop": "0",
    "send": "!", "recv": "?", "fresh": "fresh", "comm": "COMM",
    "name": "name", "thunk": "thunk", "apply": "ev", "hole": "[ ]",
}


def to_dot(d: Diagram) -> str:
    ids = _stable_ids(d)
    lines = ["digraph diagram {", "  rankdir=TB;"]
    for k in range(len(d.dom)):
        lines.append(f'  dom{k} [shape=point, xlabel="dom{k}"];')
    for k in range(len(d.cod)):
        lines.append(f'  cod{k} [shape=point, xlabel="cod{k}"];')
    for nid in sorted(d.nodes, key=lambda n: ids[n]):
        node = d.nodes[nid]
        base = _DOT_LABELS.get(node.kind, node.kind)
        label = base
        if node.kind in ("send", "recv", "apply", "thunk") and node.arity is not None:
            label = f"{base}{node.arity}"
        if node.kind == "name":
            label = node.label
        if node.kind == "thunk" and node.inner is not None:
            label += f" [{len(node.inner.nodes)} inner]"
        lines.append(f'  n{ids[nid]} [label="{label}", shape=ellipse];')

    def end(port: Port) -> str:
        if port[0] == "dom":
            return f"dom{port[1]}"
        if port[0] == "cod":
            return f"cod{port[1]}"
        return f"n{ids[port[1]]}"

    for src, dst in d.wires():
        lines.append(f'  {end(src)} -> {end(dst)} [label="{d.port_type(src)}"];')
    lines.append("}")
    return "\n".join(lines)


def dumps(d: Diagram) -> str:
    return json.dumps(to_json(d), indent=2, sort_keys=True)
