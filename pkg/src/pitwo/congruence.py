"""Structural congruence decided by canonical forms.

The congruence is the least one containing alpha-equivalence that makes
parallel composition a commutative monoid with unit 0 and satisfies the
restriction laws: dropping a shadowed duplicate binder, swapping adjacent
binders, and extruding a restriction over a parallel sibling.

``canonical_form`` rewrites a term into a unique representative: at every
scope level, restrictions are hoisted outward over parallel composition,
parallel components are flattened into a sorted multiset with inert
components deleted, redundant binders in a restriction chain are pruned, and
binders are relabeled n0, n1, ... in traversal order.  Two terms are congruent
iff their canonical forms are structurally identical.

``oracle_congruent`` is an independent validation path: a breadth-first
closure that applies single axiom steps (in both directions) at arbitrary
subterm positions and tests reachability up to alpha-equivalence.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations

from .syntax import (
    Input,
    Name,
    New,
    Output,
    Par,
    Process,
    Stop,
    all_names,
    free_names,
    fresh_name,
    substitute,
)

# A canonical process is an ordinary Process that canonical_form maps to
# itself; the alias documents intent at use sites.
CanonicalProcess = Process


# ---------------------------------------------------------------------------
# Canonical forms
#
# The computation goes through an intermediate "skeleton": a nested tuple in
# which bound names are de Bruijn-style stack positions and free names are
# literal.  Skeletons are totally ordered by tuple comparison, which gives the
# sorted-multiset normal form; the binder order within each restriction chain
# is chosen to minimize the skeleton over all permutations.


class _Gensym:
    """Fresh, globally distinct placeholder names for renaming binders apart."""

    def __init__(self, taken: set[str]) -> None:
        self.taken = set(taken)
        self.i = 0

    def __call__(self) -> Name:
        while f"g{self.i}" in self.taken:
            self.i += 1
        name = Name(f"g{self.i}")
        self.taken.add(name.id)
        self.i += 1
        return name


def _flatten_level(p: Process, gensym: _Gensym) -> tuple[list[Name], list[Process]]:
    """Hoist and rename apart the restrictions of one scope level.

    Returns the level's binders plus its parallel components (each an Input or
    Output; Stop contributes nothing).  Renaming every hoisted binder to a
    globally fresh name makes extrusion over siblings capture-free.
    """
    match p:
        case Stop():
            return [], []
        case Output() | Input():
            return [], [p]
        case New(binder, body):
            g = gensym()
            binders, comps = _flatten_level(substitute(body, {binder: g}), gensym)
            return [g] + binders, comps
        case Par(left, right):
            bl, cl = _flatten_level(left, gensym)
            br, cr = _flatten_level(right, gensym)
            return bl + br, cl + cr
    raise TypeError(f"not a process: {p!r}")


def _ref(n: Name, env: dict[Name, int]) -> tuple:
    if n in env:
        return ("b", env[n])
    return ("f", n.id)


def _component_skeleton(c: Process, env: dict[Name, int], gensym: _Gensym, gc: bool) -> tuple:
    match c:
        case Output(subject, args):
            return ("out", _ref(subject, env), tuple(_ref(a, env) for a in args))
        case Input(subject, params, body):
            env2 = dict(env)
            base = len(env)
            for i, y in enumerate(params):
                env2[y] = base + i
            return ("in", _ref(subject, env), len(params), _skeleton(body, env2, gensym, gc))
    raise TypeError(f"not a component: {c!r}")


def _skeleton(p: Process, env: dict[Name, int], gensym: _Gensym, gc: bool) -> tuple:
    binders, comps = _flatten_level(p, gensym)
    used = [b for b in binders if any(b in free_names(c) for c in comps)]
    if gc:
        keep = used
    else:
        # A redundant binder is deletable only while the chain holds another
        # restriction, so a chain of vacuous binders keeps exactly one.
        keep = used if used else binders[:1]
    best: tuple | None = None
    for perm in permutations(keep):
        env2 = dict(env)
        base = len(env)
        for i, b in enumerate(perm):
            env2[b] = base + i
        skels = tuple(sorted(_component_skeleton(c, env2, gensym, gc) for c in comps))
        if not keep and len(skels) == 1:
            cand = skels[0]
        elif not keep and not skels:
            cand = ("stop",)
        else:
            cand = ("level", len(keep), skels)
        if best is None or cand < best:
            best = cand
    assert best is not None
    return best


class _Namer:
    """Deterministic binder labels n0, n1, ... skipping the free names."""

    def __init__(self, avoid: frozenset[Name]) -> None:
        self.taken = set(avoid)

    def __call__(self) -> Name:
        n = fresh_name(self.taken)
        self.taken.add(n)
        return n


def _rebuild(skel: tuple, stack: list[Name], namer: _Namer) -> Process:
    tag = skel[0]
    if tag == "stop":
        return Stop()
    if tag == "out":
        _, subj, args = skel
        return Output(_unref(subj, stack), tuple(_unref(a, stack) for a in args))
    if tag == "in":
        _, subj, n, body = skel
        params = [namer() for _ in range(n)]
        return Input(_unref(subj, stack), tuple(params), _rebuild(body, stack + params, namer))
    if tag == "level":
        _, k, comps = skel
        binders = [namer() for _ in range(k)]
        stack2 = stack + binders
        parts = [_rebuild(c, stack2, namer) for c in comps]
        if not parts:
            core: Process = Stop()
        else:
            core = parts[0]
            for part in parts[1:]:
                core = Par(core, part)
        for b in reversed(binders):
            core = New(b, core)
        return core
    raise ValueError(f"bad skeleton tag: {tag!r}")


def _unref(ref: tuple, stack: list[Name]) -> Name:
    kind, payload = ref
    if kind == "b":
        return stack[payload]
    return Name(payload)


@lru_cache(maxsize=None)
def canonical_form(p: Process, gc_vacuous: bool = False) -> CanonicalProcess:
    """The canonical representative of p's congruence class.

    With ``gc_vacuous`` every restriction whose binder is unused is deleted;
    by default only the redundancy expressible with the chain laws is (a lone
    vacuous restriction such as (new x)0 survives).
    """
    gensym = _Gensym({n.id for n in all_names(p)})
    skel = _skeleton(p, {}, gensym, gc_vacuous)
    return _rebuild(skel, [], _Namer(free_names(p)))


def congruent(p: Process, q: Process, gc_vacuous: bool = False) -> bool:
    """Decide structural congruence via canonical form equality."""
    return canonical_form(p, gc_vacuous) == canonical_form(q, gc_vacuous)


# ---------------------------------------------------------------------------
# Brute-force axiom closure (validation oracle)


def term_size(p: Process) -> int:
    match p:
        case Stop() | Output():
            return 1
        case Input(_, _, body) | New(_, body):
            return 1 + term_size(body)
        case Par(left, right):
            return 1 + term_size(left) + term_size(right)
    raise TypeError(f"not a process: {p!r}")


def alpha_key(p: Process) -> tuple:
    """A hashable key equal for exactly the alpha-equivalent terms."""

    def go(p: Process, env: dict[Name, int], d: int) -> tuple:
        match p:
            case Stop():
                return ("0",)
            case Output(subject, args):
                return ("!", _ref(subject, env), tuple(_ref(a, env) for a in args))
            case Input(subject, params, body):
                env2 = {**env, **{y: d + i for i, y in enumerate(params)}}
                return ("?", _ref(subject, env), len(params), go(body, env2, d + len(params)))
            case New(binder, body):
                return ("nu", go(body, {**env, binder: d}, d + 1))
            case Par(left, right):
                return ("|", go(left, env, d), go(right, env, d))
        raise TypeError(f"not a process: {p!r}")

    return go(p, {}, 0)


def _root_moves(p: Process):
    match p:
        case Par(a, b):
            yield Par(b, a)
            if isinstance(a, Par):
                yield Par(a.left, Par(a.right, b))
            if isinstance(b, Par):
                yield Par(Par(a, b.left), b.right)
            if isinstance(b, Stop):
                yield a
            if isinstance(a, New):
                x, inner = a.binder, a.body
                if x in free_names(b):
                    x2 = fresh_name(free_names(a) | free_names(b) | {x})
                    inner = substitute(inner, {x: x2})
                    x = x2
                yield New(x, Par(inner, b))
        case New(x, body):
            yield New(x, New(x, body))
            if isinstance(body, New):
                if x not in free_names(body):
                    yield body
                if body.binder != x:
                    yield New(body.binder, New(x, body.body))
            if isinstance(body, Par) and x not in free_names(body.right):
                yield Par(New(x, body.left), body.right)
    yield Par(p, Stop())


def _axiom_neighbors(p: Process):
    yield from _root_moves(p)
    match p:
        case Par(left, right):
            for l2 in _axiom_neighbors(left):
                yield Par(l2, right)
            for r2 in _axiom_neighbors(right):
                yield Par(left, r2)
        case New(binder, body):
            for b2 in _axiom_neighbors(body):
                yield New(binder, b2)
        case Input(subject, params, body):
            for b2 in _axiom_neighbors(body):
                yield Input(subject, params, b2)
        case _:
            pass


def congruence_closure_keys(p: Process, size_cap: int, max_depth: int = 10**9) -> frozenset[tuple]:
    """Alpha-keys of every term reachable from p by axiom steps within the cap."""
    start = alpha_key(p)
    seen = {start}
    frontier = [p]
    depth = 0
    while frontier and depth < max_depth:
        depth += 1
        nxt = []
        for t in frontier:
            for t2 in _axiom_neighbors(t):
                if term_size(t2) > size_cap:
                    continue
                k = alpha_key(t2)
                if k not in seen:
                    seen.add(k)
                    nxt.append(t2)
        frontier = nxt
    return frozenset(seen)


def oracle_congruent(p: Process, q: Process, depth: int, size_cap: int | None = None) -> bool:
    """True iff q is reachable from p, up to alpha, within ``depth`` axiom steps.

    Intermediate terms are capped at max(|p|, |q|) + 1 nodes (or ``size_cap``),
    which keeps the search finite; with enough depth the verdict coincides
    with ``congruent``.
    """
    target = alpha_key(q)
    if alpha_key(p) == target:
        return True
    cap = size_cap if size_cap is not None else max(term_size(p), term_size(q)) + 1
    keys = congruence_closure_keys(p, cap, max_depth=depth)
    return target in keys
