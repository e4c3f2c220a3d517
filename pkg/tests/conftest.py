"""Shared strategies and independent oracle implementations for the tests.

The oracles here deliberately re-derive results through a different route
than the library code: naive inductive reduction, rename-apart substitution,
and a greatest-fixpoint bisimulation over the full relation lattice.
"""

from __future__ import annotations

import random

import hypothesis.strategies as st
from hypothesis import HealthCheck, settings

settings.register_profile(
    "pitwo",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("pitwo")

from pitwo.bisim import barbs, reduction_union
from pitwo.congruence import _axiom_neighbors, alpha_key, canonical_form, term_size
from pitwo.syntax import (
    Input,
    Name,
    New,
    Output,
    Par,
    Process,
    Stop,
    all_names,
    substitute,
)

POOL = tuple(Name(c) for c in "abxyu")


def name_st():
    return st.sampled_from(POOL)


def process_st(max_leaves: int = 6):
    base = st.one_of(
        st.just(Stop()),
        st.builds(
            lambda s, a: Output(s, tuple(a)),
            name_st(),
            st.lists(name_st(), max_size=2),
        ),
    )

    def extend(children):
        return st.one_of(
            st.builds(Par, children, children),
            st.builds(New, name_st(), children),
            st.builds(
                lambda s, ps, b: Input(s, tuple(ps), b),
                name_st(),
                st.lists(name_st(), max_size=2, unique=True),
                children,
            ),
        )

    return st.recursive(base, extend, max_leaves=max_leaves)


def random_term(rng: random.Random, size: int, names=POOL) -> Process:
    """Deterministic raw term of the exact AST size (for stratified corpora)."""
    if size <= 1:
        if rng.random() < 0.3:
            return Stop()
        ar = rng.randint(0, 1)
        return Output(rng.choice(names), tuple(rng.choice(names) for _ in range(ar)))
    shape = rng.choice(["input", "new", "par"] if size >= 3 else ["input", "new"])
    if shape == "input":
        ar = rng.randint(0, 1)
        params = tuple({rng.choice(names)}) if ar else ()
        return Input(rng.choice(names), params, random_term(rng, size - 1, names))
    if shape == "new":
        return New(rng.choice(names), random_term(rng, size - 1, names))
    ls = rng.randint(1, size - 2)
    return Par(random_term(rng, ls, names), random_term(rng, size - 1 - ls, names))


# ---------------------------------------------------------------------------
# Independent reduction oracle: the four inference rules applied inductively.


def naive_raw_step(p: Process) -> list[Process]:
    """Successors by the axiom and the two structural context rules only."""
    out: list[Process] = []
    match p:
        case Par(Input(x, ys, body), Output(x2, zs)) if x == x2 and len(ys) == len(zs):
            out.append(substitute(body, dict(zip(ys, zs))))
    match p:
        case Par(left, right):
            out.extend(Par(l2, right) for l2 in naive_raw_step(left))
        case New(binder, body):
            out.extend(New(binder, b2) for b2 in naive_raw_step(body))
        case _:
            pass
    return out


def congruence_class_terms(p: Process, slack: int = 1) -> list[Process]:
    """One representative term per alpha-class reachable by axiom steps."""
    cap = term_size(p) + slack
    seen = {alpha_key(p)}
    frontier = [p]
    reps = [p]
    while frontier:
        nxt = []
        for t in frontier:
            for t2 in _axiom_neighbors(t):
                if term_size(t2) > cap:
                    continue
                k = alpha_key(t2)
                if k not in seen:
                    seen.add(k)
                    nxt.append(t2)
                    reps.append(t2)
        frontier = nxt
    return reps


def naive_reduce_step(p: Process) -> frozenset[Process]:
    """Reduction closed under congruence on both sides, computed brute-force."""
    out = set()
    for variant in congruence_class_terms(p):
        for q in naive_raw_step(variant):
            out.add(canonical_form(q))
    return frozenset(out)


# ---------------------------------------------------------------------------
# Substitution oracle: rename every binder apart, then replace textually.


def rename_binders_apart(p: Process, taken: set[Name]) -> Process:
    counter = [0]

    def gensym() -> Name:
        while True:
            cand = Name(f"r{counter[0]}")
            counter[0] += 1
            if cand not in taken:
                taken.add(cand)
                return cand

    def go(p: Process, ren: dict[Name, Name]) -> Process:
        match p:
            case Stop():
                return p
            case Output(s, args):
                return Output(ren.get(s, s), tuple(ren.get(a, a) for a in args))
            case Par(l, r):
                return Par(go(l, ren), go(r, ren))
            case New(b, body):
                nb = gensym()
                return New(nb, go(body, {**ren, b: nb}))
            case Input(s, params, body):
                nps = []
                ren2 = dict(ren)
                for y in params:
                    ny = gensym()
                    ren2[y] = ny
                    nps.append(ny)
                return Input(ren.get(s, s), tuple(nps), go(body, ren2))
        raise TypeError(p)

    return go(p, {})


def textual_replace(p: Process, mapping: dict[Name, Name]) -> Process:
    match p:
        case Stop():
            return p
        case Output(s, args):
            return Output(mapping.get(s, s), tuple(mapping.get(a, a) for a in args))
        case Par(l, r):
            return Par(textual_replace(l, mapping), textual_replace(r, mapping))
        case New(b, body):
            return New(mapping.get(b, b), textual_replace(body, mapping))
        case Input(s, params, body):
            return Input(
                mapping.get(s, s),
                tuple(mapping.get(y, y) for y in params),
                textual_replace(body, mapping),
            )
    raise TypeError(p)


def substitution_oracle(p: Process, mapping: dict[Name, Name]) -> Process:
    taken = set(all_names(p)) | set(mapping) | set(mapping.values())
    apart = rename_binders_apart(p, taken)
    return textual_replace(apart, mapping)


# ---------------------------------------------------------------------------
# Greatest-fixpoint bisimilarity over the full relation lattice.


def gfp_bisimilar(p: Process, q: Process) -> bool:
    states, index, succ = reduction_union([p, q])
    labels = [barbs(s) for s in states]
    n = len(states)
    rel = {(i, j) for i in range(n) for j in range(n) if labels[i] == labels[j]}
    changed = True
    while changed:
        changed = False
        for i, j in sorted(rel):
            ok = all(any((a, b) in rel for b in succ[j]) for a in succ[i]) and all(
                any((a, b) in rel for a in succ[i]) for b in succ[j]
            )
            if not ok:
                rel.discard((i, j))
                changed = True
    return (index[canonical_form(p)], index[canonical_form(q)]) in rel
