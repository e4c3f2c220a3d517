"""Observables (barbs) and barbed bisimulation on finite reduction graphs.

A barb is an unguarded output on a free channel: inputs are unobservable, so
an observer cannot tell whether a sent message was consumed.  Bisimilarity is
the greatest symmetric relation that matches single reduction steps and
preserves barb sets; it is computed by partition refinement over the union of
the two reachability graphs, starting from the partition induced by barb sets.

``weak=True`` switches to reflexive-transitive matching (a step may be
answered by any number of steps, and barbs are compared after any number of
steps).  It is exploratory and intentionally conservative; the primary
relation is the strong one.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Hashable, Sequence

from .congruence import canonical_form
from .opsem import reachable, reduce_step
from .syntax import Input, Name, New, Output, Par, Process, Stop, pretty

BarbSet = frozenset[Name]


@lru_cache(maxsize=None)
def barbs(p: Process) -> BarbSet:
    """The channels on which p offers an unguarded output, minus restricted ones."""
    match p:
        case Stop() | Input():
            return frozenset()
        case Output(subject, _):
            return frozenset({subject})
        case Par(left, right):
            return barbs(left) | barbs(right)
        case New(binder, body):
            return barbs(body) - {binder}
    raise TypeError(f"not a process: {p!r}")


def partition_refine(succ: Sequence[Sequence[int]], labels: Sequence[Hashable]) -> list[int]:
    """Coarsest partition compatible with state labels and one-step moves.

    States start in blocks given by their labels and are split until each
    block's members reach exactly the same set of blocks.  Returns a block id
    per state; two states are strongly bisimilar iff they share a block.
    """
    ids: dict[Hashable, int] = {}
    blocks = [ids.setdefault(lab, len(ids)) for lab in labels]
    while True:
        sigs = [
            (blocks[i], frozenset(blocks[j] for j in succ[i]))
            for i in range(len(blocks))
        ]
        fresh: dict[tuple, int] = {}
        nxt = [fresh.setdefault(sig, len(fresh)) for sig in sigs]
        if len(fresh) == len(set(blocks)):
            return nxt
        blocks = nxt


def reduction_union(ps: Sequence[Process], max_states: int = 10_000) -> tuple[list[Process], dict[Process, int], list[list[int]]]:
    """Shared reachability LTS of several terms: states, index, successor lists."""
    return _union_lts(ps, max_states)


def _union_lts(ps: Sequence[Process], max_states: int) -> tuple[list[Process], dict[Process, int], list[list[int]]]:
    states: list[Process] = []
    index: dict[Process, int] = {}
    for p in ps:
        root = canonical_form(p)
        if root in index:
            continue
        graph = reachable(root, max_states=max_states)
        for s in graph.states:
            if s not in index:
                index[s] = len(states)
                states.append(s)
    succ = [
        sorted(index[t] for t in reduce_step(s))
        for s in states
    ]
    return states, index, succ


def bisimilar(p: Process, q: Process, max_states: int = 10_000, weak: bool = False) -> bool:
    verdict, _ = bisimilarity_verdict(p, q, max_states=max_states, weak=weak)
    return verdict


def bisimilarity_verdict(
    p: Process, q: Process, max_states: int = 10_000, weak: bool = False
) -> tuple[bool, str | None]:
    """Verdict plus, on failure, a human-readable distinguishing certificate."""
    states, index, succ = _union_lts([p, q], max_states)
    i, j = index[canonical_form(p)], index[canonical_form(q)]
    if weak:
        reach = _reach_closure(succ)
        succ_w = [sorted(set(t for s2 in reach[s] for t in succ[s2])) for s in range(len(states))]
        labels = [frozenset(x for s2 in reach[s] for x in barbs(states[s2])) for s in range(len(states))]
        related = _gfp_bisim(succ, succ_w, labels)
        same = related(i, j)
        return same, None if same else _weak_certificate(states, i, j)
    labels = [barbs(s) for s in states]
    blocks = partition_refine(succ, labels)
    if blocks[i] == blocks[j]:
        return True, None
    return False, _certificate(states, succ, blocks, i, j, depth=4)


def _certificate(states, succ, blocks, i, j, depth: int) -> str:
    bi, bj = barbs(states[i]), barbs(states[j])
    if bi != bj:
        extra = sorted(bi ^ bj)[0]
        alone = states[i] if extra in bi else states[j]
        other = states[j] if extra in bi else states[i]
        return f"barb {extra}: observable at {pretty(alone)} but not at {pretty(other)}"
    for a, b in ((i, j), (j, i)):
        for s2 in succ[a]:
            if all(blocks[s2] != blocks[t2] for t2 in succ[b]):
                msg = (
                    f"{pretty(states[a])} can step to {pretty(states[s2])}, "
                    f"which {pretty(states[b])} cannot match"
                )
                if depth > 0 and succ[b]:
                    t2 = succ[b][0]
                    msg += "; " + _certificate(states, succ, blocks, s2, t2, depth - 1)
                return msg
    return "states separated by refinement"


def _reach_closure(succ: Sequence[Sequence[int]]) -> list[set[int]]:
    n = len(succ)
    reach = [set([i]) for i in range(n)]
    changed = True
    while changed:
        changed = False
        for i in range(n):
            new = set(reach[i])
            for j in list(reach[i]):
                new |= set(succ[j])
            if new != reach[i]:
                reach[i] = new
                changed = True
    return reach


def _gfp_bisim(succ, succ_w, labels):
    """Greatest fixpoint over the full relation lattice, weak matching."""
    n = len(succ)
    rel = {(i, j) for i in range(n) for j in range(n) if labels[i] == labels[j]}
    changed = True
    while changed:
        changed = False
        for i, j in list(rel):
            ok = all(any((a, b) in rel for b in [j] + list(succ_w[j])) for a in succ[i]) and all(
                any((b, a) in rel for a in [i] + list(succ_w[i])) for b in succ[j]
            )
            if not ok:
                rel.discard((i, j))
                changed = True
    return lambda i, j: (i, j) in rel


def _weak_certificate(states, i, j) -> str:
    return (
        f"no weak bisimulation relates {pretty(states[i])} and {pretty(states[j])}"
    )
