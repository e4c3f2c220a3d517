"""Exhaustive desk-scale verification of the two-semantics correspondences.

The harness enumerates bounded term corpora, runs both the operational and
the diagrammatic semantics over them, and reports any disagreement:

  * reduction:   operational successors vs. one-step diagram rewrites
  * observation: syntactic barbs vs. observable sends in the diagram
  * full abstraction: barbed bisimilarity vs. its diagram-side counterpart
  * contexts:    plugging then translating vs. translating then plugging,
                 and contextual-congruence verdicts on both sides

These are finite checks, not proofs: a pass certifies the property on every
term (or pair, or context) within the corpus bounds.  Reports are
deterministic given the corpus specification and serialize to JSON with
replayable counterexamples.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product

from .bisim import barbs, partition_refine, reduction_union
from .congruence import canonical_form
from .opsem import reduce_step
from .rewrite import _spine, comm_step, find_diagram_redexes, strip_permits, trace_subject
from .syntax import Hole, Input, Name, New, Output, Par, Process, Stop, free_names, pretty
from .translate import (
    TopDiagram,
    plug_diagram,
    plug_term,
    top_equal,
    translate,
    translate_context,
    translate_top,
)
from .diagram import Diagram, P, _splice, equal, normalize, signature


# ---------------------------------------------------------------------------
# Corpora


@dataclass(frozen=True)
class CorpusSpec:
    """Bounds for term enumeration; every bound keeps the corpus finite."""

    name_alphabet_size: int = 2
    max_prefixes: int = 4
    max_arity: int = 1
    max_parallel_width: int = 4
    allow_new: bool = True


DESK_SPEC = CorpusSpec()
SMALL_SPEC = CorpusSpec(name_alphabet_size=2, max_prefixes=2, max_arity=1,
                        max_parallel_width=2, allow_new=True)


def _prefix_counts(p: Process) -> tuple[int, int]:
    match p:
        case Stop() | Hole():
            return 0, 0
        case Output():
            return 0, 1
        case Input(_, _, body):
            i, o = _prefix_counts(body)
            return i + 1, o
        case New(_, body):
            return _prefix_counts(body)
        case Par(left, right):
            li, lo = _prefix_counts(left)
            ri, ro = _prefix_counts(right)
            return li + ri, lo + ro
    raise TypeError(f"not a process: {p!r}")


def _continuations(spec: CorpusSpec, names: tuple[Name, ...], ins: int, outs: int):
    """Input continuation bodies: at most one further prefix, curated shapes.

    Yields (body, input_count, output_count).  The shapes cover the phenomena
    the corpora must exercise (name passing, private counterparts, guarded
    inputs) without the combinatorial blowup of arbitrary nesting.
    """
    yield Stop(), 0, 0
    if spec.allow_new:
        nu = Name("w9")
        yield New(nu, Stop()), 0, 0
        if outs >= 1:
            for ar in range(spec.max_arity + 1):
                for args in product(names + (nu,), repeat=ar):
                    yield New(nu, Output(nu, tuple(args))), 0, 1
    if outs >= 1:
        for x in names:
            for ar in range(spec.max_arity + 1):
                for args in product(names, repeat=ar):
                    yield Output(x, tuple(args)), 0, 1
    if ins >= 1:
        for x in names:
            for ar in range(spec.max_arity + 1):
                params = tuple(Name(f"v9{j}") for j in range(ar))
                yield Input(x, params, Stop()), 1, 0


def _components(spec: CorpusSpec, ins: int, outs: int, names: tuple[Name, ...], depth: int):
    """Candidate parallel components: (term, input_count, output_count, rich)."""
    if outs >= 1:
        for x in names:
            for ar in range(spec.max_arity + 1):
                for args in product(names, repeat=ar):
                    yield Output(x, tuple(args)), 0, 1, False
    if ins >= 1:
        for ar in range(spec.max_arity + 1):
            params = tuple(Name(f"v{depth}{j}") for j in range(ar))
            for x in names:
                for body, bi, bo in _continuations(spec, names + params, ins - 1, outs):
                    yield Input(x, params, body), 1 + bi, bo, not isinstance(body, Stop)


def _soups(spec: CorpusSpec, ins: int, outs: int, total: int, names: tuple[Name, ...], depth: int):
    width = spec.max_parallel_width
    pool = list(_components(spec, ins, outs, names, depth))

    def rec(start: int, ins_left: int, outs_left: int, total_left: int,
            width_left: int, rich_left: int):
        yield ()
        if width_left == 0:
            return
        for idx in range(start, len(pool)):
            t, ci, co, rich = pool[idx]
            if (ci <= ins_left and co <= outs_left and ci + co <= total_left
                    and (rich_left > 0 or not rich)):
                for rest in rec(idx, ins_left - ci, outs_left - co, total_left - ci - co,
                                width_left - 1, rich_left - (1 if rich else 0)):
                    yield (t,) + rest

    # at most one component carries a non-trivial continuation, which keeps
    # desk corpora minutes-scale while still covering racing and name passing
    for combo in rec(0, ins, outs, total, width, 1):
        if not combo:
            yield Stop()
        else:
            term: Process = combo[0]
            for c in combo[1:]:
                term = Par(term, c)
            yield term


def _level(spec: CorpusSpec, ins: int, outs: int, total: int, names: tuple[Name, ...], depth: int):
    yield from _soups(spec, ins, outs, total, names, depth)
    if spec.allow_new:
        nu = Name(f"w{depth}")
        for body in _soups(spec, ins, outs, total, names + (nu,), depth):
            if nu in free_names(body):
                yield New(nu, body)


def corpus_names(spec: CorpusSpec) -> tuple[Name, ...]:
    return tuple(Name(c) for c in "abcdefgh"[: spec.name_alphabet_size])


_corpus_cache: dict[CorpusSpec, list[Process]] = {}


def enumerate_terms(spec: CorpusSpec = DESK_SPEC) -> list[Process]:
    """Every corpus term within the bounds, one canonical form per congruence class.

    The prefix budget is split evenly between inputs and outputs (a budget of
    4 means at most 2 of each), which is what keeps desk corpora minutes-scale.
    """
    if spec in _corpus_cache:
        return list(_corpus_cache[spec])
    side_cap = (spec.max_prefixes + 1) // 2
    seen: set[Process] = set()
    out: list[Process] = []
    for t in _level(spec, side_cap, side_cap, spec.max_prefixes, corpus_names(spec), 0):
        c = canonical_form(t)
        if c not in seen:
            seen.add(c)
            out.append(c)
    _corpus_cache[spec] = out
    return list(out)


def enumerate_all_terms(max_size: int, alphabet: int = 2, max_arity: int = 1) -> list[Process]:
    """Exhaustive raw AST enumeration by node count (binders share the alphabet).

    Unlike enumerate_terms this does not quotient by congruence; it is meant
    for validating the congruence machinery itself and for grammar round-trips.
    """
    names = tuple(Name(c) for c in "abcdefgh"[:alphabet])
    memo: dict[int, list[Process]] = {}

    def terms(size: int) -> list[Process]:
        if size in memo:
            return memo[size]
        out: list[Process] = []
        if size == 1:
            out.append(Stop())
            for x in names:
                for ar in range(max_arity + 1):
                    for args in product(names, repeat=ar):
                        out.append(Output(x, tuple(args)))
        elif size >= 2:
            for body in terms(size - 1):
                for x in names:
                    out.append(New(x, body))
                    for ar in range(max_arity + 1):
                        for params in product(names, repeat=ar):
                            if len(set(params)) == len(params):
                                out.append(Input(x, tuple(params), body))
            for ls in range(1, size - 1):
                for left in terms(ls):
                    for right in terms(size - 1 - ls):
                        out.append(Par(left, right))
        memo[size] = out
        return out

    all_terms: list[Process] = []
    for s in range(1, max_size + 1):
        all_terms.extend(terms(s))
    return all_terms


def enumerate_contexts(names: tuple[Name, ...], max_size: int) -> list[Process]:
    """Single-hole contexts with at most max_size non-hole constructors."""
    side_terms = [t for t in enumerate_all_terms(2, alphabet=len(names)) ]

    def contexts(size: int) -> list[Process]:
        out: list[Process] = [Hole()] if size == 0 else []
        if size >= 1:
            for inner in contexts(size - 1):
                for x in names:
                    out.append(New(x, inner))
                    out.append(Input(x, (), inner))
                    if size >= 2:
                        # binder name distinct from the channel alphabet
                        out.append(Input(x, (Name("v0"),), inner))
            for side_size in range(1, size):
                for inner in contexts(size - 1 - side_size):
                    for r in side_terms:
                        if _ast_size(r) == side_size:
                            out.append(Par(inner, r))
                            out.append(Par(r, inner))
        return out

    seen: set[str] = set()
    result: list[Process] = []
    for s in range(0, max_size + 1):
        for c in contexts(s):
            key = pretty(c)
            if key not in seen:
                seen.add(key)
                result.append(c)
    return result


def _ast_size(p: Process) -> int:
    match p:
        case Stop() | Output() | Hole():
            return 1
        case Input(_, _, body) | New(_, body):
            return 1 + _ast_size(body)
        case Par(left, right):
            return 1 + _ast_size(left) + _ast_size(right)
    raise TypeError(f"not a process: {p!r}")


# ---------------------------------------------------------------------------
# Semantic observables and the diagram-side transition system


def semantic_barbs(td: TopDiagram) -> frozenset[Name]:
    """Channels with an observable send in the top multiset of the diagram.

    A send is observable when its subject wire traces back to a name constant
    or an open domain port; subjects rooted at a fresh source are hidden.
    """
    d = td.diagram
    _, comps = _spine(d)
    out: set[Name] = set()
    for c in comps:
        if d.nodes[c].kind != "send":
            continue
        src = trace_subject(d, d.producer(("in", c, 0)))
        if src[0] == "dom":
            out.add(td.name_order[src[1]])
        elif src[0] == "out":
            node = d.nodes[src[1]]
            if node.kind == "name":
                out.add(Name(node.label))
            elif node.kind == "fresh":
                continue
            else:
                raise ValueError(f"diagram not translation-shaped at node {src[1]}")
        else:
            raise ValueError(f"unexpected subject source {src}")
    return frozenset(out)


class DiagramLTS:
    """Transition system over diagram-equality classes, keyed by canonical hash."""

    def __init__(self) -> None:
        self.classes: list[TopDiagram] = []
        self._by_sig: dict[str, list[int]] = {}
        self.succ: list[list[int] | None] = []

    def intern(self, td: TopDiagram) -> int:
        for idx in self._by_sig.get(td.sig, []):
            if top_equal(self.classes[idx], td):
                return idx
        idx = len(self.classes)
        self.classes.append(td)
        self._by_sig.setdefault(td.sig, []).append(idx)
        self.succ.append(None)
        return idx

    def close(self) -> None:
        frontier = [i for i, s in enumerate(self.succ) if s is None]
        while frontier:
            nxt: list[int] = []
            for i in frontier:
                if self.succ[i] is not None:
                    continue
                targets = sorted({self.intern(t) for t in comm_step(self.classes[i])})
                self.succ[i] = targets
                nxt.extend(j for j in targets if self.succ[j] is None)
            frontier = [i for i, s in enumerate(self.succ) if s is None]

    def refine(self) -> list[int]:
        self.close()
        labels = [frozenset(n.id for n in semantic_barbs(td)) for td in self.classes]
        return partition_refine([s or [] for s in self.succ], labels)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class VerificationReport:
    lemma: str
    corpus_size: int
    checked: int
    counterexamples: list[dict] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_json(self) -> dict:
        return {
            "lemma": self.lemma,
            "corpus_size": self.corpus_size,
            "checked": self.checked,
            "passed": self.passed,
            "counterexamples": self.counterexamples,
            "elapsed_seconds": round(self.elapsed, 3),
        }

    def summary(self) -> str:
        verdict = "pass" if self.passed else f"FAIL ({len(self.counterexamples)} counterexamples)"
        return (
            f"{self.lemma}: {verdict} | corpus={self.corpus_size} "
            f"checks={self.checked} elapsed={self.elapsed:.2f}s"
        )


# ---------------------------------------------------------------------------
# Lemma suites


def verify_reduction_lemma(spec: CorpusSpec = DESK_SPEC) -> VerificationReport:
    """Operational successors and diagram rewrites coincide, both directions."""
    t0 = time.perf_counter()
    terms = enumerate_terms(spec)
    report = VerificationReport("reduction", len(terms), 0)
    for p in terms:
        report.checked += 1
        ops = sorted(reduce_step(p), key=pretty)
        lhs: list[TopDiagram] = []
        for q in ops:
            td = translate_top(q, 1, True)
            if not any(top_equal(td, seen) for seen in lhs):
                lhs.append(td)
        rhs = comm_step(translate_top(p, 1, True))
        ok = (
            all(any(top_equal(l, r) for r in rhs) for l in lhs)
            and all(any(top_equal(r, l) for l in lhs) for r in rhs)
        )
        if not ok:
            report.counterexamples.append({
                "term": pretty(p),
                "operational_successors": [pretty(q) for q in ops],
                "translated_classes": len(lhs),
                "rewrite_classes": len(rhs),
            })
    report.elapsed = time.perf_counter() - t0
    return report


def verify_observation_lemma(spec: CorpusSpec = DESK_SPEC) -> VerificationReport:
    """Syntactic barbs equal semantic barbs for every corpus term."""
    t0 = time.perf_counter()
    terms = enumerate_terms(spec)
    report = VerificationReport("observation", len(terms), 0)
    for p in terms:
        report.checked += 1
        syntactic = barbs(p)
        semantic = semantic_barbs(translate_top(p, 1, True))
        if syntactic != semantic:
            report.counterexamples.append({
                "term": pretty(p),
                "syntactic_barbs": sorted(n.id for n in syntactic),
                "semantic_barbs": sorted(n.id for n in semantic),
            })
    report.elapsed = time.perf_counter() - t0
    return report


def verify_full_abstraction(spec: CorpusSpec = DESK_SPEC, max_terms: int = 200,
                            max_pairs: int = 20_000) -> VerificationReport:
    """Syntactic and diagram-side bisimilarity verdicts agree on all pairs."""
    t0 = time.perf_counter()
    terms = enumerate_terms(spec)[:max_terms]
    states, index, succ = reduction_union(terms)
    syn_blocks = partition_refine(succ, [barbs(s) for s in states])
    lts = DiagramLTS()
    roots = [lts.intern(translate_top(p, 1, True)) for p in terms]
    sem_blocks = lts.refine()
    report = VerificationReport("full-abstraction", len(terms), 0)
    pairs = 0
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            if pairs >= max_pairs:
                break
            pairs += 1
            syn = syn_blocks[index[terms[i]]] == syn_blocks[index[terms[j]]]
            sem = sem_blocks[roots[i]] == sem_blocks[roots[j]]
            if syn != sem:
                report.counterexamples.append({
                    "left": pretty(terms[i]),
                    "right": pretty(terms[j]),
                    "syntactic_bisimilar": syn,
                    "semantic_bisimilar": sem,
                })
        if pairs >= max_pairs:
            break
    report.checked = pairs
    report.elapsed = time.perf_counter() - t0
    return report


def close_with_permits(d: Diagram, dom_names: tuple[Name, ...], catalysts: int = 1) -> TopDiagram:
    """Instantiate an open diagram's names and add permits: the runnable form."""
    h = Diagram()
    prods = []
    for name in dom_names:
        prods.append(("out", h.add("name", label=name.id), 0))
    parts = [h.add("comm") for _ in range(catalysts)]
    spine = h.add("par", arity=1 + catalysts)
    for k, cid in enumerate(parts):
        h.connect(("out", cid, 0), ("in", spine, 1 + k))
    h.connect(("out", spine, 0), h.add_cod(P))
    _splice(h, d, prods, [("in", spine, 0)])
    norm = normalize(h, scalar_gc=True)
    return TopDiagram(norm, dom_names, catalysts, True, signature(norm))


def verify_contextual_congruence(spec: CorpusSpec = SMALL_SPEC, context_bound: int = 4,
                                 max_plugs: int = 12, max_verdict_terms: int = 8,
                                 max_verdict_contexts: int = 24) -> VerificationReport:
    """(a) plug-then-translate equals translate-then-plug, exhaustively; and
    (b) contextual-congruence verdicts agree between the two semantics."""
    t0 = time.perf_counter()
    names = corpus_names(spec)
    contexts = enumerate_contexts(names, context_bound)
    plugs = enumerate_terms(spec)[:max_plugs]
    report = VerificationReport("contextual-congruence", len(contexts), 0)

    for c in contexts:
        for p in plugs:
            report.checked += 1
            order = tuple(sorted(free_names(p)))
            ctx = translate_context(c, order)
            via_functor = plug_diagram(ctx, translate(p))
            direct = translate(plug_term(c, p))
            if not equal(via_functor, direct):
                report.counterexamples.append({
                    "kind": "functoriality",
                    "context": pretty(c),
                    "plug": pretty(p),
                })

    # verdict agreement on a small sub-corpus
    terms = plugs[:max_verdict_terms]
    stride = max(1, len(contexts) // max_verdict_contexts)
    picked = contexts[::stride][:max_verdict_contexts]
    plugged: dict[tuple[int, int], Process] = {}
    tops: dict[tuple[int, int], TopDiagram] = {}
    for ti, p in enumerate(terms):
        for ci, c in enumerate(picked):
            filled = plug_term(c, p)
            plugged[(ti, ci)] = filled
            order = tuple(sorted(free_names(p)))
            ctx = translate_context(c, order)
            tops[(ti, ci)] = close_with_permits(plug_diagram(ctx, translate(p)), ctx.dom_names)
    states, index, succ = reduction_union(list(plugged.values()))
    syn_blocks = partition_refine(succ, [barbs(s) for s in states])
    lts = DiagramLTS()
    roots = {key: lts.intern(td) for key, td in tops.items()}
    sem_blocks = lts.refine()
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            report.checked += 1
            syn = all(
                syn_blocks[index[canonical_form(plugged[(i, ci)])]]
                == syn_blocks[index[canonical_form(plugged[(j, ci)])]]
                for ci in range(len(picked))
            )
            sem = all(
                sem_blocks[roots[(i, ci)]] == sem_blocks[roots[(j, ci)]]
                for ci in range(len(picked))
            )
            if syn != sem:
                report.counterexamples.append({
                    "kind": "verdict-disagreement",
                    "left": pretty(terms[i]),
                    "right": pretty(terms[j]),
                    "syntactic": syn,
                    "semantic": sem,
                })
    report.elapsed = time.perf_counter() - t0
    return report


def verify_catalyst_gating(spec: CorpusSpec = DESK_SPEC) -> VerificationReport:
    """No permit, no rewrite; and firing never changes the permit count."""
    from .rewrite import apply_comm, count_permits

    t0 = time.perf_counter()
    terms = enumerate_terms(spec)
    report = VerificationReport("catalyst-gating", len(terms), 0)
    for p in terms:
        report.checked += 1
        td = translate_top(p, 1, True)
        stripped = strip_permits(td)
        if find_diagram_redexes(stripped):
            report.counterexamples.append({
                "term": pretty(p),
                "issue": "redex found without a permit",
            })
            continue
        for r in find_diagram_redexes(td):
            after = apply_comm(td, r)
            if count_permits(after) != count_permits(td):
                report.counterexamples.append({
                    "term": pretty(p),
                    "issue": "permit count changed by firing",
                })
                break
    report.elapsed = time.perf_counter() - t0
    return report


VERIFIERS = {
    "reduction": verify_reduction_lemma,
    "observation": verify_observation_lemma,
    "fullabstraction": verify_full_abstraction,
    "congruence": verify_contextual_congruence,
    "gating": verify_catalyst_gating,
}
