from pitwo.congruence import canonical_form
from pitwo.harness import (
    CorpusSpec,
    DESK_SPEC,
    SMALL_SPEC,
    DiagramLTS,
    close_with_permits,
    enumerate_all_terms,
    enumerate_contexts,
    enumerate_terms,
    semantic_barbs,
    verify_catalyst_gating,
    verify_contextual_congruence,
    verify_full_abstraction,
    verify_observation_lemma,
    verify_reduction_lemma,
)
from pitwo.syntax import Name, free_names, parse, pretty
from pitwo.translate import translate, translate_top


class TestEnumerate:
    def test_zero_prefixes(self):
        terms = enumerate_terms(CorpusSpec(1, 0, 0, 1, False))
        assert terms == [parse("0")]

    def test_one_prefix_one_name(self):
        terms = enumerate_terms(CorpusSpec(1, 1, 0, 1, False))
        assert {pretty(t) for t in terms} == {"0", "a!()", "a?() => 0"}

    def test_monotone_in_bounds(self):
        small = len(enumerate_terms(CorpusSpec(1, 2, 1, 2, True)))
        more_names = len(enumerate_terms(CorpusSpec(2, 2, 1, 2, True)))
        more_prefixes = len(enumerate_terms(CorpusSpec(1, 3, 1, 2, True)))
        assert small <= more_names
        assert small <= more_prefixes

    def test_no_two_terms_congruent(self):
        terms = enumerate_terms(SMALL_SPEC)
        canons = {canonical_form(t) for t in terms}
        assert len(canons) == len(terms)

    def test_desk_covers_key_phenomena(self):
        corpus = {pretty(t) for t in enumerate_terms(DESK_SPEC)}
        racing = canonical_form(parse("a?() => 0 | a!() | a?() => 0"))
        passing = canonical_form(parse("a?(y) => y!() | a!(b)"))
        private = canonical_form(parse("(new c)(c?() => 0 | c!())"))
        assert pretty(racing) in corpus
        assert pretty(passing) in corpus
        assert pretty(private) in corpus

    def test_raw_enumeration_counts(self):
        assert len(enumerate_all_terms(1)) == 7  # stop + 2 subjects x 3 arg choices

    def test_contexts_have_one_hole(self):
        from pitwo.translate import count_holes

        ctxs = enumerate_contexts((Name("a"), Name("b")), 3)
        assert all(count_holes(c) == 1 for c in ctxs)
        assert len(ctxs) > 10


class TestSemanticBarbs:
    def test_output(self):
        assert semantic_barbs(translate_top(parse("x!(y)"), 1, True)) == {Name("x")}

    def test_input_silent(self):
        assert semantic_barbs(translate_top(parse("x?(y) => x!(y)"), 1, True)) == frozenset()

    def test_restricted_subject_hidden(self):
        td = translate_top(parse("(new u)(u!(a) | z!(u))"), 1, True)
        assert semantic_barbs(td) == {Name("z")}

    def test_open_diagram_ports(self):
        td = translate_top(parse("x!(y)"), 1, False)
        assert semantic_barbs(td) == {Name("x")}


class TestVerifiers:
    def test_reduction_smoke(self):
        report = verify_reduction_lemma(SMALL_SPEC)
        assert report.passed, report.counterexamples[:3]
        assert report.corpus_size == len(enumerate_terms(SMALL_SPEC))

    def test_observation_smoke(self):
        report = verify_observation_lemma(SMALL_SPEC)
        assert report.passed, report.counterexamples[:3]

    def test_full_abstraction_smoke(self):
        report = verify_full_abstraction(SMALL_SPEC, max_terms=60, max_pairs=2000)
        assert report.passed, report.counterexamples[:3]
        assert report.checked > 0

    def test_gating_smoke(self):
        report = verify_catalyst_gating(SMALL_SPEC)
        assert report.passed, report.counterexamples[:3]

    def test_contextual_smoke(self):
        report = verify_contextual_congruence(SMALL_SPEC, context_bound=2,
                                              max_plugs=6, max_verdict_terms=4,
                                              max_verdict_contexts=8)
        assert report.passed, report.counterexamples[:3]

    def test_report_round_trips(self):
        report = verify_observation_lemma(CorpusSpec(1, 1, 0, 1, False))
        data = report.to_json()
        assert data["passed"] is True
        assert data["lemma"] == "observation"
        assert "elapsed_seconds" in data

    def test_reports_deterministic(self):
        a = verify_observation_lemma(SMALL_SPEC).to_json()
        b = verify_observation_lemma(SMALL_SPEC).to_json()
        a.pop("elapsed_seconds")
        b.pop("elapsed_seconds")
        assert a == b


class TestDiagramLTS:
    def test_interning_identifies_equal_diagrams(self):
        lts = DiagramLTS()
        i = lts.intern(translate_top(parse("a!() | b!()"), 1, True))
        j = lts.intern(translate_top(parse("b!() | a!()"), 1, True))
        k = lts.intern(translate_top(parse("a!()"), 1, True))
        assert i == j != k

    def test_close_with_permits_matches_translate_top(self):
        from pitwo.translate import top_equal

        p = parse("x?(y) => y!() | x!(u)")
        order = tuple(sorted(free_names(p)))
        td = close_with_permits(translate(p), order)
        assert top_equal(td, translate_top(p, 1, True))
