from hypothesis import given, settings

from conftest import congruence_class_terms, process_st
from pitwo.congruence import (
    alpha_key,
    canonical_form,
    congruent,
    congruence_closure_keys,
    oracle_congruent,
    term_size,
)
from pitwo.syntax import Name, New, Output, Par, Stop, free_names, parse, pretty

a, b, x, z = Name("a"), Name("b"), Name("x"), Name("z")


class TestCanonicalForm:
    def test_unit_law(self):
        assert canonical_form(Par(Stop(), Output(x, ()))) == Output(x, ())

    def test_commutativity(self):
        p = Par(Output(b, ()), Output(a, ()))
        q = Par(Output(a, ()), Output(b, ()))
        assert canonical_form(p) == canonical_form(q)

    def test_scope_extrusion(self):
        p = Par(New(x, Output(x, ())), Output(z, ()))
        q = New(Name("n0"), Par(Output(Name("n0"), ()), Output(z, ())))
        assert canonical_form(p) == canonical_form(q)

    def test_shadowed_binder_collapses(self):
        p = New(x, New(x, Output(x, ())))
        q = New(Name("n0"), Output(Name("n0"), ()))
        assert canonical_form(p) == canonical_form(q)

    def test_binder_swap(self):
        p = parse("(new x)(new z)(x!(z))")
        q = parse("(new z)(new x)(x!(z))")
        assert canonical_form(p) == canonical_form(q)

    def test_vacuous_restriction_kept(self):
        assert canonical_form(parse("(new x) 0")) != canonical_form(parse("0"))
        assert not congruent(parse("(new x) 0"), parse("0"))

    def test_vacuous_chain_keeps_one(self):
        assert canonical_form(parse("(new x)(new z) 0")) == canonical_form(parse("(new x) 0"))

    def test_gc_vacuous_flag(self):
        assert congruent(parse("(new x) 0"), parse("0"), gc_vacuous=True)
        assert congruent(parse("(new x) a!()"), parse("a!()"), gc_vacuous=True)
        assert not congruent(parse("(new x) x!()"), parse("x!()"), gc_vacuous=True)

    def test_no_hoisting_through_input(self):
        assert not congruent(parse("a?() => (new x) 0"), parse("(new x) a?() => 0"))

    def test_congruence_inside_input_bodies(self):
        assert congruent(parse("a?() => (0 | b!())"), parse("a?() => b!()"))

    @settings(max_examples=200)
    @given(process_st())
    def test_idempotent(self, p):
        c = canonical_form(p)
        assert canonical_form(c) == c

    @settings(max_examples=200)
    @given(process_st())
    def test_preserves_free_names(self, p):
        assert free_names(canonical_form(p)) == free_names(p)

    @settings(max_examples=40, deadline=None)
    @given(process_st(max_leaves=4))
    def test_result_is_congruent_to_input(self, p):
        # soundness: the canonical form is reachable by axiom steps
        assert oracle_congruent(p, canonical_form(p), depth=50)


class TestCongruent:
    def test_reflexive(self):
        p = parse("x?(y) => y!() | x!(u)")
        assert congruent(p, p)

    def test_associativity(self):
        p = parse("a!() | (b!() | x!())")
        q = parse("(a!() | b!()) | x!()")
        assert congruent(p, q)

    def test_free_names_not_identified(self):
        assert not congruent(Output(x, ()), Output(z, ()))


class TestOracle:
    def test_unit_one_step(self):
        assert oracle_congruent(Par(Stop(), Output(x, ())), Output(x, ()), depth=2)

    def test_distinct_outputs_never(self):
        assert not oracle_congruent(Output(x, ()), Output(z, ()), depth=8)

    def test_extrusion_two_steps(self):
        p = Par(New(x, Output(x, ())), Output(z, ()))
        q = New(x, Par(Output(x, ()), Output(z, ())))
        assert oracle_congruent(p, q, depth=2)

    def test_insertion_direction(self):
        assert oracle_congruent(Output(x, ()), Par(Output(x, ()), Stop()), depth=2)

    @settings(max_examples=60, deadline=None)
    @given(process_st(max_leaves=4))
    def test_agreement_with_canonical_form(self, p):
        variants = congruence_class_terms(p)
        cap = max(term_size(t) for t in variants) + 1
        keys = congruence_closure_keys(p, cap)
        for q in variants:
            assert congruent(p, q)
            assert alpha_key(q) in keys

    def test_closure_is_sound(self):
        p = parse("(new x)(x!() | 0) | a?() => 0")
        for q in congruence_class_terms(p):
            assert congruent(p, q), pretty(q)
