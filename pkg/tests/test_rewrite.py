import pytest

from pitwo.opsem import reduce_step
from pitwo.rewrite import (
    DiagramRedex,
    StaleDiagramRedexError,
    apply_comm,
    apply_concurrent,
    comm_step,
    concurrent_step,
    count_permits,
    find_diagram_redexes,
    strip_permits,
)
from pitwo.syntax import parse
from pitwo.translate import top_equal, translate_top

RACE = parse("x?(y) => y!() | x!(u) | x?(v) => v!()")
SOUP = parse("(a?() => 0 | a!()) | (b?() => 0 | b!())")


def top(text, k=1):
    return translate_top(parse(text), k, True)


class TestFindDiagramRedexes:
    def test_race_has_two(self):
        assert len(find_diagram_redexes(translate_top(RACE, 1, True))) == 2

    def test_no_permit_no_redex(self):
        td = translate_top(parse("x?(y) => y!() | x!(u)"), 0, True)
        assert find_diagram_redexes(td) == []

    def test_stripping_the_permit_disables_matching(self):
        td = top("x?(y) => y!() | x!(u)")
        assert len(find_diagram_redexes(td)) == 1
        assert find_diagram_redexes(strip_permits(td)) == []

    def test_stop(self):
        assert find_diagram_redexes(top("0")) == []

    def test_arity_mismatch(self):
        assert find_diagram_redexes(top("x?(y, z) => 0 | x!(u)")) == []

    def test_different_subjects(self):
        assert find_diagram_redexes(top("x?(y) => 0 | z!(u)")) == []

    def test_shared_subject_through_restriction(self):
        assert len(find_diagram_redexes(top("(new x)(x?(v) => 0 | x!(a))"))) == 1

    def test_guarded_redex_invisible(self):
        # a matching pair inside a continuation must not fire until released
        td = top("a?() => (x?() => 0 | x!())")
        assert find_diagram_redexes(td) == []


class TestApplyComm:
    def test_reduction_lemma_instance(self):
        td = top("x?(y) => y!() | x!(u)")
        (r,) = find_diagram_redexes(td)
        assert top_equal(apply_comm(td, r), top("u!()"))

    def test_zero_arity(self):
        td = top("x?() => 0 | x!()")
        (r,) = find_diagram_redexes(td)
        assert top_equal(apply_comm(td, r), top("0"))

    def test_permit_survives(self):
        td = top("x?(y) => y!() | x!(u)")
        (r,) = find_diagram_redexes(td)
        after = apply_comm(td, r)
        assert count_permits(after) == count_permits(td) == 1

    def test_node_count_strictly_decreases(self):
        td = top("x?(y) => y!() | x!(u)")
        (r,) = find_diagram_redexes(td)
        assert len(apply_comm(td, r).diagram.nodes) < len(td.diagram.nodes)

    def test_stale_redex_rejected(self):
        td = top("x?(y) => y!() | x!(u)")
        with pytest.raises(StaleDiagramRedexError):
            apply_comm(td, DiagramRedex(999, 998, 997, 1))

    def test_guarded_pair_released_by_firing(self):
        td = top("a?() => (x?() => 0 | x!()) | a!()")
        (r,) = find_diagram_redexes(td)
        after = apply_comm(td, r)
        assert len(find_diagram_redexes(after)) == 1
        (r2,) = find_diagram_redexes(after)
        assert top_equal(apply_comm(after, r2), top("0"))


class TestCommStep:
    def test_race_classes(self):
        classes = comm_step(translate_top(RACE, 1, True))
        ops = reduce_step(RACE)
        assert len(classes) == len(ops) == 1

    def test_stop_empty(self):
        assert comm_step(top("0")) == []

    def test_matches_operational(self):
        p = parse("x?(y) => y!() | x!(u) | x?(v) => 0")
        classes = comm_step(translate_top(p, 1, True))
        expected = [translate_top(q, 1, True) for q in reduce_step(p)]
        assert len(classes) == len(expected) == 2
        for e in expected:
            assert any(top_equal(e, c) for c in classes)


class TestConcurrent:
    def test_two_permits_fire_jointly(self):
        td = translate_top(SOUP, 2, True)
        steps = concurrent_step(td, 2)
        assert len(steps) == 1
        assert len(steps[0]) == 2
        catalysts = {r.catalyst for r in steps[0]}
        assert len(catalysts) == 2
        final = apply_concurrent(td, steps[0])
        assert top_equal(final, translate_top(parse("0"), 2, True))

    def test_one_permit_sequential(self):
        td = translate_top(SOUP, 1, True)
        steps = concurrent_step(td, 1)
        assert len(steps) == 2
        assert all(len(s) == 1 for s in steps)
        mid = apply_concurrent(td, steps[0])
        steps2 = concurrent_step(mid, 1)
        assert len(steps2) == 1
        final = apply_concurrent(mid, steps2[0])
        assert top_equal(final, translate_top(parse("0"), 1, True))

    def test_empty_soup(self):
        assert concurrent_step(top("0", 2), 2) == []

    def test_conflicting_redexes_not_joint(self):
        # two receivers racing for one sender share the send node
        td = translate_top(RACE, 2, True)
        steps = concurrent_step(td, 2)
        assert all(len(s) == 1 for s in steps)
