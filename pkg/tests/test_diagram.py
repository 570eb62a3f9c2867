"""Gauss-code diagrams: types, gradings, surgery, text round-trip."""

import pytest

from tanglemovies.diagram import (
    INF,
    DiagramError,
    TangleDiagram,
    braid_closure,
    display_grading,
)


def long_unknot():
    return TangleDiagram([[INF, ("b", "1", "-"), ("b", "1", "+")]], {})


def curl_diagram(order, w):
    """1-tangle with one curl; `order` is 'uo' or 'ou'."""
    ev = [("u", "k"), ("o", "k")] if order == "uo" else [("o", "k"), ("u", "k")]
    return TangleDiagram(
        [[INF, ("b", "1", "-"), *ev, ("b", "1", "+")]], {"k": w}
    )


class TestConstruction:
    def test_exactly_one_marked_point(self):
        with pytest.raises(DiagramError):
            TangleDiagram([[("b", "1", "-"), ("b", "1", "+")]], {})
        with pytest.raises(DiagramError):
            TangleDiagram([[INF, INF]], {})

    def test_crossing_must_have_both_passes(self):
        with pytest.raises(DiagramError):
            TangleDiagram([[INF, ("o", "c")]], {"c": 1})

    def test_writhe_required(self):
        with pytest.raises(DiagramError):
            TangleDiagram([[INF, ("o", "c"), ("u", "c")]], {})

    def test_canonical_rotation_starts_at_inf(self):
        d = TangleDiagram([[("b", "1", "-"), ("b", "1", "+"), INF]], {})
        assert d.main[0] == INF


class TestCrossingType:
    def test_curl_uo_is_type_0(self):
        # under-pass immediately followed by over-pass: the positive arc is
        # empty, the marked point is outside it.
        assert curl_diagram("uo", 1).crossing_type("k") == 0

    def test_curl_ou_is_type_1(self):
        assert curl_diagram("ou", 1).crossing_type("k") == 1

    def test_moving_inf_across_an_endpoint_toggles_type(self):
        base = [("b", "1", "-"), ("o", "k"), ("u", "k"), ("b", "1", "+")]
        for gap in range(len(base) + 1):
            circle = base[:gap] + [INF] + base[gap:]
            d = TangleDiagram([circle], {"k": 1})
            # with the over-pass first, the u->o arc is the long way around:
            # it contains inf unless inf sits in the short gap between o and u
            assert d.crossing_type("k") == (0 if gap == 2 else 1)

    def test_unknown_crossing(self):
        with pytest.raises(DiagramError):
            long_unknot().crossing_type("zz")


class TestGrading:
    def test_long_knot_grading_is_inf_only(self):
        assert curl_diagram("ou", 1).grading("k") == frozenset({"inf"})

    def test_three_braid_markings(self):
        # 3-braid word s1 s2, braid closure, marked point on arc 3: the first
        # crossing carries marking {2,3}, the second {3}; the marked-point arc
        # (3) is represented by inf itself.
        d = braid_closure([1, 2], 3, inf_arc=3, names=["s1", "s2"])
        assert d.grading("s1") == frozenset({"2+", "2-", "inf"})
        assert d.grading("s2") == frozenset({"inf"})
        assert display_grading(d.grading("s1")) == "{2,inf}"
        assert d.crossing_type("s1") == 1
        assert d.crossing_type("s2") == 1

    def test_grading_alternates_in_signs(self):
        d = braid_closure([1, 2], 3, inf_arc=3)
        for cid in d.crossing_ids():
            g = sorted(d.grading(cid) - {"inf"})
            plus = {x[:-1] for x in g if x.endswith("+")}
            minus = {x[:-1] for x in g if x.endswith("-")}
            assert plus == minus  # complete pairs: alternation along the circle


class TestWrithe:
    def test_trivial(self):
        assert long_unknot().writhe() == 0

    def test_trefoil_braid(self):
        d = braid_closure([1, 1, 1], 2, inf_arc=1)
        assert d.writhe() == 3

    def test_figure_eight_standard_diagram(self):
        # standard 4-crossing diagram: two positive, two negative crossings
        d = braid_closure([1, -2, 1, -2], 3, inf_arc=1)
        assert d.writhe() == 0


class TestSurgery:
    def test_switch_is_an_involution(self):
        d = braid_closure([1, 1], 2, inf_arc=1, closure={1: 2, 2: 1})
        cid = sorted(d.crossing_ids())[0]
        assert d.switch(cid).switch(cid) == d
        assert d.switch(cid).writhes[cid] == -1

    def test_smooth_reduces_crossing_count_by_one(self):
        d = braid_closure([1, 1], 2, inf_arc=1, closure={1: 2, 2: 1})
        s = d.smooth("x1")
        assert len(s.crossing_ids()) == 1

    def test_smooth_single_curl(self):
        s = curl_diagram("uo", 1).smooth("k")
        assert s.crossing_ids() == frozenset()
        # splits off one empty closed circle, which is dropped
        assert s == long_unknot()

    def test_smooth_splits_closure_circle_in_two(self):
        d = braid_closure([1, 2], 3, inf_arc=3, names=["s1", "s2"])
        s = d.smooth("s1")
        assert len(s.circles) == 2
        # smoothing a crossing on one circle always splits it
        total = sum(len(c) for c in s.circles)
        assert total == sum(len(c) for c in d.circles) - 2

    def test_second_smoothing_changes_circle_count_by_one(self):
        d = braid_closure([1, 2], 3, inf_arc=3, names=["s1", "s2"])
        once = d.smooth("s1")
        twice = once.smooth("s2")
        assert abs(len(twice.circles) - len(once.circles)) == 1

    def test_surgery_dispatch(self):
        d = braid_closure([1], 2, inf_arc=1)
        assert d.surgery("x1", "switch") == d.switch("x1")
        assert d.surgery("x1", "smooth-oriented") == d.smooth("x1")
        with pytest.raises(DiagramError):
            d.surgery("x1", "explode")


class TestTextFormat:
    def test_roundtrip(self):
        d = braid_closure([1, -2, 1, -2], 3, inf_arc=2)
        assert TangleDiagram.parse(d.serialize()) == d

    def test_canonical_emit_starts_at_inf(self):
        d = braid_closure([1], 2, inf_arc=1)
        assert d.serialize().splitlines()[0].startswith("circle: [inf ")

    def test_parse_whitespace_insensitive(self):
        text = "circle: [ inf  b1:-   b1:+ ]\nwrithes: {}\n"
        assert TangleDiagram.parse(text) == long_unknot()

    def test_meta_roundtrip(self):
        d = TangleDiagram(
            [[INF, ("b", "1", "-"), ("u", "k"), ("o", "k"), ("b", "1", "+")]],
            {"k": 1},
            meta={"k": -1},
        )
        assert TangleDiagram.parse(d.serialize()) == d


class TestRenaming:
    def test_same_up_to_renaming(self):
        d1 = braid_closure([1, 1], 2, inf_arc=1, closure={1: 2, 2: 1}, names=["a", "b"])
        d2 = braid_closure([1, 1], 2, inf_arc=1, closure={1: 2, 2: 1}, names=["p", "q"])
        assert d1 != d2
        assert d1.same_up_to_renaming(d2)

    def test_different_writhes_not_isomorphic(self):
        d1 = braid_closure([1], 2, inf_arc=1)
        d2 = braid_closure([-1], 2, inf_arc=1)
        assert not d1.same_up_to_renaming(d2)


class TestBraidClosure:
    def test_two_braid_cyclic_closure_needed_for_even_word(self):
        # identity permutation: the braid closure would be two circles
        with pytest.raises(DiagramError):
            braid_closure([1, 1], 2, inf_arc=1, closure={1: 1, 2: 2})
        d = braid_closure([1, 1], 2, inf_arc=1, closure={1: 2, 2: 1})
        assert len(d.circles) == 1

    def test_single_crossing_braid_closure(self):
        d = braid_closure([1], 2, inf_arc=2)
        assert d.crossing_type("x1") in (0, 1)
        assert len(d.main) == 7
