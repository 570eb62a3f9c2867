"""Splicing local tangles into move disks and evaluating the glued diagram."""

import pytest

from tanglemovies.diagram import INF, TangleDiagram, braid_long_closure
from tanglemovies.movie import (
    apply_move,
    classify,
    curl_create,
    tangency_create,
    triple_move,
)
from tanglemovies.poly import DELTA, ONE, Poly2, Z, v_power
from tanglemovies.skein import (
    SkeinElement,
    SkeinError,
    braid_element,
    closure_pairs,
    homfly_eval,
    insert_local,
    kauffman_eval_mod2,
    move_site,
    splice,
    word_from_matching_name,
    word_from_perm,
)


def one_strand(terms):
    return SkeinElement(1, "oriented", {(0,): terms})


def triple_setup():
    """A long trefoil diagram holding a braid-relation move on x2, x3, x4."""
    before = braid_long_closure([1, 1, 2, 1], 3)
    ev = triple_move("x2", "x3", "x4")
    after = apply_move(before, ev)
    cls = classify(before, ev, after)
    return before, after, cls


class TestTripleSite:
    def test_site_covers_all_three_positions(self):
        before, _, cls = triple_setup()
        site = move_site(before, cls)
        assert site.n == 3
        assert set(site.deleted) == {"x2", "x3", "x4"}

    def test_insert_own_content_reproduces_the_diagram(self):
        before, _, cls = triple_setup()
        own = braid_element(3, [1, 2, 1])
        assert insert_local(before, cls, own) == homfly_eval(before)

    def test_long_trefoil_with_curl_value(self):
        before, _, _ = triple_setup()
        # positive curl times the long trefoil evaluation
        trefoil = homfly_eval(braid_long_closure([1, 1, 1], 2))
        assert homfly_eval(before) == trefoil.scale(v_power(1))

    def test_insert_into_before_and_after_frames_agree(self):
        before, after, cls = triple_setup()
        S = braid_element(3, [2]) - braid_element(3, [1])
        assert insert_local(before, cls, S) == insert_local(after, cls, S)

    def test_insert_identity_drops_the_triple(self):
        before, _, cls = triple_setup()
        got = insert_local(before, cls, braid_element(3, []))
        # remaining crossing x1 is a positive curl on the long unknot,
        # and one strand closes into a split circle
        assert got == one_strand(v_power(1) * DELTA)

    def test_insert_single_generator_matches_direct_diagram(self):
        before, _, cls = triple_setup()
        got = insert_local(before, cls, braid_element(3, [2]))
        direct = homfly_eval(braid_long_closure([1, 2], 3))
        assert got == direct

    def test_splice_output_is_the_direct_diagram(self):
        before, _, cls = triple_setup()
        out = splice(before, cls, (("s", 2, 1),))
        direct = braid_long_closure([1, 2], 3, names=["x1", "n1"])
        assert out == direct

    def test_insert_negative_generator_obeys_skein(self):
        before, _, cls = triple_setup()
        pos = insert_local(before, cls, braid_element(3, [2]))
        neg = insert_local(before, cls, braid_element(3, [-2]))
        smooth = insert_local(before, cls, braid_element(3, []))
        assert pos - neg == smooth.scale(Z)

    def test_mod2_own_content_reproduces_the_diagram(self):
        before, _, cls = triple_setup()
        closure = closure_pairs(before)
        own = [(Poly2.monomial(0, 0), (("s", 1, 1), ("s", 2, 1), ("s", 1, 1)))]
        got = insert_local(before, cls, own, algebra="mod2", closure=closure)
        assert got == kauffman_eval_mod2(before)

    def test_boundary_mismatch_is_an_error(self):
        before, _, cls = triple_setup()
        with pytest.raises(SkeinError):
            insert_local(before, cls, braid_element(2, [1]))


def two_strand_identity():
    circle = [INF, ("b", "1", "-"), ("b", "1", "+"), ("b", "2", "-"), ("b", "2", "+")]
    return TangleDiagram([circle], {})


def tangency_setup(parallel=True):
    d = two_strand_identity()
    under = ("x", "y") if parallel else ("y", "x")
    ev = tangency_create(
        "x", "y",
        over_anchor=("b", "1", "-"), over_ids=("x", "y"),
        under_anchor=("b", "2", "-"), under_ids=under,
        writhe_first=1,
    )
    after = apply_move(d, ev)
    cls = classify(d, ev, after)
    return d, after, cls


class TestTangencySite:
    def test_insert_identity_cancels_the_tangency(self):
        d, after, cls = tangency_setup()
        got = insert_local(after, cls, braid_element(2, []))
        assert got == homfly_eval(d)

    def test_insert_own_content_reproduces_the_diagram(self):
        d, after, cls = tangency_setup()
        own = [(ONE, (("s", 1, 1), ("s", 1, -1)))]
        got = insert_local(after, cls, own, algebra="oriented")
        assert got == homfly_eval(after)
        assert got == homfly_eval(d)

    def test_mod2_turnback_insert_gives_the_hook_tangle(self):
        d, after, cls = tangency_setup()
        closure = closure_pairs(d)
        got = insert_local(
            after, cls, [(Poly2.monomial(0, 0), word_from_matching_name("t1"))],
            algebra="mod2", closure=closure,
        )
        assert got.serialize() == "t1 -> 1*v^0*z^0"

    def test_mod2_identity_insert_is_the_identity_tangle(self):
        d, after, cls = tangency_setup()
        closure = closure_pairs(d)
        got = insert_local(
            after, cls, [(Poly2.monomial(0, 0), ())],
            algebra="mod2", closure=closure,
        )
        assert got == kauffman_eval_mod2(d)


class TestCurlSite:
    def test_insert_identity_removes_the_curl(self):
        d = braid_long_closure([], 1)
        ev = curl_create("k", ("b", "1", "-"), "uo", 1)
        after = apply_move(d, ev)
        cls = classify(d, ev, after)
        got = insert_local(after, cls, braid_element(1, []))
        assert got == homfly_eval(d)
        assert homfly_eval(after) == homfly_eval(d).scale(v_power(1))


class TestLocalWords:
    def test_word_from_perm_spells_a_reduced_word(self):
        word = word_from_perm((2, 1, 0))
        assert len(word) == 3
        assert all(letter[0] == "s" and letter[2] == 1 for letter in word)

    def test_word_from_matching_name_round_trip(self):
        assert word_from_matching_name("e") == ()
        assert word_from_matching_name("s1t2") == (("s", 1, 1), ("t", 2))
