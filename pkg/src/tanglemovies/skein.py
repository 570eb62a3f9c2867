"""Skein-module evaluation of tangle diagrams.

Oriented diagrams evaluate in the skein module of the disk spanned, over
Laurent polynomials in ``v`` and ``z``, by the positive permutation braids on
the boundary strands (for a 1-tangle the single trivial arc).  Unoriented
diagrams evaluate mod 2 in the larger module that adds turnback diagrams.

Conventions, pinned by the worked examples in the tests:

* ``eval(L+) - eval(L-) = z * eval(L0)`` at every crossing,
* a positive curl contributes a factor ``v`` (negative: ``v^-1``),
* a split unknotted circle contributes ``delta = (v - v^-1)/z``,
* the ``normalized`` variant multiplies by ``v^(-writhe)``.

For the mod-2 evaluation the crossing relation is the unoriented four-term
relation ``eval(L+) + eval(L-) = z*(eval(L0) + eval(Loo))`` where ``Loo`` is
the smoothing against the orientation, a curl still contributes ``v^(+-1)``,
and a split circle contributes ``delta_F = (v + v^-1)/z + 1``.

Evaluation is by resolving towards totally ascending diagrams: strands are
ordered by their entry label, each strand is traversed from its entry, and
the first crossing met on an over-pass before its under-pass is resolved by
the crossing relation.  Totally ascending diagrams are layered, so they are
recognised directly: a permutation braid (every crossing pair reduces to the
single positive inversion crossing), times ``v^w`` for each curl, times a
split-circle factor for each closed component.
"""

from __future__ import annotations

import itertools
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from . import _fitted
from .diagram import INF, DiagramError, TangleDiagram
from .poly import DELTA, DELTA2, ONE, ZERO, Z, LaurentPoly, Poly2, v_power

Perm = Tuple[int, ...]
Matching = FrozenSet[FrozenSet[Tuple[str, str]]]


class SkeinError(ValueError):
    """Raised for diagrams outside the supported boundary shapes."""


# -- permutation bookkeeping -------------------------------------------------


def _inversions(p: Perm) -> int:
    return sum(1 for i, j in itertools.combinations(range(len(p)), 2) if p[i] > p[j])


def _apply_top(p: Perm, k: int) -> Perm:
    """Compose the adjacent transposition of top positions k, k+1 after p."""
    q = list(p)
    for i, x in enumerate(q):
        if x == k:
            q[i] = k + 1
        elif x == k + 1:
            q[i] = k
    return tuple(q)


def permutation_words(n: int) -> Dict[Perm, Tuple[int, ...]]:
    """Canonical positive braid word for each permutation of n strands.

    Words are shortest and lexicographically least, found by breadth-first
    search over right multiplication; ``word[i]`` is a generator index k
    meaning a positive crossing of the strands at positions k, k+1.
    """
    ident: Perm = tuple(range(n))
    words: Dict[Perm, Tuple[int, ...]] = {ident: ()}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in sorted(frontier, key=lambda q: words[q]):
            for k in range(n - 1):
                q = _apply_top(p, k)
                if q not in words:
                    words[q] = words[p] + (k,)
                    nxt.append(q)
        frontier = nxt
    return words


_WORD_CACHE: Dict[int, Dict[Perm, Tuple[int, ...]]] = {}


def _words(n: int) -> Dict[Perm, Tuple[int, ...]]:
    if n not in _WORD_CACHE:
        _WORD_CACHE[n] = permutation_words(n)
    return _WORD_CACHE[n]


def perm_name(p: Perm) -> str:
    word = _words(len(p))[p]
    if not word:
        return "e"
    return "".join(f"s{k + 1}" for k in word)


# -- skein elements ----------------------------------------------------------


class SkeinElement:
    """A finite sum of basis tangles with polynomial coefficients.

    ``algebra`` is ``"oriented"`` (permutation-braid basis, LaurentPoly
    coefficients) or ``"mod2"`` (matching basis, Poly2 coefficients).  Terms
    with zero coefficient are never stored.
    """

    __slots__ = ("n", "algebra", "terms")

    def __init__(self, n: int, algebra: str, terms: Mapping):
        if algebra not in ("oriented", "mod2"):
            raise ValueError(f"unknown algebra {algebra!r}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "algebra", algebra)
        clean = {k: c for k, c in terms.items() if c}
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("SkeinElement is immutable")

    # ---- ring-module operations

    def _like(self, terms) -> "SkeinElement":
        return SkeinElement(self.n, self.algebra, terms)

    def _compatible(self, other: "SkeinElement") -> None:
        if self.n != other.n or self.algebra != other.algebra:
            raise ValueError("skein elements live in different modules")

    def __add__(self, other: "SkeinElement") -> "SkeinElement":
        self._compatible(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, _zero_of(self.algebra)) + c
        return self._like(out)

    def __sub__(self, other: "SkeinElement") -> "SkeinElement":
        self._compatible(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, _zero_of(self.algebra)) - c
        return self._like(out)

    def __neg__(self) -> "SkeinElement":
        return self._like({k: -c for k, c in self.terms.items()})

    def scale(self, poly) -> "SkeinElement":
        return self._like({k: c * poly for k, c in self.terms.items()})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SkeinElement)
            and self.n == other.n
            and self.algebra == other.algebra
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.n, self.algebra, frozenset(self.terms.items())))

    # ---- display

    def term_names(self) -> Dict[str, object]:
        if self.algebra == "oriented":
            return {perm_name(p): c for p, c in self.terms.items()}
        return {matching_name(self.n, m): c for m, c in self.terms.items()}

    def serialize(self) -> str:
        named = self.term_names()
        if not named:
            return "0"
        return "\n".join(f"{w} -> {named[w].serialize()}" for w in sorted(named))

    def __repr__(self) -> str:
        return f"SkeinElement({self.serialize()!r})"


def _zero_of(algebra: str):
    return ZERO if algebra == "oriented" else Poly2(())


def zero_element(n: int, algebra: str = "oriented") -> SkeinElement:
    return SkeinElement(n, algebra, {})


def basis_element(n: int, key, algebra: str = "oriented") -> SkeinElement:
    one = ONE if algebra == "oriented" else Poly2.one()
    return SkeinElement(n, algebra, {key: one})


# -- boundary structure ------------------------------------------------------


def _label_key(label: str):
    return (0, int(label)) if label.isdigit() else (1, label)


def _segments(D: TangleDiagram) -> List[Tuple[object, object, Tuple]]:
    """Cut every circle at its boundary tokens.

    Returns (from_token, to_token, events) triples in circle order; circles
    without boundary tokens are not represented.
    """
    out = []
    for c in D.circles:
        idx = [i for i, e in enumerate(c) if e[0] == "b"]
        if not idx:
            continue
        n = len(c)
        for pos, i in enumerate(idx):
            j = idx[(pos + 1) % len(idx)]
            events = []
            k = (i + 1) % n
            while k != j:
                events.append(c[k])
                k = (k + 1) % n
            out.append((c[i], c[j], tuple(events)))
    return out


def _strand_structure(D: TangleDiagram):
    """Oriented strands (entry -> exit) and closed circles of a diagram.

    Strands are ordered by entry label; closure arcs (exit -> entry segments)
    must be free of crossings.  Returns (strands, closed, perm) where each
    strand is (entry_label, exit_label, events) and ``perm`` maps entry rank
    to exit rank.
    """
    strands = []
    for t1, t2, events in _segments(D):
        if t1[2] == "-" and t2[2] == "+":
            strands.append((t1[1], t2[1], events))
        elif t1[2] == "+" and t2[2] == "-":
            if any(e[0] in ("o", "u") for e in events):
                raise SkeinError(
                    "diagram has crossings on a closure arc; only the tangle "
                    "part may carry crossings"
                )
        else:
            raise SkeinError(
                f"boundary tokens {t1!r} -> {t2!r} do not alternate entry/exit"
            )
    strands.sort(key=lambda s: _label_key(s[0]))
    exits = sorted((s[1] for s in strands), key=_label_key)
    exit_rank = {lab: i for i, lab in enumerate(exits)}
    perm = tuple(exit_rank[s[1]] for s in strands)
    has_boundary = {i for i, c in enumerate(D.circles) if any(e[0] == "b" for e in c)}
    closed = [c for i, c in enumerate(D.circles) if i not in has_boundary]
    return strands, closed, perm


# -- oriented evaluation -----------------------------------------------------


def _component_map(D: TangleDiagram) -> Dict[Tuple[str, str], int]:
    """Map each crossing pass to the strand or closed circle carrying it.

    Strands get ids 0.., closed circles continue the numbering.
    """
    strands, closed, _ = _strand_structure(D)
    comp: Dict[Tuple[str, str], int] = {}
    nxt = 0
    for _, _, events in strands:
        for e in events:
            if e[0] in ("o", "u"):
                comp[e] = nxt
        nxt += 1
    for c in closed:
        for e in c:
            if e[0] in ("o", "u"):
                comp[e] = nxt
        nxt += 1
    return comp


def _self_writhe(D: TangleDiagram) -> int:
    comp = _component_map(D)
    total = 0
    for cid, w in D.writhes.items():
        if comp[("o", cid)] == comp[("u", cid)]:
            total += w
    return total


def _smooth_counted(D: TangleDiagram, cid: str, reversed_: bool = False):
    """Smooth a crossing, returning (diagram, number of dropped empty circles).

    Empty circles are unknotted split components; the evaluator owes a
    split-circle factor for each one the surgery silently removed.
    """
    ci, _ = D.locate(("u", cid))
    cj, _ = D.locate(("o", cid))
    if reversed_:
        expected = len(D.circles) if ci == cj else len(D.circles) - 1
        out = D.smooth_reversed(cid)
    else:
        expected = len(D.circles) + 1 if ci == cj else len(D.circles) - 1
        out = D.smooth(cid)
    return out, expected - len(out.circles)


def _memo_key(D: TangleDiagram) -> str:
    return D.rename(D.canonical_renaming()).serialize()


def _homfly_terminal(D: TangleDiagram) -> Dict[Perm, LaurentPoly]:
    strands, closed, perm = _strand_structure(D)
    coeff = v_power(_self_writhe(D)) * DELTA ** len(closed)
    return {perm: coeff}


def _scan_order(circles: Sequence[Sequence], strand_keys, circles_first: bool):
    """Positions of crossing passes in ascending-resolution order.

    ``strand_keys`` maps a circle/segment layout to the strand traversal; here
    it is the list of (sort_key, [(ci, ei), ...]) pairs for the strand parts,
    already cut out of ``circles``; closed circles are traversed from their
    stored start.  The order is frozen by the caller for a whole switch
    chain, which is what guarantees the resolution terminates.
    """
    strand_positions = [p for _, ps in sorted(strand_keys, key=lambda x: x[0]) for p in ps]
    with_boundary = {ci for _, ps in strand_keys for ci, _ in ps}
    for ci, c in enumerate(circles):
        if any(e[0] == "b" for e in c):
            with_boundary.add(ci)
    circle_positions = [
        (ci, ei)
        for ci, c in enumerate(circles)
        if ci not in with_boundary
        for ei, e in enumerate(c)
        if e[0] in ("o", "u")
    ]
    if circles_first:
        return circle_positions + strand_positions
    return strand_positions + circle_positions


def _oriented_strand_positions(circles) -> List[Tuple[object, List[Tuple[int, int]]]]:
    out = []
    for ci, c in enumerate(circles):
        idx = [i for i, e in enumerate(c) if e[0] == "b"]
        n = len(c)
        for pos, i in enumerate(idx):
            j = idx[(pos + 1) % len(idx)]
            if not (c[i][2] == "-" and c[j][2] == "+"):
                continue
            ps = []
            k = (i + 1) % n
            while k != j:
                if c[k][0] in ("o", "u"):
                    ps.append((ci, k))
                k = (k + 1) % n
            out.append((_label_key(c[i][1]), ps))
    return out


def _resolve_chain(D: TangleDiagram, order_fn, on_violation) -> TangleDiagram:
    """Resolve all violations along one frozen traversal of a diagram.

    Walks the traversal once; each crossing first met on an over-pass is
    reported to ``on_violation`` (with the current diagram) and then switched
    in place, which never disturbs earlier positions — that frozen order is
    what guarantees the resolution terminates.  Returns the fully ascending
    terminal diagram.
    """
    circles = [list(c) for c in D.circles]
    writhes = dict(D.writhes)
    order = order_fn(circles)
    seen = set()
    for ci, ei in order:
        kind, cid = circles[ci][ei][0], circles[ci][ei][1]
        if cid in seen:
            continue
        seen.add(cid)
        if kind == "u":
            continue
        on_violation(TangleDiagram(circles, writhes), cid)
        for cj, c in enumerate(circles):
            for ej, e in enumerate(c):
                if e == ("u", cid):
                    circles[cj][ej] = ("o", cid)
        circles[ci][ei] = ("u", cid)
        writhes[cid] = -writhes[cid]
    return TangleDiagram(circles, writhes)


def _homfly_resolve(
    D: TangleDiagram, memo: Dict[str, Dict[Perm, LaurentPoly]], circles_first: bool
) -> Dict[Perm, LaurentPoly]:
    key = _memo_key(D)
    if key in memo:
        return memo[key]

    def order_fn(circles):
        return _scan_order(circles, _oriented_strand_positions(circles), circles_first)

    parts: List[Tuple[LaurentPoly, Dict[Perm, LaurentPoly]]] = []

    def on_violation(cur, cid):
        smoothed, dropped = _smooth_counted(cur, cid)
        factor = Z * DELTA**dropped
        if cur.writhes[cid] < 0:
            factor = -factor
        parts.append((factor, _homfly_resolve(smoothed, memo, circles_first)))

    terminal = _resolve_chain(D, order_fn, on_violation)
    res = dict(_homfly_terminal(terminal))
    for factor, sub in parts:
        for p, c in sub.items():
            res[p] = res.get(p, ZERO) + c * factor
    res = {p: c for p, c in res.items() if c}
    memo[key] = res
    return res


def homfly_eval(
    D: TangleDiagram, normalized: bool = False, circles_first: bool = False
) -> SkeinElement:
    """Evaluate an oriented diagram in the permutation-braid basis.

    ``normalized`` multiplies by ``v^(-writhe)``.  ``circles_first`` resolves
    closed components before the strands; the result is the same, which the
    tests use as an independent cross-check of the resolution strategy.
    """
    strands, _, _ = _strand_structure(D)
    n = len(strands)
    terms = _homfly_resolve(D, {}, circles_first)
    if normalized:
        shift = v_power(-D.writhe())
        terms = {p: c * shift for p, c in terms.items()}
    return SkeinElement(n, "oriented", terms)


# -- multiplication (stacking braid-like tangles) -----------------------------


def _right_letter(
    terms: Dict[Perm, LaurentPoly], k: int, positive: bool
) -> Dict[Perm, LaurentPoly]:
    """Right-multiply by one crossing of top positions k, k+1.

    In the permutation-braid basis a positive letter obeys
    ``b_p * s_k = b_(s_k p)`` when the length grows and
    ``b_p * s_k = b_(s_k p) + z b_p`` when it shrinks; a negative letter is
    the positive one minus ``z`` times the identity on that factor.
    """
    out: Dict[Perm, LaurentPoly] = {}

    def add(p: Perm, c: LaurentPoly) -> None:
        if c:
            out[p] = out.get(p, ZERO) + c

    for p, c in terms.items():
        q = _apply_top(p, k)
        grows = _inversions(q) > _inversions(p)
        if positive:
            add(q, c)
            if not grows:
                add(p, c * Z)
        else:
            add(q, c)
            if grows:
                add(p, -(c * Z))
    return {p: c for p, c in out.items() if c}


def stack(a: SkeinElement, b: SkeinElement) -> SkeinElement:
    """The product of two braid-like elements, ``b`` stacked on top of ``a``."""
    if a.algebra != "oriented" or b.algebra != "oriented":
        raise ValueError("stacking is implemented for oriented elements")
    a._compatible(b)
    words = _words(a.n)
    out: Dict[Perm, LaurentPoly] = {}
    for pb, cb in b.terms.items():
        cur = {pa: ca * cb for pa, ca in a.terms.items()}
        for k in words[pb]:
            cur = _right_letter(cur, k, positive=True)
        for p, c in cur.items():
            out[p] = out.get(p, ZERO) + c
    return SkeinElement(a.n, "oriented", out)


def braid_element(n: int, word: Sequence[int]) -> SkeinElement:
    """The skein element of a braid word (letters +-1, +-2, ...)."""
    terms: Dict[Perm, LaurentPoly] = {tuple(range(n)): ONE}
    for letter in word:
        terms = _right_letter(terms, abs(letter) - 1, positive=letter > 0)
    return SkeinElement(n, "oriented", terms)


# -- matchings (unoriented basis) ---------------------------------------------

Point = Tuple[str, int]


def _brauer_compose(n: int, m1: Matching, m2: Matching) -> Matching:
    """Stack matching m2 on top of m1, forgetting any closed loops.

    Nodes: ``("B", i)`` outer bottom, ``("T", i)`` outer top, ``("M", i)``
    the glued middle row.  m1 connects B/M nodes, m2 connects M/T nodes;
    middle nodes have one edge from each layer, so paths trace uniquely.
    """

    def node(layer: int, p: Point):
        if layer == 0:
            return ("B", p[1]) if p[0] == "b" else ("M", p[1])
        return ("M", p[1]) if p[0] == "b" else ("T", p[1])

    edges: Dict[Tuple[str, int], List[Tuple[str, int]]] = {}
    for layer, m in ((0, m1), (1, m2)):
        for pair in m:
            a, b = tuple(pair)
            na, nb = node(layer, a), node(layer, b)
            edges.setdefault(na, []).append(nb)
            edges.setdefault(nb, []).append(na)
    outer = [("B", i) for i in range(n)] + [("T", i) for i in range(n)]
    out = set()
    done = set()
    for start in outer:
        if start in done:
            continue
        prev, here = None, start
        while True:
            cand = list(edges[here])
            if prev is not None:
                cand.remove(prev)  # multigraph: drop one instance only
            nxt = cand[0]
            if nxt[0] in ("B", "T"):
                out.add(frozenset({start, nxt}))
                done.update({start, nxt})
                break
            prev, here = here, nxt

    def decode(nd):
        return ("b", nd[1]) if nd[0] == "B" else ("t", nd[1])

    return frozenset(frozenset(decode(x) for x in pair) for pair in out)


def _generator_matchings(n: int) -> Dict[str, Matching]:
    def through(except_cols=()):
        return [
            frozenset({("b", i), ("t", i)}) for i in range(n) if i not in except_cols
        ]

    gens: Dict[str, Matching] = {}
    for k in range(n - 1):
        gens[f"s{k + 1}"] = frozenset(
            through((k, k + 1))
            + [frozenset({("b", k), ("t", k + 1)}), frozenset({("b", k + 1), ("t", k)})]
        )
        gens[f"t{k + 1}"] = frozenset(
            through((k, k + 1))
            + [frozenset({("b", k), ("b", k + 1)}), frozenset({("t", k), ("t", k + 1)})]
        )
    return gens


def _matching_names(n: int) -> Dict[Matching, str]:
    """Shortest (then lexicographically least) word naming each matching.

    Words are over the crossing letters ``s1..`` and turnback letters
    ``t1..``, read bottom to top; the identity matching is ``e``.  The name
    identifies the underlying connectivity only — the basis representative is
    the layered diagram of that connectivity.
    """
    ident: Matching = frozenset(
        frozenset({("b", i), ("t", i)}) for i in range(n)
    )
    gens = _generator_matchings(n)
    letters = sorted(gens)  # s-letters sort before t-letters
    names: Dict[Matching, str] = {ident: "e"}
    words: Dict[Matching, Tuple[str, ...]] = {ident: ()}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in sorted(frontier, key=lambda q: words[q]):
            for letter in letters:
                q = _brauer_compose(n, m, gens[letter])
                if q not in words:
                    words[q] = words[m] + (letter,)
                    names[q] = "".join(words[q])
                    nxt.append(q)
        frontier = nxt
    return names


_MATCHING_NAME_CACHE: Dict[int, Dict[Matching, str]] = {}


def matching_name(n: int, matching: Matching) -> str:
    """Display name of a matching over actual boundary tokens."""
    if n == 0:
        return "e"
    if n not in _MATCHING_NAME_CACHE:
        _MATCHING_NAME_CACHE[n] = _matching_names(n)
    coded = _code_matching(n, matching)
    try:
        return _MATCHING_NAME_CACHE[n][coded]
    except KeyError:
        raise SkeinError(f"matching {matching!r} is not realizable on {n} strands")


def _code_matching(n: int, matching: Matching) -> Matching:
    ends = sorted({p for pair in matching for p in pair}, key=lambda p: _label_key(p[0]))
    bottoms = [p for p in ends if p[1] == "-"]
    tops = [p for p in ends if p[1] == "+"]
    code = {}
    for i, p in enumerate(bottoms):
        code[p] = ("b", i)
    for i, p in enumerate(tops):
        code[p] = ("t", i)
    return frozenset(frozenset(code[p] for p in pair) for pair in matching)


# -- unoriented (mod 2) evaluation --------------------------------------------


def closure_pairs(D: TangleDiagram) -> FrozenSet[FrozenSet[Tuple[str, str]]]:
    """The closure arcs of a diagram with honest entry/exit token signs.

    Each arc is recorded as the unordered pair of its boundary endpoints
    ``(label, sign)``.  Diagrams produced by unoriented surgery lose the sign
    convention, so callers performing such surgery must capture the closure
    structure beforehand and pass it through.
    """
    out = []
    for t1, t2, events in _segments(D):
        if t1[2] == "+" and t2[2] == "-":
            out.append(frozenset({(t1[1], t1[2]), (t2[1], t2[2])}))
    return frozenset(out)


def _unoriented_structure(D: TangleDiagram, closure: FrozenSet):
    """Tangle components of an unoriented diagram.

    Returns (components, closed, matching) where each component is the list of
    crossing passes of one boundary-to-boundary segment, traversed from its
    least endpoint, and ``matching`` pairs up the endpoints.
    """
    strands, closed_idx = _classify_segments(D.circles, closure)
    pairs = [key for _, key, _ in strands]
    if len(pairs) != len(set(pairs)):
        raise SkeinError("boundary endpoints of the tangle are not distinct")
    comps = [
        [D.circles[ci][ei] for ci, ei in ps] for _, _, ps in strands
    ]
    closed = [D.circles[i] for i in closed_idx]
    return comps, closed, frozenset(pairs)


def _classify_segments(circles, closure):
    """Split circles at boundary tokens and separate strands from closure arcs.

    A strand and a closure arc may connect the same two boundary points (any
    1-tangle does this); in that case the closure arc is the segment carrying
    the marked point, or failing that the crossing-free one — surgeries only
    ever splice at crossing events, so closure arcs stay crossing-free.
    Returns ``(strands, closed)`` where each strand is
    ``(sort_key, endpoints, positions)`` traversed from its least endpoint and
    ``closed`` lists the indices of circles without boundary tokens.
    """
    segs = []
    closed = []
    for ci, c in enumerate(circles):
        idx = [i for i, e in enumerate(c) if e[0] == "b"]
        if not idx:
            closed.append(ci)
            continue
        n = len(c)
        for pos, i in enumerate(idx):
            j = idx[(pos + 1) % len(idx)]
            ps, has_inf = [], False
            k = (i + 1) % n
            while k != j:
                if c[k][0] in ("o", "u"):
                    ps.append((ci, k))
                elif c[k] == INF:
                    has_inf = True
                k = (k + 1) % n
            key = frozenset({(c[i][1], c[i][2]), (c[j][1], c[j][2])})
            segs.append({"ends": (c[i], c[j]), "key": key, "ps": ps, "inf": has_inf})
    strands = []
    by_key: Dict[FrozenSet, List[dict]] = {}
    for s in segs:
        by_key.setdefault(s["key"], []).append(s)
    for key, group in by_key.items():
        group_strands = list(group)
        if key in closure:
            marked = [s for s in group if s["inf"]]
            if marked:
                chosen = marked[0]
            else:
                free = [s for s in group if not s["ps"]]
                if not free:
                    raise SkeinError(
                        f"no crossing-free segment for closure arc {set(key)!r}"
                    )
                chosen = free[0]
            group_strands.remove(chosen)
        for s in group_strands:
            t1, t2 = s["ends"]
            ps = s["ps"]
            e1 = (_label_key(t1[1]), 0 if t1[2] == "-" else 1)
            e2 = (_label_key(t2[1]), 0 if t2[2] == "-" else 1)
            if e2 < e1:
                e1, ps = e2, list(reversed(ps))
            strands.append((e1, s["key"], ps))
    strands.sort(key=lambda s: s[0])
    return strands, closed


def _unoriented_strand_positions(circles, closure):
    strands, _ = _classify_segments(circles, closure)
    return [(k, ps) for k, _, ps in strands]


def _self_writhe2(D: TangleDiagram, closure: FrozenSet) -> int:
    comps, closed, _ = _unoriented_structure(D, closure)
    comp: Dict[Tuple[str, str], int] = {}
    for i, events in enumerate(list(comps) + list(closed)):
        for e in events:
            if e[0] in ("o", "u"):
                comp[e] = i
    return sum(
        w for cid, w in D.writhes.items() if comp[("o", cid)] == comp[("u", cid)]
    )


def _kauffman_terminal(D: TangleDiagram, closure: FrozenSet) -> Dict[Matching, Poly2]:
    _, closed, matching = _unoriented_structure(D, closure)
    coeff = Poly2.monomial(_self_writhe2(D, closure), 0) * DELTA2 ** len(closed)
    return {matching: coeff}


def _kauffman_resolve(
    D: TangleDiagram, closure: FrozenSet, memo: Dict[str, Dict[Matching, Poly2]]
) -> Dict[Matching, Poly2]:
    key = _memo_key(D)
    if key in memo:
        return memo[key]

    def order_fn(circles):
        return _scan_order(
            circles, _unoriented_strand_positions(circles, closure), circles_first=False
        )

    z2 = Poly2.monomial(0, 1)
    parts: List[Tuple[Poly2, Dict[Matching, Poly2]]] = []

    def on_violation(cur, cid):
        for reversed_ in (False, True):
            sm, dropped = _smooth_counted(cur, cid, reversed_=reversed_)
            factor = z2 * DELTA2**dropped
            parts.append((factor, _kauffman_resolve(sm, closure, memo)))

    terminal = _resolve_chain(D, order_fn, on_violation)
    res = dict(_kauffman_terminal(terminal, closure))
    for factor, sub in parts:
        for m, c in sub.items():
            res[m] = res.get(m, Poly2.zero()) + c * factor
    res = {m: c for m, c in res.items() if c}
    memo[key] = res
    return res


def kauffman_eval_mod2(
    D: TangleDiagram,
    normalized: bool = False,
    closure: Optional[FrozenSet] = None,
) -> SkeinElement:
    """Evaluate a diagram mod 2 in the matching basis.

    ``closure`` names the closure arcs by their endpoint pairs; when omitted
    it is derived from the token signs (exit->entry segments), which is
    correct for diagrams that have not been through unoriented surgery.
    """
    if closure is None:
        closure = closure_pairs(D)
    comps, _, _ = _unoriented_structure(D, closure)
    n = len(comps)
    terms = _kauffman_resolve(D, closure, {})
    if normalized:
        shift = Poly2.monomial(-D.writhe(), 0)
        terms = {m: c * shift for m, c in terms.items()}
    return SkeinElement(n, "mod2", terms)


# -- local tangles and insertion ----------------------------------------------
#
# A partial smoothing replaces the small disk of a Reidemeister move by
# another tangle.  The replacement is spelled as a *local word* read bottom
# to top over the disk strands:
#
#   ("s", k, eps)  a crossing of the strands at positions k, k+1 (1-based,
#                  from the left); the left strand passes under exactly when
#                  eps == +1.
#   ("t", k)       a turnback: the strands at positions k, k+1 are joined
#                  and a fresh pair opens above them (cap plus cup).
#
# The empty word is the identity tangle.  Words with turnbacks connect the
# boundary differently from the move itself; the gluing below rewires the
# ambient diagram accordingly, which is exactly what a smoothing does.

LocalWord = Tuple[Tuple, ...]


def word_from_perm(perm: Perm) -> LocalWord:
    """The canonical positive-braid word realizing a permutation."""
    return tuple(("s", k + 1, 1) for k in _words(len(perm))[perm])


def word_from_matching_name(name: str) -> LocalWord:
    """Local word for a matching basis name such as ``s1t2`` (positive lifts)."""
    if name == "e":
        return ()
    out = []
    for i in range(0, len(name), 2):
        kind, k = name[i], int(name[i + 1])
        out.append(("s", k, 1) if kind == "s" else ("t", k))
    return tuple(out)


class _Arc:
    """A strand of a local tangle while the word is being laid out.

    ``start``/``end`` are boundary points ("b", i)/("t", i) or None while
    that side is still open; ``passes`` is the crossing itinerary in the
    arc's own direction, each entry [cid, "o"/"u", flips] where ``flips``
    counts how often the arc has been reversed since the pass was laid
    down (parity decides the final writhe correction).
    """

    __slots__ = ("start", "end", "passes")

    def __init__(self):
        self.start = None
        self.end = None
        self.passes: List[List] = []

    def reverse(self):
        self.start, self.end = self.end, self.start
        self.passes.reverse()
        for p in self.passes:
            p[2] ^= 1


def _simulate_word(
    n: int, dirs: Sequence[str], word: LocalWord, pols: Sequence[str], mod2: bool
):
    """Lay out a local word over the disk strands.

    ``dirs[i]`` is "up" when the strand at bottom position i+1 flows upward
    (enters the disk there), "down" when it flows downward (exits there).
    ``pols`` fixes, per turnback letter, which new end is the flow source
    ("tail_left" or "tail_right").  Returns (arcs, loops, writhes) with arcs
    as (start, end, passes) triples, loops as pass tuples, and writhes of
    the new crossings relative to the recorded arc directions.  Raises
    SkeinError if a join is orientation-incoherent and mod2 is false.
    """
    arcs: Dict[int, _Arc] = {}
    # ends[pos] = (arc id, "head" | "tail"); a head end flows upward.
    ends: Dict[int, Tuple[int, str]] = {}
    loops: List[Tuple] = []
    writhes: Dict[str, int] = {}
    counter = itertools.count(1)
    for i, direction in enumerate(dirs, start=1):
        aid = next(counter)
        arc = _Arc()
        if direction == "up":
            arc.start = ("b", i)
            ends[i] = (aid, "head")
        else:
            arc.end = ("b", i)
            ends[i] = (aid, "tail")
        arcs[aid] = arc

    def add_pass(pos: int, cid: str, lab: str):
        aid, pol = ends[pos]
        entry = [cid, lab, 0]
        if pol == "head":
            arcs[aid].passes.append(entry)
        else:
            arcs[aid].passes.insert(0, entry)

    t_index = 0
    for letter in word:
        if letter[0] == "s":
            _, k, eps = letter
            if k < 1 or k + 1 > n:
                raise SkeinError(f"letter {letter!r} does not fit {n} strands")
            dirL = "up" if ends[k][1] == "head" else "down"
            dirR = "up" if ends[k + 1][1] == "head" else "down"
            w = eps if dirL == dirR else -eps
            cid = f"y{len(writhes) + 1}"
            writhes[cid] = w
            add_pass(k, cid, "u" if eps == 1 else "o")
            add_pass(k + 1, cid, "o" if eps == 1 else "u")
            ends[k], ends[k + 1] = ends[k + 1], ends[k]
        elif letter[0] == "t":
            k = letter[1]
            if k < 1 or k + 1 > n:
                raise SkeinError(f"letter {letter!r} does not fit {n} strands")
            (a1, p1), (a2, p2) = ends.pop(k), ends.pop(k + 1)
            if a1 == a2:
                # joining the two open sides of one arc closes a free loop
                arc = arcs.pop(a1)
                loops.append(tuple(arc.passes))
            else:
                if p1 == p2:
                    if not mod2:
                        raise SkeinError("turnback join cannot be oriented")
                    arcs[a2].reverse()
                    p2 = "tail" if p2 == "head" else "head"
                    for pos, (aid, pol) in list(ends.items()):
                        if aid == a2:
                            ends[pos] = (aid, "tail" if pol == "head" else "head")
                first_id, second_id = (a1, a2) if p1 == "head" else (a2, a1)
                first, second = arcs.pop(first_id), arcs.pop(second_id)
                merged = _Arc()
                merged.start, merged.end = first.start, second.end
                merged.passes = first.passes + second.passes
                mid = next(counter)
                arcs[mid] = merged
                for pos, (aid, pol) in list(ends.items()):
                    if aid in (first_id, second_id):
                        ends[pos] = (mid, pol)
            aid = next(counter)
            arcs[aid] = _Arc()
            pol = pols[t_index] if t_index < len(pols) else "tail_left"
            t_index += 1
            if pol == "tail_left":
                ends[k] = (aid, "tail")
                ends[k + 1] = (aid, "head")
            else:
                ends[k] = (aid, "head")
                ends[k + 1] = (aid, "tail")
        else:
            raise SkeinError(f"unknown local letter {letter!r}")
    for pos in range(1, n + 1):
        aid, pol = ends[pos]
        if pol == "head":
            arcs[aid].end = ("t", pos)
        else:
            arcs[aid].start = ("t", pos)
    out_arcs = []
    for arc in arcs.values():
        if arc.start is None or arc.end is None:
            raise SkeinError("local word left an arc dangling")
        out_arcs.append((arc.start, arc.end, tuple(arc.passes)))
    return out_arcs, loops, writhes


class MoveSite:
    """The disk of a Reidemeister move, located inside a diagram.

    ``n`` strands run through the disk; ``dirs`` gives their bottom-edge
    directions ("up"/"down", positions 1..n).  ``deleted`` are the crossing
    ids of the move.  ``attach`` maps each disk boundary point ("b", i) or
    ("t", i) to a (branch key, "entry"/"exit") pair, and ``branch_passes``
    maps each branch key to its ordered pass pair along the diagram
    (entry-side pass first).
    """

    __slots__ = ("n", "dirs", "deleted", "attach", "branch_passes", "in_points", "out_points")

    def __init__(self, n, dirs, deleted, attach, branch_passes):
        self.n = n
        self.dirs = tuple(dirs)
        self.deleted = tuple(deleted)
        self.attach = dict(attach)
        self.branch_passes = dict(branch_passes)
        self.in_points = frozenset(
            p for p, (br, side) in self.attach.items() if side == "entry"
        )
        self.out_points = frozenset(
            p for p, (br, side) in self.attach.items() if side == "exit"
        )


def _ordered_pair(D: TangleDiagram, e1, e2):
    """The two adjacent passes of one branch, in circle order."""
    ci, i = D.locate(e1)
    c = D.circles[ci]
    m = len(c)
    if c[(i + 1) % m] == e2:
        return (e1, e2)
    if c[(i - 1) % m] == e2:
        return (e2, e1)
    raise SkeinError(f"passes {e1!r}, {e2!r} are not adjacent; no move disk there")


def move_site(D: TangleDiagram, cls) -> MoveSite:
    """Locate the disk of a classified move inside its before-frame.

    ``cls`` carries kind ("RIII"/"RII"/"RI"), local_type and roles as
    produced by the movie classifier.
    """
    roles = dict(cls.roles)
    if cls.kind == "RIII":
        d, hm, ml = roles["d"], roles["hm"], roles["ml"]
        passes = {
            "high": _ordered_pair(D, ("o", d), ("o", hm)),
            "mid": _ordered_pair(D, ("o", ml), ("u", hm)),
            "low": _ordered_pair(D, ("u", d), ("u", ml)),
        }
        (a, b, c), kind = _fitted.SLOT_BY_LOCAL_TYPE[cls.local_type]
        slots = {"low": a, "mid": b, "high": c}
        attach = {}
        dirs = ["up", "up", "up"]
        for br, s in slots.items():
            if kind == "star" and br == "mid":
                dirs[s - 1] = "down"
                attach[("t", s)] = (br, "entry")
                attach[("b", s)] = (br, "exit")
            else:
                attach[("b", s)] = (br, "entry")
                attach[("t", 4 - s)] = (br, "exit")
        return MoveSite(3, dirs, (d, hm, ml), attach, passes)
    if cls.kind == "RII":
        x, y = roles["d"]
        passes = {
            "over": _ordered_pair(D, ("o", x), ("o", y)),
            "under": _ordered_pair(D, ("u", x), ("u", y)),
        }
        # Branches through an equal-tangency disk run antiparallel (their
        # pass pairs read in opposite circle orders), so the under strand
        # enters from the top; opposite tangencies run parallel.
        antiparallel = cls.local_type.startswith("II-")
        if antiparallel:
            attach = {
                ("b", 1): ("over", "entry"),
                ("t", 1): ("over", "exit"),
                ("t", 2): ("under", "entry"),
                ("b", 2): ("under", "exit"),
            }
            dirs = ("up", "down")
        else:
            attach = {
                ("b", 1): ("over", "entry"),
                ("t", 1): ("over", "exit"),
                ("b", 2): ("under", "entry"),
                ("t", 2): ("under", "exit"),
            }
            dirs = ("up", "up")
        return MoveSite(2, dirs, (x, y), attach, passes)
    if cls.kind == "RI":
        cid = roles["d"]
        passes = {"c": _ordered_pair(D, ("o", cid), ("u", cid))}
        attach = {("b", 1): ("c", "entry"), ("t", 1): ("c", "exit")}
        return MoveSite(1, ("up",), (cid,), attach, passes)
    raise SkeinError(f"no move disk for kind {cls.kind!r}")


def _splice_word(D: TangleDiagram, site: MoveSite, word: LocalWord, mod2: bool) -> TangleDiagram:
    """Replace the move disk by the tangle spelled by a local word."""
    last_err = None
    n_t = sum(1 for letter in word if letter[0] == "t")
    if mod2:
        pol_choices = [("tail_left",) * n_t]
    else:
        pol_choices = list(itertools.product(("tail_left", "tail_right"), repeat=n_t))
    for pols in pol_choices:
        try:
            arcs, loops, local_writhes = _simulate_word(site.n, site.dirs, word, pols, mod2)
            if not mod2:
                for start, end, _ in arcs:
                    if start not in site.in_points or end not in site.out_points:
                        raise SkeinError("local tangle flows against the disk boundary")
            return _assemble(D, site, arcs, loops, local_writhes, mod2)
        except SkeinError as exc:
            last_err = exc
    raise last_err


def _assemble(D, site, arcs, loops, local_writhes, mod2):
    site_events = {e for pair in site.branch_passes.values() for e in pair}
    first_of = {pair[0]: br for br, pair in site.branch_passes.items()}
    second_of = {pair[1]: br for br, pair in site.branch_passes.items()}
    point_of = {}
    for point, (br, side) in site.attach.items():
        point_of[(br, side)] = point

    rename = {}
    used = set(D.writhes)
    counter = itertools.count(1)
    for cid in local_writhes:
        nid = f"n{next(counter)}"
        while nid in used:
            nid = f"n{next(counter)}"
        used.add(nid)
        rename[cid] = nid

    # edges: (from_point, to_point, events); None points on untouched circles
    edges = []
    untouched = []
    for circle in D.circles:
        hits = [i for i, e in enumerate(circle) if e in site_events]
        if not hits:
            untouched.append(circle)
            continue
        m = len(circle)
        starts = sorted(i for i in hits if circle[i] in first_of)
        for i in starts:
            if circle[(i + 1) % m] not in site_events:
                raise SkeinError("move disk is broken in the diagram")
        # walk from each pair's end to the next pair's start
        for i in starts:
            br_from = first_of[circle[i]]
            j = (i + 2) % m
            events = []
            while circle[j % m] not in site_events:
                events.append(circle[j % m])
                j = (j + 1) % m
            br_to = first_of[circle[j]]
            edges.append(
                (point_of[(br_from, "exit")], point_of[(br_to, "entry")], tuple(events))
            )
    for start, end, passes in arcs:
        events = tuple((lab, rename[cid]) for cid, lab, _ in passes)
        edges.append((start, end, events))

    incidence: Dict[Tuple, List[Tuple[int, str]]] = {}
    for idx, (frm, to, _) in enumerate(edges):
        incidence.setdefault(frm, []).append((idx, "frm"))
        incidence.setdefault(to, []).append((idx, "to"))
    for point, incs in incidence.items():
        if len(incs) != 2:
            raise SkeinError(f"disk boundary point {point!r} is not glued exactly twice")

    used_edges = set()
    reversed_edges = set()
    circles_out = []
    for start_idx in range(len(edges)):
        if start_idx in used_edges:
            continue
        walk = []
        idx, direction = start_idx, 1
        while True:
            used_edges.add(idx)
            if direction == -1:
                reversed_edges.add(idx)
            walk.append((idx, direction))
            frm, to, _ = edges[idx]
            point = to if direction == 1 else frm
            nxt = [(i, side) for i, side in incidence[point] if i != idx]
            if len(nxt) != 1:
                raise SkeinError("gluing point is not a 1-manifold junction")
            nidx, nside = nxt[0]
            ndir = 1 if nside == "frm" else -1
            if nidx == start_idx and ndir == 1:
                break
            if nidx in used_edges and nidx != start_idx:
                raise SkeinError("gluing walk revisited an edge")
            if nidx == start_idx and ndir == -1:
                raise SkeinError("gluing walk closed against itself")
            idx, direction = nidx, ndir
        if not mod2 and reversed_edges:
            raise SkeinError("gluing this local tangle would reverse a strand")
        events = []
        for idx, direction in walk:
            evs = edges[idx][2]
            events.extend(evs if direction == 1 else reversed(evs))
        circles_out.append(tuple(events))

    pass_edge = {}
    for idx, (_, _, evs) in enumerate(edges):
        for e in evs:
            if e[0] in ("o", "u"):
                pass_edge[e] = idx
    writhes = {}
    for cid, w in D.writhes.items():
        if cid in site.deleted:
            continue
        flips = sum(
            1
            for lab in ("o", "u")
            if pass_edge.get((lab, cid)) in reversed_edges
        )
        writhes[cid] = w if flips % 2 == 0 else -w
    for cid, w in local_writhes.items():
        nid = rename[cid]
        flips = sum(
            1
            for lab in ("o", "u")
            if pass_edge.get((lab, nid)) in reversed_edges
        )
        # fold in the reversals recorded during the word layout
        writhes[nid] = w if flips % 2 == 0 else -w
    sim_flips: Dict[str, int] = {}
    for _, _, passes in arcs:
        for cid, _, f in passes:
            sim_flips[cid] = sim_flips.get(cid, 0) + f
    for passes in loops:
        for cid, _, f in passes:
            sim_flips[cid] = sim_flips.get(cid, 0) + f
    for cid, f in sim_flips.items():
        nid = rename[cid]
        if f % 2:
            writhes[nid] = -writhes[nid]

    for passes in loops:
        circles_out.append(tuple((lab, rename[cid]) for cid, lab, _ in passes))
    circles_out.extend(untouched)
    meta = {k: v for k, v in D.meta.items() if k not in site.deleted}
    return TangleDiagram(circles_out, writhes, meta)


def splice(D: TangleDiagram, cls, word: LocalWord) -> TangleDiagram:
    """The diagram with the move disk of ``cls`` replaced by one local word."""
    site = move_site(D, cls)
    mod2 = any(letter[0] == "t" for letter in word)
    return _splice_word(D, site, word, mod2)


def insert_local(D: TangleDiagram, cls, S, *, algebra: Optional[str] = None, closure=None) -> SkeinElement:
    """Replace the move disk of ``cls`` in ``D`` by a local skein element.

    ``S`` is a :class:`SkeinElement` over the disk boundary (basis tangles
    are inserted with positive crossing lifts) or an iterable of
    ``(coefficient, local word)`` pairs, in which case ``algebra`` must be
    given.  Each basis tangle replaces the disk and the glued diagram is
    evaluated; the coefficient-weighted sum over ``∂T`` is returned.
    ``closure`` overrides the closure structure used for mod-2 evaluation
    (default: read off the unspliced diagram).
    """
    site = move_site(D, cls)
    if isinstance(S, SkeinElement):
        algebra = S.algebra
        if S.n != site.n:
            raise SkeinError(
                f"element on {S.n} strands cannot fill a {site.n}-strand disk"
            )
        pairs = []
        for key, coeff in S.terms.items():
            if algebra == "oriented":
                pairs.append((coeff, word_from_perm(key)))
            else:
                name = key if isinstance(key, str) else matching_name(S.n, key)
                pairs.append((coeff, word_from_matching_name(name)))
    else:
        if algebra not in ("oriented", "mod2"):
            raise SkeinError("explicit word lists need algebra='oriented' or 'mod2'")
        pairs = [(coeff, tuple(word)) for coeff, word in S]
    mod2 = algebra == "mod2"
    if mod2 and closure is None:
        closure = closure_pairs(D)
    total: Optional[SkeinElement] = None
    for coeff, word in pairs:
        glued = _splice_word(D, site, word, mod2)
        if mod2:
            value = kauffman_eval_mod2(glued, closure=closure)
        else:
            value = homfly_eval(glued)
        value = value.scale(coeff)
        total = value if total is None else total + value
    if total is None:
        bdry = closure if mod2 else None
        empty = TangleDiagram(D.circles, D.writhes, D.meta)
        base = kauffman_eval_mod2(empty, closure=bdry) if mod2 else homfly_eval(empty)
        return base._like({})
    return total
