"""Reidemeister moves as events between diagram frames, and their classifier.

A movie is an alternating sequence of frames (tangle diagrams) and moves;
``moves[i]`` rewrites ``frames[i]`` into ``frames[i + 1]``.  Crossing ids are
stable across frames, so a crossing that survives a move keeps its identity.

A move event only names the participating crossings (plus, for newly created
crossings, where to splice their passes in).  Sign, local type, global type,
and the crossing roles are all derived from the two adjacent frames by
``classify``; hand-authored annotations cannot drift out of sync with the
frames because there are none.

Move kinds on the Gauss code:

* RI   — create or delete one crossing whose two passes are adjacent (a curl)
* RII  — create or delete two opposite-writhe crossings whose over-passes are
  adjacent and whose under-passes are adjacent (a tangency)
* RIII — swap three adjacent pairs of passes, one pair per branch of a
  triple-crossing configuration (a triple move)
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from . import _fitted
from .diagram import INF, DiagramError, Event, TangleDiagram

Pair = Tuple[Event, Event]
Pairing = Tuple[Pair, Pair, Pair]


class MovieError(ValueError):
    """Raised for illegal moves, unclassifiable patterns, or bad movie files."""


# ---------------------------------------------------------------------------
# move events


class CurlSite(NamedTuple):
    """Where a curl-creating move splices in the new adjacent pair."""

    anchor: Optional[Event]  # insert right after this event ...
    order: str  # "uo" (a type-0 curl) or "ou" (a type-1 curl)
    writhe: int
    circle: int = 0  # ... or into this (empty) circle when anchor is None


class TangencySite(NamedTuple):
    """Where a tangency-creating move splices in the two new pairs.

    The over pair is spliced first, so the under anchor may name one of the
    just-created over-passes.
    """

    over_anchor: Optional[Event]
    over_ids: Tuple[str, str]  # circle order of the two over-passes
    under_anchor: Optional[Event]
    under_ids: Tuple[str, str]  # circle order of the two under-passes
    writhe_first: int  # writhe of the event's first id; the other is opposite
    over_circle: int = 0
    under_circle: int = 0


@dataclass(frozen=True)
class MoveEvent:
    """One Reidemeister move: which crossings take part, and which way.

    ``dir`` is +1/-1 for curl and tangency moves (create/delete).  For triple
    moves it records the structural side of the move: +1 exactly when the
    after frame reads (u_d, u_ml) along the lowest branch (0 = unspecified;
    it is filled in when a movie is assembled).  ``detail`` carries splice
    sites for creating moves and an optional explicit branch pairing for
    triple moves; it is derivable from the adjacent frames and excluded from
    comparisons.
    """

    kind: str
    ids: Tuple[str, ...]
    dir: int = 0
    detail: Any = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("RI", "RII", "RIII"):
            raise MovieError(f"unknown move kind {self.kind!r}")
        object.__setattr__(self, "ids", tuple(self.ids))
        need = {"RI": 1, "RII": 2, "RIII": 3}[self.kind]
        if len(self.ids) != need or len(set(self.ids)) != need:
            raise MovieError(f"{self.kind} move needs {need} distinct crossing ids, got {self.ids!r}")
        if self.dir not in (-1, 0, 1):
            raise MovieError(f"move direction must be -1, 0 or +1, got {self.dir!r}")
        if self.kind != "RIII" and self.dir == 0:
            raise MovieError(f"{self.kind} move needs an explicit create/delete direction")


def curl_create(cid: str, anchor: Optional[Event], order: str, writhe: int, circle: int = 0) -> MoveEvent:
    return MoveEvent("RI", (cid,), 1, CurlSite(anchor, order, writhe, circle))


def curl_delete(cid: str) -> MoveEvent:
    return MoveEvent("RI", (cid,), -1)


def tangency_create(
    first: str,
    second: str,
    over_anchor: Optional[Event],
    over_ids: Tuple[str, str],
    under_anchor: Optional[Event],
    under_ids: Tuple[str, str],
    writhe_first: int,
    over_circle: int = 0,
    under_circle: int = 0,
) -> MoveEvent:
    site = TangencySite(over_anchor, tuple(over_ids), under_anchor, tuple(under_ids), writhe_first, over_circle, under_circle)
    return MoveEvent("RII", (first, second), 1, site)


def tangency_delete(first: str, second: str) -> MoveEvent:
    return MoveEvent("RII", (first, second), -1)


def triple_move(a: str, b: str, c: str, pairs: Optional[Pairing] = None, side: int = 0) -> MoveEvent:
    return MoveEvent("RIII", (a, b, c), side, tuple(pairs) if pairs else None)


# ---------------------------------------------------------------------------
# move classes


@dataclass(frozen=True)
class MoveClass:
    """The full classification of one move, derived from its frames.

    ``local_type`` is 1..8 for triple moves, one of ``II+0 II-0 II+1 II-1``
    for tangencies, and the curl writhe for curl moves.  ``global_type`` is
    one of ``ra rb rc la lb lc`` for triple moves and the crossing type 0/1
    otherwise.  ``roles`` names the distinguished crossing(s): for a triple
    move ``d`` (highest-lowest branch), ``hm`` (highest-middle) and ``ml``
    (middle-lowest); for the other kinds just ``d``.
    """

    kind: str
    sign: int
    local_type: Any
    global_type: Any
    roles: Tuple[Tuple[str, Any], ...]

    def role(self, name: str) -> Any:
        return dict(self.roles)[name]


# ---------------------------------------------------------------------------
# splice helpers on mutable circle lists


def _as_lists(d: TangleDiagram) -> List[List[Event]]:
    return [list(c) for c in d.circles]


def _find(circles: List[List[Event]], event: Event) -> Tuple[int, int]:
    for ci, c in enumerate(circles):
        for i, e in enumerate(c):
            if e == event:
                return ci, i
    raise MovieError(f"splice anchor {event!r} not found")


def _insert_after(circles: List[List[Event]], anchor: Optional[Event], circle: int, events: Sequence[Event]) -> None:
    if anchor is None:
        if not 0 <= circle < len(circles) or circles[circle]:
            raise MovieError("anchorless splice needs an existing empty circle")
        circles[circle].extend(events)
    else:
        ci, i = _find(circles, anchor)
        circles[ci][i + 1 : i + 1] = list(events)


# ---------------------------------------------------------------------------
# curl moves


def _curl_pattern(d: TangleDiagram, cid: str) -> str:
    """Return "uo"/"ou" if the passes of ``cid`` form an adjacent pair."""
    if cid not in d.writhes:
        raise MovieError(f"unknown crossing {cid!r}")
    ci, oi = d.locate(("o", cid))
    cj, ui = d.locate(("u", cid))
    if ci != cj:
        raise MovieError(f"passes of {cid!r} lie on different circles")
    n = len(d.circles[ci])
    if (ui + 1) % n == oi:
        return "uo"
    if (oi + 1) % n == ui:
        return "ou"
    raise MovieError(f"passes of {cid!r} are not adjacent")


def _apply_curl_create(d: TangleDiagram, e: MoveEvent) -> TangleDiagram:
    site = e.detail
    if not isinstance(site, CurlSite):
        raise MovieError("curl creation needs a CurlSite detail")
    (cid,) = e.ids
    if cid in d.writhes:
        raise MovieError(f"crossing {cid!r} already present")
    if site.order not in ("uo", "ou"):
        raise MovieError(f"curl order must be 'uo' or 'ou', got {site.order!r}")
    events = [("u", cid), ("o", cid)] if site.order == "uo" else [("o", cid), ("u", cid)]
    circles = _as_lists(d)
    _insert_after(circles, site.anchor, site.circle, events)
    writhes = dict(d.writhes)
    writhes[cid] = site.writhe
    return TangleDiagram(circles, writhes, d.meta)


def _apply_curl_delete(d: TangleDiagram, e: MoveEvent) -> TangleDiagram:
    (cid,) = e.ids
    _curl_pattern(d, cid)  # legality
    drop = {("o", cid), ("u", cid)}
    circles = [[ev for ev in c if ev not in drop] for c in d.circles]
    writhes = dict(d.writhes)
    del writhes[cid]
    meta = {k: v for k, v in d.meta.items() if k != cid}
    return TangleDiagram(circles, writhes, meta)


def _curl_site(d: TangleDiagram, cid: str) -> CurlSite:
    """Reconstruct the splice site that recreates the curl ``cid`` of ``d``."""
    order = _curl_pattern(d, cid)
    first = ("u", cid) if order == "uo" else ("o", cid)
    ci, i = d.locate(first)
    c = d.circles[ci]
    n = len(c)
    pair = {("u", cid), ("o", cid)}
    j = (i - 1) % n
    while c[j] in pair and j != i:
        j = (j - 1) % n
    if j == i or c[j] in pair:
        deleted = _apply_curl_delete(d, curl_delete(cid))
        return CurlSite(None, order, d.writhes[cid], deleted.circles.index(()))
    return CurlSite(c[j], order, d.writhes[cid])


# ---------------------------------------------------------------------------
# tangency moves


class _Tangency(NamedTuple):
    over_order: Tuple[str, str]
    under_order: Tuple[str, str]
    tangent: str  # "equal" | "opposite" tangent direction at the touch point
    subtype: int  # crossing type shared by both crossings


def _pair_order(d: TangleDiagram, e1: Event, e2: Event) -> Tuple[str, str]:
    """Crossing-id order of two adjacent passes along their circle."""
    try:
        ci, i = d.locate(e1)
    except DiagramError as exc:
        raise MovieError(str(exc))
    c = d.circles[ci]
    n = len(c)
    if c[(i + 1) % n] == e2:
        return (e1[1], e2[1])
    if c[(i - 1) % n] == e2:
        return (e2[1], e1[1])
    raise MovieError(f"{e1!r} and {e2!r} are not adjacent")


def _tangency_pattern(d: TangleDiagram, a: str, b: str) -> _Tangency:
    for cid in (a, b):
        if cid not in d.writhes:
            raise MovieError(f"unknown crossing {cid!r}")
    if d.writhes[a] != -d.writhes[b]:
        raise MovieError(f"tangency crossings {a!r},{b!r} must have opposite writhes")
    over_order = _pair_order(d, ("o", a), ("o", b))
    under_order = _pair_order(d, ("u", a), ("u", b))
    # Convention (pinned by the curl-slide examples): pairs reading in
    # opposite circle orders form the tangency with *equal* tangent
    # directions, pairs reading in the same order the *opposite* one.
    tangent = "equal" if over_order != under_order else "opposite"
    t = d.crossing_type(a)
    if d.crossing_type(b) != t:
        raise MovieError(f"tangency crossings {a!r},{b!r} have different types")
    return _Tangency(over_order, under_order, tangent, t)


def _apply_tangency_create(d: TangleDiagram, e: MoveEvent) -> TangleDiagram:
    site = e.detail
    if not isinstance(site, TangencySite):
        raise MovieError("tangency creation needs a TangencySite detail")
    a, b = e.ids
    if set(site.over_ids) != {a, b} or set(site.under_ids) != {a, b}:
        raise MovieError("tangency splice ids do not match the event ids")
    if a in d.writhes or b in d.writhes:
        raise MovieError(f"crossing {a!r} or {b!r} already present")
    circles = _as_lists(d)
    over = [("o", site.over_ids[0]), ("o", site.over_ids[1])]
    under = [("u", site.under_ids[0]), ("u", site.under_ids[1])]
    _insert_after(circles, site.over_anchor, site.over_circle, over)
    _insert_after(circles, site.under_anchor, site.under_circle, under)
    writhes = dict(d.writhes)
    writhes[a] = site.writhe_first
    writhes[b] = -site.writhe_first
    out = TangleDiagram(circles, writhes, d.meta)
    _tangency_pattern(out, a, b)  # legality of the freshly spliced pattern
    return out


def _apply_tangency_delete(d: TangleDiagram, e: MoveEvent) -> TangleDiagram:
    a, b = e.ids
    _tangency_pattern(d, a, b)  # legality
    drop = {("o", a), ("o", b), ("u", a), ("u", b)}
    circles = [[ev for ev in c if ev not in drop] for c in d.circles]
    writhes = dict(d.writhes)
    del writhes[a]
    del writhes[b]
    meta = {k: v for k, v in d.meta.items() if k not in (a, b)}
    return TangleDiagram(circles, writhes, meta)


def _tangency_site(d: TangleDiagram, ids: Tuple[str, str]) -> TangencySite:
    """Reconstruct the splice site that recreates the tangency ``ids`` of ``d``."""
    a, b = ids
    pat = _tangency_pattern(d, a, b)
    all_four = {("o", a), ("o", b), ("u", a), ("u", b)}
    unders = {("u", a), ("u", b)}
    deleted = _apply_tangency_delete(d, tangency_delete(a, b))
    empties = [i for i, c in enumerate(deleted.circles) if not c]

    def back_anchor(first: Event, skip: set) -> Tuple[Optional[Event], int]:
        ci, i = d.locate(first)
        c = d.circles[ci]
        n = len(c)
        j = (i - 1) % n
        while c[j] in skip and j != i:
            j = (j - 1) % n
        if j == i or c[j] in skip:
            if not empties:
                raise MovieError("cannot place an anchorless tangency splice")
            return None, empties.pop(0)
        return c[j], 0

    over_anchor, over_circle = back_anchor(("o", pat.over_order[0]), all_four)
    under_anchor, under_circle = back_anchor(("u", pat.under_order[0]), unders)
    return TangencySite(
        over_anchor,
        pat.over_order,
        under_anchor,
        pat.under_order,
        d.writhes[a],
        over_circle,
        under_circle,
    )


# ---------------------------------------------------------------------------
# triple moves


def _triple_pairings(d: TangleDiagram, ids: Sequence[str]) -> List[Pairing]:
    """All branch pairings of the six passes into three adjacent pairs.

    A valid pairing has one over-over (highest branch), one under-under
    (lowest) and one mixed (middle) pair, and its three id sets are the three
    2-subsets of ``ids``.
    """
    evset = {(k, cid) for cid in ids for k in ("o", "u")}
    candidates: List[Pair] = []
    for c in d.circles:
        n = len(c)
        for i in range(n):
            e1, e2 = c[i], c[(i + 1) % n]
            if e1 in evset and e2 in evset and e1[1] != e2[1]:
                if n == 2 and i == 1:
                    continue  # same unordered adjacency as i == 0
                candidates.append((e1, e2))
    out: List[Pairing] = []
    for combo in itertools.combinations(candidates, 3):
        events = [ev for p in combo for ev in p]
        if len(set(events)) != 6:
            continue
        idsets = [frozenset((p[0][1], p[1][1])) for p in combo]
        if len(set(idsets)) != 3:
            continue
        kinds = sorted("".join(sorted((p[0][0], p[1][0]))) for p in combo)
        if kinds != ["oo", "ou", "uu"]:
            continue
        out.append(tuple(combo))
    return out


def _swap_pairs(d: TangleDiagram, pairing: Pairing) -> TangleDiagram:
    circles = _as_lists(d)
    for e1, e2 in pairing:
        ci, i = _find(circles, e1)
        j = (i + 1) % len(circles[ci])
        if circles[ci][j] != e2:
            raise MovieError(f"{e1!r} and {e2!r} are not adjacent")
        circles[ci][i], circles[ci][j] = e2, e1
    return TangleDiagram(circles, d.writhes, d.meta)


def _triple_roles(pairing: Pairing) -> Tuple[str, str, str, Pair]:
    """Return (d, hm, ml, lowest-branch pair) for a branch pairing."""
    by_kind: Dict[str, Pair] = {}
    for p in pairing:
        by_kind["".join(sorted((p[0][0], p[1][0])))] = p
    high, mid, low = by_kind["oo"], by_kind["ou"], by_kind["uu"]
    ids = lambda p: {p[0][1], p[1][1]}
    d = (ids(high) & ids(low)).pop()
    hm = (ids(high) & ids(mid)).pop()
    ml = (ids(mid) & ids(low)).pop()
    return d, hm, ml, low


def _triple_side(pairing: Pairing) -> int:
    """+1 when the move's after frame reads (u_d, u_ml) on the lowest branch."""
    d, hm, ml, low = _triple_roles(pairing)
    if low == ((("u", ml)), ("u", d)):
        return 1
    if low == ((("u", d)), ("u", ml)):
        return -1
    raise MovieError("unreadable lowest-branch order")


def _resolve_pairing(before: TangleDiagram, e: MoveEvent, after: TangleDiagram) -> Pairing:
    if e.detail is not None:
        pairing = tuple(e.detail)
        if _swap_pairs(before, pairing) != after:
            raise MovieError("triple-move pairing does not reproduce the next frame")
        return pairing
    matches = [p for p in _triple_pairings(before, e.ids) if _swap_pairs(before, p) == after]
    if not matches:
        raise MovieError(f"no triple-move pairing of {e.ids!r} matches the frames")
    if len(matches) > 1 and len({_triple_roles(p)[:3] for p in matches}) > 1:
        raise MovieError(f"ambiguous triple-move pairing of {e.ids!r}")
    return matches[0]


def _apply_triple(d: TangleDiagram, e: MoveEvent) -> TangleDiagram:
    if e.detail is not None:
        return _swap_pairs(d, tuple(e.detail))
    pairings = _triple_pairings(d, e.ids)
    results = {_swap_pairs(d, p) for p in pairings}
    if not results:
        raise MovieError(f"no triple-move configuration on {e.ids!r}")
    if len(results) > 1:
        raise MovieError(f"ambiguous triple-move configuration on {e.ids!r}; a pairing detail is required")
    return results.pop()


# ---------------------------------------------------------------------------
# the public move operations


def apply_move(d: TangleDiagram, e: MoveEvent) -> TangleDiagram:
    """Rewrite a frame by one move; raises MovieError on illegal moves."""
    try:
        if e.kind == "RI":
            return _apply_curl_create(d, e) if e.dir > 0 else _apply_curl_delete(d, e)
        if e.kind == "RII":
            return _apply_tangency_create(d, e) if e.dir > 0 else _apply_tangency_delete(d, e)
        return _apply_triple(d, e)
    except DiagramError as exc:
        raise MovieError(f"illegal {e.kind} move on {e.ids!r}: {exc}")


def invert_event(e: MoveEvent, before: TangleDiagram, after: TangleDiagram) -> MoveEvent:
    """The event that rewrites ``after`` back into ``before``."""
    if e.kind == "RIII":
        pairing = _resolve_pairing(before, e, after)
        reverse = tuple((q, p) for p, q in pairing)
        return MoveEvent("RIII", e.ids, -_triple_side(pairing), reverse)
    if e.dir > 0:
        return MoveEvent(e.kind, e.ids, -1)
    if e.kind == "RI":
        return MoveEvent("RI", e.ids, 1, _curl_site(before, e.ids[0]))
    return MoveEvent("RII", e.ids, 1, _tangency_site(before, e.ids))


def check_move(before: TangleDiagram, e: MoveEvent, after: TangleDiagram) -> None:
    """Raise MovieError unless ``e`` rewrites ``before`` into ``after`` exactly."""
    if e.kind == "RIII":
        _resolve_pairing(before, e, after)
        return
    if e.dir > 0 and e.detail is None:
        # a creation without a splice site is checked by deleting backwards
        if apply_move(after, MoveEvent(e.kind, e.ids, -1)) != before:
            raise MovieError("created pattern does not reduce back to the previous frame")
        return
    if apply_move(before, e) != after:
        raise MovieError("move does not reproduce the next frame")


def classify(before: TangleDiagram, e: MoveEvent, after: TangleDiagram) -> MoveClass:
    """Derive sign, local type, global type, and roles from the frames."""
    if e.kind == "RIII":
        pairing = _resolve_pairing(before, e, after)
        d, hm, ml, _low = _triple_roles(pairing)
        writhe_triple = (before.writhes[d], before.writhes[hm], before.writhes[ml])
        local = _fitted.LOCAL_TYPE_BY_WRITHES[writhe_triple]
        signature = tuple(before.crossing_type(x) for x in (d, hm, ml))
        try:
            glob = _fitted.GLOBAL_TYPE_BY_SIGNATURE[signature]
        except KeyError:
            raise MovieError(f"impossible marked-point signature {signature}")
        side = _triple_side(pairing)
        if e.dir and e.dir != side:
            raise MovieError("triple-move side annotation contradicts the frames")
        sign = side * _fitted.RIII_COORIENTATION[local]
        return MoveClass("RIII", sign, local, glob, (("d", d), ("hm", hm), ("ml", ml)))
    if e.kind == "RII":
        a, b = e.ids
        host = after if e.dir > 0 else before
        pat = _tangency_pattern(host, a, b)
        local = f"II{_fitted.RII_SUPERSCRIPT[pat.tangent]}{pat.subtype}"
        sign = e.dir * _fitted.RII_CREATE_SIGN[local]
        return MoveClass("RII", sign, local, pat.subtype, (("d", (a, b)),))
    (cid,) = e.ids
    host = after if e.dir > 0 else before
    _curl_pattern(host, cid)  # legality
    writhe = host.writhes[cid]
    gtype = host.crossing_type(cid)
    sign = e.dir * _fitted.RI_CREATE_SIGN[(writhe, gtype)]
    return MoveClass("RI", sign, writhe, gtype, (("d", cid),))


# ---------------------------------------------------------------------------
# movies


@dataclass(frozen=True)
class ValidationReport:
    problems: Tuple[str, ...]
    closed: str  # "exact" | "renamed" | "open"

    @property
    def ok(self) -> bool:
        return not self.problems


_META_ORDER = {"name": 0, "closure": 1, "inf": 2}

_MOVE_RE = re.compile(r"move \{kind: (\w+), ids: \[(.*?)\], dir: ([+-]?\d+)\}")


@dataclass(frozen=True)
class Movie:
    """Frames and the moves between them; ``moves[i]`` maps frame i to i+1."""

    frames: Tuple[TangleDiagram, ...]
    moves: Tuple[MoveEvent, ...]
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "frames", tuple(self.frames))
        object.__setattr__(self, "moves", tuple(self.moves))
        object.__setattr__(self, "meta", dict(self.meta))
        if len(self.frames) != len(self.moves) + 1:
            raise MovieError(
                f"a movie needs one more frame than moves, got {len(self.frames)} frames / {len(self.moves)} moves"
            )

    @classmethod
    def from_initial(cls, first: TangleDiagram, events: Sequence[MoveEvent], meta: Optional[Mapping[str, str]] = None) -> "Movie":
        frames = [first]
        moves = []
        for e in events:
            nxt = apply_move(frames[-1], e)
            if e.kind == "RIII" and e.dir == 0:
                pairing = _resolve_pairing(frames[-1], e, nxt)
                e = replace(e, dir=_triple_side(pairing))
            frames.append(nxt)
            moves.append(e)
        return cls(tuple(frames), tuple(moves), _fill_meta(meta, first))

    # -- structure ---------------------------------------------------------

    def classes(self) -> Tuple[MoveClass, ...]:
        return tuple(
            classify(self.frames[i], self.moves[i], self.frames[i + 1]) for i in range(len(self.moves))
        )

    def reverse(self) -> "Movie":
        moves = tuple(
            invert_event(self.moves[i], self.frames[i], self.frames[i + 1])
            for i in reversed(range(len(self.moves)))
        )
        return Movie(self.frames[::-1], moves, dict(self.meta))

    def concat(self, other: "Movie") -> "Movie":
        if self.frames[-1] != other.frames[0]:
            raise MovieError("concatenation frames do not match")
        return Movie(self.frames + other.frames[1:], self.moves + other.moves, dict(self.meta))

    def validate(self) -> ValidationReport:
        problems = []
        boundary = self.frames[0].boundary_tokens()
        for i, e in enumerate(self.moves):
            try:
                check_move(self.frames[i], e, self.frames[i + 1])
            except (MovieError, DiagramError) as exc:
                problems.append(f"move {i}: {exc}")
        for i, f in enumerate(self.frames[1:], 1):
            if f.boundary_tokens() != boundary:
                problems.append(f"frame {i}: boundary points changed")
        if self.frames[-1] == self.frames[0]:
            closed = "exact"
        elif self.frames[-1].same_up_to_renaming(self.frames[0]):
            closed = "renamed"
        else:
            closed = "open"
        return ValidationReport(tuple(problems), closed)

    # -- text form -----------------------------------------------------------

    def serialize(self) -> str:
        lines = ["movie {"]
        for k in sorted(self.meta, key=lambda k: (_META_ORDER.get(k, 99), k)):
            lines.append(f"{k}: {self.meta[k]}")
        lines.append("}")
        for i, f in enumerate(self.frames):
            lines.append("frame {")
            lines.append(f.serialize())
            lines.append("}")
            if i < len(self.moves):
                e = self.moves[i]
                lines.append(
                    "move {kind: %s, ids: [%s], dir: %s}"
                    % (e.kind, ", ".join(e.ids), f"{e.dir:+d}" if e.dir else "0")
                )
        return "\n".join(lines) + "\n"

    __str__ = serialize

    @staticmethod
    def parse(text: str) -> "Movie":
        meta: Dict[str, str] = {}
        frames: List[TangleDiagram] = []
        moves: List[MoveEvent] = []
        lines = text.splitlines()
        i = 0
        n = len(lines)

        def skip_blank(i: int) -> int:
            while i < n and (not lines[i].strip() or lines[i].strip().startswith("#")):
                i += 1
            return i

        i = skip_blank(i)
        if i >= n or lines[i].strip() != "movie {":
            raise MovieError(f"line {i + 1}: movie file must start with 'movie {{'")
        i += 1
        while i < n and lines[i].strip() != "}":
            line = lines[i].strip()
            if line and not line.startswith("#"):
                if ":" not in line:
                    raise MovieError(f"line {i + 1}: malformed header entry {line!r}")
                k, v = line.split(":", 1)
                meta[k.strip()] = v.strip()
            i += 1
        if i >= n:
            raise MovieError("unterminated movie header")
        i += 1

        want_frame = True
        while True:
            i = skip_blank(i)
            if i >= n:
                break
            line = lines[i].strip()
            if line == "frame {":
                if not want_frame:
                    raise MovieError(f"line {i + 1}: expected a move record, found a frame")
                start = i + 1
                j = start
                while j < n and lines[j].strip() != "}":
                    j += 1
                if j >= n:
                    raise MovieError(f"line {i + 1}: unterminated frame")
                try:
                    frames.append(TangleDiagram.parse("\n".join(lines[start:j])))
                except DiagramError as exc:
                    raise MovieError(f"line {i + 1}: {exc}")
                i = j + 1
                want_frame = False
            elif line.startswith("move "):
                if want_frame:
                    raise MovieError(f"line {i + 1}: expected a frame, found a move record")
                m = _MOVE_RE.fullmatch(line)
                if not m:
                    raise MovieError(f"line {i + 1}: malformed move record {line!r}")
                kind, ids_text, dir_text = m.groups()
                ids = tuple(x.strip() for x in ids_text.split(",")) if ids_text.strip() else ()
                try:
                    moves.append(MoveEvent(kind, ids, int(dir_text)))
                except MovieError as exc:
                    raise MovieError(f"line {i + 1}: {exc}")
                i += 1
                want_frame = True
            else:
                raise MovieError(f"line {i + 1}: unrecognized movie line {line!r}")
        if want_frame:
            raise MovieError("movie ends with a move record but no final frame")
        if not frames:
            raise MovieError("movie has no frames")
        return Movie(tuple(frames), tuple(moves), meta)


def _closure_text(d: TangleDiagram) -> str:
    tokens = [e for e in d.main if e[0] == "b"]
    if not tokens:
        return "none"
    parts = []
    for i, t in enumerate(tokens):
        if t[2] == "+":
            nxt = tokens[(i + 1) % len(tokens)]
            if nxt[2] != "-":
                return "irregular"
            parts.append(f"{t[1]}->{nxt[1]}")
    return ", ".join(parts)


def _inf_text(d: TangleDiagram) -> str:
    tokens = d.inf_arc_tokens()
    if not tokens:
        return "closed"
    before, after = tokens
    return f"{before[1]}+..{after[1]}-"


def _fill_meta(meta: Optional[Mapping[str, str]], first: TangleDiagram) -> Dict[str, str]:
    out = dict(meta or {})
    out.setdefault("closure", _closure_text(first))
    out.setdefault("inf", _inf_text(first))
    return out
