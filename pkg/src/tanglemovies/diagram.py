"""Tangle diagrams as signed Gauss codes on the abstract closure circle.

A diagram is a collection of oriented event circles.  The main circle is the
tangle together with its abstract closure: over-passes, under-passes,
boundary points, and the single marked point ``inf`` in cyclic order.
Smoothing surgery can split off extra circles carrying only crossing events.

Event encoding (plain tuples, hashable):

* ``("o", cid)``      — over-pass of crossing ``cid``
* ``("u", cid)``      — under-pass of crossing ``cid``
* ``("b", label, s)`` — boundary point at strand position ``label``;
  ``s`` is ``"+"`` for a tangle exit and ``"-"`` for a tangle entry
* ``("inf",)``        — the marked point; exactly one per diagram

Crossing chords are oriented under → over; ``crossing_type`` asks whether the
marked point lies on that oriented arc, and ``grading`` collects the boundary
points on it.
"""

from __future__ import annotations

import re
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

Event = Tuple  # ("o", cid) | ("u", cid) | ("b", label, sign) | ("inf",)
Circle = Tuple[Event, ...]

INF: Event = ("inf",)


class DiagramError(ValueError):
    """Raised for malformed diagrams or unknown crossing references."""


def over(cid: str) -> Event:
    return ("o", cid)


def under(cid: str) -> Event:
    return ("u", cid)


def boundary(label: str, sign: str) -> Event:
    if sign not in ("+", "-"):
        raise DiagramError(f"boundary sign must be + or -, got {sign!r}")
    return ("b", label, sign)


def _rotate_min(circle: Circle) -> Circle:
    """Rotate a circle to its lexicographically least rotation."""
    if not circle:
        return circle
    best = min(range(len(circle)), key=lambda i: circle[i:] + circle[:i])
    return circle[best:] + circle[:best]


class TangleDiagram:
    """An immutable signed Gauss code with a marked point.

    ``circles`` is a tuple of event tuples; the circle containing ``inf`` is
    stored first and rotated to start at ``inf``; the remaining circles are
    rotated to their least rotation and sorted.  ``writhes`` maps crossing id
    to +1/-1.  ``meta`` carries optional annotations (currently the Whitney
    tag of generator-created curls, keyed by crossing id).
    """

    __slots__ = ("circles", "writhes", "meta")

    def __init__(
        self,
        circles: Iterable[Iterable[Event]],
        writhes: Mapping[str, int],
        meta: Optional[Mapping[str, int]] = None,
    ):
        circs = [tuple(c) for c in circles]
        inf_positions = [
            (ci, ei) for ci, c in enumerate(circs) for ei, e in enumerate(c) if e == INF
        ]
        if len(inf_positions) != 1:
            raise DiagramError(f"diagram must contain exactly one marked point, found {len(inf_positions)}")
        ci, ei = inf_positions[0]
        main = circs[ci][ei:] + circs[ci][:ei]
        rest = sorted(_rotate_min(c) for i, c in enumerate(circs) if i != ci)
        object.__setattr__(self, "circles", (main, *rest))
        object.__setattr__(self, "writhes", dict(writhes))
        object.__setattr__(self, "meta", dict(meta or {}))
        self._check()

    def __setattr__(self, name, value):  # immutability
        raise AttributeError("TangleDiagram is immutable")

    def _check(self) -> None:
        seen: Dict[str, List[str]] = {}
        for c in self.circles:
            for e in c:
                if e[0] in ("o", "u"):
                    seen.setdefault(e[1], []).append(e[0])
        for cid, kinds in seen.items():
            if sorted(kinds) != ["o", "u"]:
                raise DiagramError(f"crossing {cid!r} must occur exactly once over and once under")
            if cid not in self.writhes:
                raise DiagramError(f"crossing {cid!r} has no writhe")
        for cid in self.writhes:
            if cid not in seen:
                raise DiagramError(f"writhe given for absent crossing {cid!r}")
        for cid, w in self.writhes.items():
            if w not in (1, -1):
                raise DiagramError(f"writhe of {cid!r} must be +1 or -1")

    # -- basic queries -----------------------------------------------------

    @property
    def main(self) -> Circle:
        return self.circles[0]

    def crossing_ids(self) -> FrozenSet[str]:
        return frozenset(self.writhes)

    def writhe(self) -> int:
        return sum(self.writhes.values())

    def boundary_tokens(self) -> Tuple[Event, ...]:
        return tuple(e for c in self.circles for e in c if e[0] == "b")

    def locate(self, event: Event) -> Tuple[int, int]:
        """Return (circle index, position) of an event; events are unique."""
        for ci, c in enumerate(self.circles):
            for ei, e in enumerate(c):
                if e == event:
                    return ci, ei
        raise DiagramError(f"event {event!r} not in diagram")

    def has_event(self, event: Event) -> bool:
        return any(event in c for c in self.circles)

    def arc_between(self, start: Event, end: Event) -> Tuple[Event, ...]:
        """Events strictly between ``start`` and ``end`` along their circle.

        Both events must lie on the same circle; the arc follows the circle
        orientation from ``start`` to ``end``.
        """
        ci, si = self.locate(start)
        cj, ei = self.locate(end)
        if ci != cj:
            raise DiagramError(f"events {start!r} and {end!r} lie on different circles")
        c = self.circles[ci]
        n = len(c)
        out = []
        k = (si + 1) % n
        while k != ei:
            out.append(c[k])
            k = (k + 1) % n
        return tuple(out)

    # -- crossing type and grading ------------------------------------------

    def positive_arc(self, cid: str) -> Tuple[Event, ...]:
        """The events on the oriented arc from the under- to the over-pass."""
        if cid not in self.writhes:
            raise DiagramError(f"unknown crossing {cid!r}")
        return self.arc_between(("u", cid), ("o", cid))

    def crossing_type(self, cid: str) -> int:
        """1 if the marked point lies on the under→over arc of ``cid``, else 0."""
        return 1 if INF in self.positive_arc(cid) else 0

    def inf_arc_tokens(self) -> Tuple[Event, ...]:
        """The boundary tokens of the closure arc carrying the marked point.

        These are the nearest boundary points before and after ``inf`` on its
        circle; a 1-tangle has exactly this one arc.
        """
        c = self.main
        n = len(c)
        out = []
        for step in (-1, 1):
            k = step % n
            while c[k][0] != "b":
                k = (k + step) % n
                if c[k] == INF:
                    return tuple(out)  # no boundary at all (closed circle)
            out.append(c[k])
        return tuple(out)

    def grading(self, cid: str) -> FrozenSet[str]:
        """Boundary-point names on the under→over arc of ``cid``, plus ``inf``.

        Boundary points are reported as ``label+`` / ``label-`` strings.  The
        two endpoints of the marked-point arc are represented by ``inf``
        itself and omitted (they lie on the positive arc exactly when the
        crossing is of type 1, so they carry no extra information).
        """
        skip = set(self.inf_arc_tokens())
        out = {"inf"}
        for e in self.positive_arc(cid):
            if e[0] == "b" and e not in skip:
                out.add(e[1] + e[2])
        return frozenset(out)

    # -- surgery ----------------------------------------------------------

    def switch(self, cid: str) -> "TangleDiagram":
        if cid not in self.writhes:
            raise DiagramError(f"unknown crossing {cid!r}")
        w = dict(self.writhes)
        w[cid] = -w[cid]
        circles = [
            tuple(
                (("u", cid) if e == ("o", cid) else ("o", cid) if e == ("u", cid) else e)
                for e in c
            )
            for c in self.circles
        ]
        return TangleDiagram(circles, w, self.meta)

    def smooth(self, cid: str) -> "TangleDiagram":
        """Orientedly smooth ``cid``: remove it and reconnect both strands.

        On a single circle ``[... u q A ... o q B ...]`` this yields the two
        circles ``A`` and ``B``; if the passes lie on different circles the
        circles merge.
        """
        if cid not in self.writhes:
            raise DiagramError(f"unknown crossing {cid!r}")
        ci, ui = self.locate(("u", cid))
        cj, oi = self.locate(("o", cid))
        circles = list(self.circles)
        if ci == cj:
            c = circles[ci]
            n = len(c)
            a, b = [], []
            k = (ui + 1) % n
            while k != oi:
                a.append(c[k])
                k = (k + 1) % n
            k = (oi + 1) % n
            while k != ui:
                b.append(c[k])
                k = (k + 1) % n
            del circles[ci]
            circles.extend([tuple(a), tuple(b)])
        else:
            c1, c2 = circles[ci], circles[cj]
            merged = c1[ui + 1 :] + c1[:ui] + c2[oi + 1 :] + c2[:oi]
            for idx in sorted((ci, cj), reverse=True):
                del circles[idx]
            circles.append(tuple(merged))
        w = dict(self.writhes)
        del w[cid]
        meta = {k: v for k, v in self.meta.items() if k != cid}
        circles = [c for c in circles if c]  # drop empty event loops
        return TangleDiagram(circles, w, meta)

    def smooth_reversed(self, cid: str) -> "TangleDiagram":
        """Smooth ``cid`` against the orientation (the unoriented surgery).

        The arc behind the over-pass is reversed wholesale; crossings with
        exactly one pass on that arc flip their writhe so that every stored
        writhe remains the crossing sign for the new circle orientations.
        On a single circle ``[u q A ... o q B ...]`` this yields the single
        circle ``A + reverse(B)``; passes on different circles merge the same
        way.
        """
        if cid not in self.writhes:
            raise DiagramError(f"unknown crossing {cid!r}")
        ci, ui = self.locate(("u", cid))
        cj, oi = self.locate(("o", cid))
        circles = list(self.circles)
        if ci == cj:
            c = circles[ci]
            n = len(c)
            a, b = [], []
            k = (ui + 1) % n
            while k != oi:
                a.append(c[k])
                k = (k + 1) % n
            k = (oi + 1) % n
            while k != ui:
                b.append(c[k])
                k = (k + 1) % n
            del circles[ci]
            circles.append(tuple(a) + tuple(reversed(b)))
            reversed_part = b
        else:
            c1, c2 = circles[ci], circles[cj]
            a = c1[ui + 1 :] + c1[:ui]
            b = c2[oi + 1 :] + c2[:oi]
            for idx in sorted((ci, cj), reverse=True):
                del circles[idx]
            circles.append(tuple(a) + tuple(reversed(b)))
            reversed_part = list(b)
        flipped = set()
        for e in reversed_part:
            if e[0] in ("o", "u") and e[1] != cid:
                if e[1] in flipped:
                    flipped.discard(e[1])  # both passes reversed: sign kept
                else:
                    flipped.add(e[1])
        w = dict(self.writhes)
        del w[cid]
        for q in flipped:
            w[q] = -w[q]
        meta = {k: v for k, v in self.meta.items() if k != cid}
        circles = [c for c in circles if c]  # drop empty event loops
        return TangleDiagram(circles, w, meta)

    def surgery(self, cid: str, action: str) -> "TangleDiagram":
        if action == "switch":
            return self.switch(cid)
        if action == "smooth-oriented":
            return self.smooth(cid)
        if action == "smooth-reversed":
            return self.smooth_reversed(cid)
        raise DiagramError(f"unknown surgery action {action!r}")

    # -- renaming / comparison ----------------------------------------------

    def rename(self, mapping: Mapping[str, str]) -> "TangleDiagram":
        def m(cid: str) -> str:
            return mapping.get(cid, cid)

        circles = [
            tuple((e[0], m(e[1])) if e[0] in ("o", "u") else e for e in c)
            for c in self.circles
        ]
        w = {m(cid): wr for cid, wr in self.writhes.items()}
        if len(w) != len(self.writhes):
            raise DiagramError("renaming collides crossing ids")
        meta = {m(k): v for k, v in self.meta.items()}
        return TangleDiagram(circles, w, meta)

    def canonical_renaming(self) -> Dict[str, str]:
        """Rename crossings in order of first occurrence along the circles."""
        mapping: Dict[str, str] = {}
        for c in self.circles:
            for e in c:
                if e[0] in ("o", "u") and e[1] not in mapping:
                    mapping[e[1]] = f"c{len(mapping) + 1}"
        return mapping

    def same_up_to_renaming(self, other: "TangleDiagram") -> bool:
        a = self.rename(self.canonical_renaming())
        b = other.rename(other.canonical_renaming())
        return a == b

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, TangleDiagram)
            and self.circles == other.circles
            and self.writhes == other.writhes
            and self.meta == other.meta
        )

    def __hash__(self) -> int:
        return hash((self.circles, tuple(sorted(self.writhes.items()))))

    # -- text form -----------------------------------------------------------

    def serialize(self) -> str:
        lines = []
        for c in self.circles:
            toks = " ".join(_event_token(e) for e in c)
            lines.append(f"circle: [{toks}]")
        wr = ", ".join(
            f"{cid}:{'+' if self.writhes[cid] > 0 else '-'}" for cid in sorted(self.writhes)
        )
        lines.append("writhes: {" + wr + "}")
        if self.meta:
            mt = ", ".join(
                f"{k}:{'+' if v > 0 else '-'}" for k, v in sorted(self.meta.items())
            )
            lines.append("meta: {" + mt + "}")
        return "\n".join(lines)

    __str__ = serialize

    def __repr__(self) -> str:
        return f"TangleDiagram<{len(self.writhes)} crossings, {len(self.circles)} circles>"

    @staticmethod
    def parse(text: str) -> "TangleDiagram":
        circles: List[List[Event]] = []
        writhes: Dict[str, int] = {}
        meta: Dict[str, int] = {}
        saw_writhes = False
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("circle:"):
                body = line[len("circle:") :].strip()
                if not (body.startswith("[") and body.endswith("]")):
                    raise DiagramError(f"malformed circle line: {line!r}")
                toks = body[1:-1].split()
                circles.append([_parse_token(t) for t in toks])
            elif line.startswith("writhes:"):
                saw_writhes = True
                writhes.update(_parse_signed_map(line[len("writhes:") :]))
            elif line.startswith("meta:"):
                meta.update(_parse_signed_map(line[len("meta:") :]))
            else:
                raise DiagramError(f"unrecognized diagram line: {line!r}")
        if not circles or not saw_writhes:
            raise DiagramError("diagram needs at least one circle line and a writhes line")
        return TangleDiagram(circles, writhes, meta)


def _event_token(e: Event) -> str:
    if e == INF:
        return "inf"
    if e[0] == "o":
        return f"o{e[1]}"
    if e[0] == "u":
        return f"u{e[1]}"
    if e[0] == "b":
        return f"b{e[1]}:{e[2]}"
    raise DiagramError(f"unknown event {e!r}")


def _parse_token(tok: str) -> Event:
    if tok == "inf":
        return INF
    if tok.startswith("b"):
        m = re.fullmatch(r"b(.+):([+-])", tok)
        if not m:
            raise DiagramError(f"malformed boundary token {tok!r}")
        return ("b", m.group(1), m.group(2))
    if tok.startswith("o") and len(tok) > 1:
        return ("o", tok[1:])
    if tok.startswith("u") and len(tok) > 1:
        return ("u", tok[1:])
    raise DiagramError(f"unknown event token {tok!r}")


def _parse_signed_map(body: str) -> Dict[str, int]:
    body = body.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise DiagramError(f"malformed map: {body!r}")
    out: Dict[str, int] = {}
    inner = body[1:-1].strip()
    if not inner:
        return out
    for item in inner.split(","):
        item = item.strip()
        m = re.fullmatch(r"(.+?)\s*:\s*([+-])", item)
        if not m:
            raise DiagramError(f"malformed map entry {item!r}")
        out[m.group(1)] = 1 if m.group(2) == "+" else -1
    return out


def braid_closure(
    word: Sequence[int],
    n: int,
    inf_arc: int = 1,
    closure: Optional[Mapping[int, int]] = None,
    names: Optional[Sequence[str]] = None,
) -> TangleDiagram:
    """The single-circle abstract closure of an n-strand braid word.

    ``word`` lists generators as signed integers (``+i``/``-i`` for the
    positive/negative crossing of positions i, i+1).  At a positive crossing
    the strand entering from position ``i`` passes under.  ``closure`` maps a
    top position to the bottom position its closure arc feeds (default: top j
    to bottom j); the arcs must join everything into one circle.  ``inf_arc``
    names the bottom position whose incoming closure arc carries the marked
    point.  ``names`` optionally gives one crossing id per letter.
    """
    if names is None:
        names = [f"x{k + 1}" for k in range(len(word))]
    if len(names) != len(word):
        raise DiagramError("need exactly one crossing name per braid letter")
    closure = dict(closure) if closure else {j: j for j in range(1, n + 1)}
    if sorted(closure) != list(range(1, n + 1)) or sorted(closure.values()) != list(
        range(1, n + 1)
    ):
        raise DiagramError("closure must be a bijection of positions")

    positions = list(range(1, n + 1))  # positions[p-1] = strand currently at p
    strand_events: List[List[Event]] = [[] for _ in range(n + 1)]
    writhes: Dict[str, int] = {}
    for letter, cid in zip(word, names):
        i = abs(letter)
        if not 1 <= i <= n - 1:
            raise DiagramError(f"letter {letter} out of range for {n} strands")
        lo, hi = positions[i - 1], positions[i]
        if letter > 0:
            strand_events[lo].append(("u", cid))
            strand_events[hi].append(("o", cid))
            writhes[cid] = 1
        else:
            strand_events[lo].append(("o", cid))
            strand_events[hi].append(("u", cid))
            writhes[cid] = -1
        positions[i - 1], positions[i] = hi, lo

    top_of = {}  # strand -> top position
    for p, s in enumerate(positions, start=1):
        top_of[s] = p

    circle: List[Event] = []
    start = inf_arc
    j = start
    visited = 0
    while True:
        circle.append(("b", str(j), "-"))
        circle.extend(strand_events[j])
        k = top_of[j]
        circle.append(("b", str(k), "+"))
        visited += 1
        j = closure[k]
        if j == inf_arc:
            circle.append(INF)
            break
        if visited > n:
            raise DiagramError("closure arcs do not form a single circle")
    if visited != n:
        raise DiagramError("closure arcs do not form a single circle")
    return TangleDiagram([circle], writhes)


def braid_long_closure(
    word: Sequence[int],
    n: int,
    inf_arc: int = 1,
    closure: Optional[Mapping[int, int]] = None,
    names: Optional[Sequence[str]] = None,
) -> TangleDiagram:
    """The closure of a braid word cut open along the marked arc: a 1-tangle.

    Same construction as :func:`braid_closure`, but only the boundary pair of
    the arc carrying the marked point survives (relabelled to ``1``); all
    other closure arcs become internal.
    """
    D = braid_closure(word, n, inf_arc=inf_arc, closure=closure, names=names)
    main = D.main  # starts at the marked point by construction
    kept = []
    for i, e in enumerate(main):
        if e[0] != "b":
            kept.append(e)
            continue
        if i == 1 or i == len(main) - 1:  # entry after / exit before the mark
            kept.append(("b", "1", e[2]))
    return TangleDiagram([kept], D.writhes, D.meta)


def display_grading(grading: FrozenSet[str]) -> str:
    """Human form of a grading: complete +/- label pairs compress to the label.

    ``{"2+","2-","3+","3-","inf"}`` prints as ``{2,3,inf}``.
    """
    labels = sorted(x for x in grading if x != "inf")
    plus = {x[:-1] for x in labels if x.endswith("+")}
    minus = {x[:-1] for x in labels if x.endswith("-")}
    parts = []
    for lbl in sorted(plus | minus):
        if lbl in plus and lbl in minus:
            parts.append(lbl)
        else:
            if lbl in plus:
                parts.append(lbl + "+")
            if lbl in minus:
                parts.append(lbl + "-")
    parts.append("inf")
    return "{" + ",".join(parts) + "}"
